"""Physical constants and Earth model defaults."""

# Propagation speed (m/s), exact by SI definition
C_LIGHT = 299792458.0

# Mean Earth radius (m); the ground surface is modeled as a sphere of this
# radius throughout, configurable per scenario
EARTH_RADIUS = 6371000.0

# Earth rotation rate (rad/s), IAU sidereal value
EARTH_ROTATION_RATE = 7.2921159e-5

# Geocentric gravitational constant (m^3/s^2), WGS-84
EARTH_MU = 3.986004418e14

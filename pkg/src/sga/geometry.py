"""Imaging geometry: coordinate frames, spherical-Earth relations, orbits.

The imaging frame is an Earth-centered frame rotated so that +Y points at
the radar at the aperture center, X lies in the plane spanned by Y and the
center velocity, and Z completes a right-handed triad.  Radar positions are
carried both as Cartesian vectors and as spherical states (R, theta, phi)
with the convention

    x = R cos(phi) sin(theta),  y = R cos(phi) cos(theta),  z = R sin(phi),

i.e. theta is the in-plane angle from +Y toward +X and phi the out-of-plane
(grazing) angle.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import EARTH_MU, EARTH_RADIUS, EARTH_ROTATION_RATE

# Out-of-plane excursions below this (meters) are treated as exactly planar;
# physical excursions of interest are km-scale, rounding debris is sub-nm.
PLANAR_SNAP_M = 1e-6


@dataclass(frozen=True)
class EarthModel:
    """Spherical Earth: radius (m) and rotation rate (rad/s)."""

    radius: float = EARTH_RADIUS
    rotation_rate: float = EARTH_ROTATION_RATE

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("Earth radius must be positive")
        if self.rotation_rate < 0:
            raise ValueError("Earth rotation rate must be non-negative")


@dataclass(frozen=True)
class RadarState:
    """Radar position at one slow-time instant, in the imaging frame."""

    t: float
    position: np.ndarray
    R: float
    theta: float
    phi: float


@dataclass
class GroundPoint:
    """Point scatterer location; ``on_surface`` pins it to the sphere."""

    x: float
    y: float
    z: float
    on_surface: bool = True

    @classmethod
    def on_sphere(cls, x, y, earth):
        """Point on the spherical surface above the (x, y) projection."""
        return cls(x, y, surface_height(x, y, earth), on_surface=True)

    @property
    def vector(self):
        return np.array([self.x, self.y, self.z])


@dataclass
class Trajectory:
    """Time-ordered radar states in the imaging frame.

    Arrays are stored column-wise for vectorized access; ``state(i)`` gives
    the per-sample view.
    """

    t: np.ndarray
    positions: np.ndarray           # (n, 3)
    R: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    center_index: int
    planar: bool = field(default=False)

    def __post_init__(self):
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self):
        return len(self.t)

    def state(self, i):
        return RadarState(self.t[i], self.positions[i], self.R[i],
                          self.theta[i], self.phi[i])

    @property
    def unit_vectors(self):
        """Radial unit vectors toward the radar, shape (n, 3)."""
        return self.positions / self.R[:, None]

    def angular_rate(self):
        """dtheta/dt at aperture center by central difference."""
        c = self.center_index
        if c == 0 or c == len(self) - 1:
            raise ValueError("aperture center is on the trajectory boundary")
        return (self.theta[c + 1] - self.theta[c - 1]) / (self.t[c + 1] - self.t[c - 1])

    def plane_offsets(self, p):
        """Plane offset u of point ``p`` for every state (dot with unit vector)."""
        v = p.vector if isinstance(p, GroundPoint) else np.asarray(p)
        return self.unit_vectors @ v


def surface_height(x, y, earth):
    """Height z of the spherical surface above the orbit-plane point (x, y)."""
    d = earth.radius ** 2 - x ** 2 - y ** 2
    if np.any(np.asarray(d) < 0):
        raise ValueError("point lies outside the spherical surface disc")
    return np.sqrt(d)


def slant_range(p, s):
    """Euclidean distance from a ground point to a radar state."""
    pv = p.vector if isinstance(p, GroundPoint) else np.asarray(p)
    sv = s.position if isinstance(s, RadarState) else np.asarray(s)
    return float(np.linalg.norm(pv - sv))


def slant_ranges(p, traj):
    """Slant range from point ``p`` to every trajectory sample."""
    v = p.vector if isinstance(p, GroundPoint) else np.asarray(p)
    return np.linalg.norm(traj.positions - v[None, :], axis=1)


def u_from_r(r, R, earth):
    """Plane offset u for slant range r at radar distance R from Earth center."""
    return (R ** 2 + earth.radius ** 2 - np.asarray(r, dtype=float) ** 2) / (2.0 * R)


def r_from_u(u, R, earth):
    """Slant range r for plane offset u; inverse of :func:`u_from_r`."""
    rad = R ** 2 + earth.radius ** 2 - 2.0 * R * np.asarray(u, dtype=float)
    if np.any(rad < 0):
        raise ValueError("plane offset outside reachable geometry (negative radicand)")
    return np.sqrt(rad)


def build_imaging_frame(times, positions, center_index):
    """Rotate an ECEF trajectory into the imaging frame.

    Parameters
    ----------
    times : (n,) array of sample times (s), strictly increasing.
    positions : (n, 3) array of ECEF positions (m).
    center_index : index of the aperture-center sample.

    Returns
    -------
    Trajectory with spherical states populated.  If the rotated trajectory
    is planar to within ``PLANAR_SNAP_M`` the out-of-plane component is
    zeroed exactly so that downstream branches agree bit-for-bit.
    """
    times = np.asarray(times, dtype=float)
    positions = np.asarray(positions, dtype=float)
    n = len(times)
    if n < 2:
        raise ValueError("need at least 2 trajectory samples")
    if not 0 <= center_index < n:
        raise ValueError("center index out of range")

    pc = positions[center_index]
    if np.linalg.norm(pc) == 0:
        raise ValueError("center position is at the Earth center")

    # center velocity by finite differences (central where possible)
    lo = max(center_index - 1, 0)
    hi = min(center_index + 1, n - 1)
    vc = (positions[hi] - positions[lo]) / (times[hi] - times[lo])

    yhat = pc / np.linalg.norm(pc)
    v_perp = vc - (vc @ yhat) * yhat
    nv = np.linalg.norm(v_perp)
    if nv < 1e-9 * max(np.linalg.norm(vc), 1.0):
        raise ValueError("center velocity parallel to position; frame undefined")
    xhat = v_perp / nv
    zhat = np.cross(xhat, yhat)

    rot = np.stack([xhat, yhat, zhat])          # rows: new basis
    pr = positions @ rot.T

    planar = bool(np.max(np.abs(pr[:, 2])) < PLANAR_SNAP_M)
    if planar:
        pr[:, 2] = 0.0

    R = np.linalg.norm(pr, axis=1)
    theta = np.arctan2(pr[:, 0], pr[:, 1])
    phi = np.zeros(n) if planar else np.arcsin(pr[:, 2] / R)
    return Trajectory(times.copy(), pr, R, theta, phi, center_index, planar=planar)


def generate_orbit(altitude, duration, prf, earth, earth_rotation=True,
                   mu=EARTH_MU, inclination=np.pi / 2, center_latitude=0.0):
    """Sample a circular orbit in ECEF, centered on t = 0.

    The orbit plane has the given inclination to the equator with the
    ascending node on the inertial X axis; ``center_latitude`` sets the
    argument of the satellite at t = 0 (and so how strongly Earth rotation
    bends the ECEF track out of the osculating plane).  When
    ``earth_rotation`` is false the ECEF and inertial frames coincide and
    the track is exactly planar.

    Returns (times, positions) with one sample per 1/prf, the center sample
    exactly at t = 0.
    """
    if altitude <= 0:
        raise ValueError("altitude must be positive")
    n = int(round(duration * prf))
    if n < 2:
        raise ValueError("duration * prf must give at least 2 samples")
    rs = earth.radius + altitude
    omega = np.sqrt(mu / rs ** 3)

    t = (np.arange(n) - n // 2) / prf
    si0 = max(abs(np.sin(inclination)), 1e-12)
    arg0 = np.arcsin(np.clip(np.sin(center_latitude) / si0, -1.0, 1.0))
    arg = arg0 + omega * t
    # orbit in inertial frame: ascending node along X
    ci, si = np.cos(inclination), np.sin(inclination)
    x_i = rs * np.cos(arg)
    y_i = rs * np.sin(arg) * ci
    z_i = rs * np.sin(arg) * si

    if not earth_rotation:
        return t, np.stack([x_i, y_i, z_i], axis=1)

    rot = earth.rotation_rate * t
    cr, sr = np.cos(rot), np.sin(rot)
    # ECEF = Rz(-rot) @ inertial
    x_e = x_i * cr + y_i * sr
    y_e = -x_i * sr + y_i * cr
    return t, np.stack([x_e, y_e, z_i], axis=1)


def load_trajectory_file(path):
    """Read a ``t x y z`` trajectory file (seconds, meters, ECEF).

    Lines starting with '#' are comments.  Returns (times, positions).
    """
    times = []
    rows = []
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 4:
                raise ValueError(f"{path}:{ln}: expected 't x y z', got {len(parts)} fields")
            vals = [float(v) for v in parts]
            times.append(vals[0])
            rows.append(vals[1:])
    if len(times) < 2:
        raise ValueError(f"{path}: need at least 2 samples")
    return np.asarray(times), np.asarray(rows)

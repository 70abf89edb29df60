"""Spherical-geometry image formation for spaceborne spotlight SAR.

Pipeline: simulated (or ingested) raw echoes -> pulse compression ->
plane-offset resampling and carrier re-referencing -> range FFT (polar
phase history) -> optional out-of-plane corrections -> polar-to-
rectangular reformatting -> 2-D Fourier inversion.  A time-domain
backprojection oracle and point-target metrics close the loop.
"""

__version__ = "0.1.0"

from .constants import C_LIGHT, EARTH_MU, EARTH_RADIUS, EARTH_ROTATION_RATE
from .echo import Gate, PointTarget, RadarParams, RawData, auto_gate, \
    baseband_chirp, simulate_raw
from .geometry import EarthModel, GroundPoint, RadarState, Trajectory, \
    build_imaging_frame, generate_orbit, load_trajectory_file, r_from_u, \
    slant_range, slant_ranges, surface_height, u_from_r
from .imaging import ComplexImage, RangeCompressed, azimuth_compress, \
    form_image, range_compress, theoretical_psf
from .mocomp import ErrorBudget, SceneReference, error_budget, \
    first_order_comp, phase_error, second_order_comp
from .oracle import FocusMetrics, backproject, extract_profile, \
    interpolated_peak, measure
from .polar_format import ScalingLaw, WavenumberData, azimuth_resample, \
    range_resample, scaling_law
from .preprocess import CompressedData, PhaseHistory, UDomainData, apply_h1, \
    default_u_axis, pulse_compress, resample_to_u, to_phase_history, \
    validate_phase_history
from .resample import interpolate_1d, kernel_weights

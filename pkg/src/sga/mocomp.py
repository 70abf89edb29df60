"""Out-of-plane (Earth-rotation) phase error model and compensation.

A non-planar trajectory leaves the residual phase

    Phi_e(t, f_r) = -(4 pi / c)(fc_eff + f_r) z sin(phi(t)),

with z = sqrt(R0^2 - x^2 - y^2) the target height over the orbit plane.
The first-order correction conjugates this at the scene center in the
phase-history domain (removing the bulk azimuth phase error and its range
migration); the remaining range-dependent part is corrected after polar
reformatting and range compression, where the y coordinate of each sample
is known.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import C_LIGHT
from .geometry import surface_height
from .imaging import RangeCompressed
from .preprocess import PhaseHistory


@dataclass(frozen=True)
class SceneReference:
    """Scene-center coordinates in the orbit-plane projection."""

    x_c: float
    y_c: float
    z_c: float

    @classmethod
    def from_xy(cls, x_c, y_c, earth):
        return cls(float(x_c), float(y_c), float(surface_height(x_c, y_c, earth)))

    @property
    def xy(self):
        return (self.x_c, self.y_c)

    def plane_offsets(self, traj, include_z=True):
        """Plane offset of the scene center at every trajectory sample."""
        u = (self.x_c * np.cos(traj.phi) * np.sin(traj.theta)
             + self.y_c * np.cos(traj.phi) * np.cos(traj.theta))
        if include_z:
            u = u + self.z_c * np.sin(traj.phi)
        return u


@dataclass
class ErrorBudget:
    """Phase-error magnitudes that decide which corrections a scenario needs."""

    peak_ape: float             # rad, worst corner of the scene
    peak_ape_center: float      # rad, scene center (what H2 removes)
    residual_rcm: float         # m, worst residual migration after H2
    range_cell: float           # m, slant cell the residual is judged against
    d_ape_dx: float             # rad/m, azimuth space variance at center
    d_ape_dy: float             # rad/m, range space variance at center

    def as_dict(self):
        return {
            "peak_ape_rad": self.peak_ape,
            "peak_ape_center_rad": self.peak_ape_center,
            "residual_rcm_m": self.residual_rcm,
            "range_cell_m": self.range_cell,
            "d_ape_dx_rad_per_m": self.d_ape_dx,
            "d_ape_dy_rad_per_m": self.d_ape_dy,
        }


def _error_phase(kr, z, sin_phi):
    # single expression shared by the model and its conjugate corrections,
    # so compensation is exact at the reference by construction
    return -kr * z * sin_phi


def phase_error(t, f_r, p, traj, fc_eff, c=C_LIGHT):
    """Out-of-plane phase error at slow time(s) t and range frequency f_r.

    ``phi(t)`` is interpolated from the trajectory (exact at the sample
    instants).  Broadcasts over t and f_r.
    """
    t = np.asarray(t, dtype=float)
    f_r = np.asarray(f_r, dtype=float)
    if t.shape == traj.t.shape and np.array_equal(t, traj.t):
        phi = traj.phi          # exact at the sample instants
    else:
        phi = PchipInterpolator(traj.t, traj.phi)(t)
    sin_phi = np.sin(phi)
    z = p.z if hasattr(p, "z") else float(p[2])
    kr = 4 * np.pi / c * (fc_eff + f_r)
    if t.ndim and f_r.ndim:
        return _error_phase(kr[None, :], z, sin_phi[:, None])
    return _error_phase(kr, z, sin_phi)


def first_order_comp(ph, ref):
    """Remove the scene-center phase error in the phase-history domain.

    Multiplies by the exact conjugate of the center error, so center APE
    and its range migration vanish identically.
    """
    kr = 4 * np.pi / ph.radar.c * (ph.fc_eff[:, None] + ph.fr_axis[None, :])
    phi_e = _error_phase(kr, ref.z_c, np.sin(ph.phi)[:, None])
    data = ph.data * np.exp(-1j * phi_e)
    return PhaseHistory(data, ph.fr_axis, ph.t, ph.theta, ph.phi, ph.a,
                        ph.fc_eff, ph.br_eff, ph.radar, ph.u_ref,
                        ph.center_index, scene_ref=ph.scene_ref,
                        range_scaled=ph.range_scaled)


def h2_phase(ph, ref):
    """Phase applied by :func:`first_order_comp` (for identity checks)."""
    kr = 4 * np.pi / ph.radar.c * (ph.fc_eff[:, None] + ph.fr_axis[None, :])
    return -_error_phase(kr, ref.z_c, np.sin(ph.phi)[:, None])


def second_order_comp(rc, ref, earth):
    """Range-dependent residual correction in the (tt, y) domain.

    Each row tt carries the look angles of the band-center azimuth map;
    each column y supplies the target height, restoring the y dependence
    the first-order step froze at the scene center.  Rows whose y leaves
    the surface domain pass through unchanged.
    """
    amap = rc.azimuth_map
    y = rc.y_axis
    d = earth.radius ** 2 - ref.x_c ** 2 - y ** 2
    ok = d >= 0.0
    if not np.all(ok):
        warnings.warn(f"{np.count_nonzero(~ok)} range cells outside the "
                      "surface domain; left uncorrected")
    dz = np.where(ok, np.sqrt(np.where(ok, d, 0.0)) - ref.z_c, 0.0)
    slope = np.tan(amap.phi0) / np.cos(amap.theta0)
    phase = (4 * np.pi * rc.fc_ref / rc.radar.c) * slope[:, None] * dz[None, :]
    return RangeCompressed(rc.data * np.exp(1j * phase), rc.kx_axis,
                           rc.y_axis, rc.dky_support, rc.scene_ref,
                           rc.azimuth_map, rc.fc_ref, rc.radar, rc.pad_factor)


def error_budget(half_extent_x, half_extent_y, ref, traj, radar, fc_eff, earth):
    """Evaluate the phase-error scales for a scene of +-half extents.

    Corner APE decides whether compensation is needed at all (compare with
    pi/2); the residual-RCM figure justifies dropping the migration term of
    the residual; the derivatives quantify space variance at the center.
    """
    sin_phi = np.sin(traj.phi)
    k0 = 4 * np.pi * fc_eff / radar.c
    spk = float(np.abs(sin_phi).max())

    corners = [(ref.x_c + sx * half_extent_x, ref.y_c + sy * half_extent_y)
               for sx in (-1, 1) for sy in (-1, 1)]
    z_corners = np.array([surface_height(x, y, earth) for x, y in corners])
    peak_ape = float(np.max(np.abs(_error_phase(k0, z_corners[:, None],
                                                sin_phi[None, :]))))
    peak_center = float(np.max(np.abs(_error_phase(k0, ref.z_c, sin_phi))))

    dz = np.abs(z_corners - ref.z_c).max()
    residual_rcm = float(dz * spk)
    a_mag = fc_eff / radar.fc
    range_cell = radar.c / (2 * a_mag * radar.bandwidth)

    d_dx = float(k0 * spk * abs(ref.x_c) / ref.z_c) if ref.z_c > 0 else np.inf
    d_dy = float(k0 * spk * abs(ref.y_c) / ref.z_c) if ref.z_c > 0 else np.inf
    return ErrorBudget(peak_ape, peak_center, residual_rcm, float(range_cell),
                       d_dx, d_dy)

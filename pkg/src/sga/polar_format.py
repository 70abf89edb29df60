"""Polar-to-rectangular reformatting, as two separable 1-D resamplings.

Range pass: per pulse, the spectrum is read at source frequencies

    f_tau = delta_r * ft + fc_eff (delta_r - 1),
    delta_r = 1 / cos(theta)                     (low-resolution mode)
    delta_r = 1 / (cos(theta) cos(phi))          (high-resolution mode),

which turns the y coefficient into (4 pi / c)(fc_ref + ft) for every
pulse.  In high-resolution mode the cos(phi) factor simultaneously
projects the out-of-plane spectral ribbon onto the kz = 0 plane.

Azimuth pass: for each output (tt, ft), slow time is read where

    tan(theta(t)) = fc_ref * Omega * tt / (fc_ref + ft),

yielding the uniform grid kx = (4 pi fc_ref Omega / c) tt,
ky = (4 pi / c)(fc_ref + ft).  The range pass must run first; the azimuth
pass refuses unscaled input.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .preprocess import PhaseHistory
from .resample import interpolate_1d

MODES = ("low_res", "high_res")


@dataclass
class ScalingLaw:
    """Per-pulse range-frequency scaling factors for one mode."""

    mode: str
    delta_r: np.ndarray
    theta: np.ndarray
    phi: np.ndarray


@dataclass
class AzimuthMap:
    """Slow-time read positions of the azimuth pass.

    ``t_src0``, ``theta0``, ``phi0`` are the map and look angles along the
    band-center column (ft = 0), which the range-dependent phase correction
    needs afterwards.
    """

    tt_axis: np.ndarray
    t_src0: np.ndarray
    theta0: np.ndarray
    phi0: np.ndarray
    omega: float


@dataclass
class WavenumberData:
    """Scene spectrum on a uniform rectangular (kx, ky) grid."""

    data: np.ndarray
    kx_axis: np.ndarray
    ky_axis: np.ndarray
    omega: float
    radar: "RadarParams"
    fc_ref: float
    scene_ref: tuple | None
    azimuth_map: AzimuthMap

    @property
    def dkx(self):
        return self.kx_axis[-1] - self.kx_axis[0]

    @property
    def dky(self):
        return self.ky_axis[-1] - self.ky_axis[0]


def scaling_law(mode, theta, phi):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "low_res":
        dr = 1.0 / np.cos(theta)
    else:
        dr = 1.0 / (np.cos(theta) * np.cos(phi))
    return ScalingLaw(mode, dr, np.asarray(theta), np.asarray(phi))


def range_resample(ph, mode, ref_offsets=None, n_out=None):
    """Scale each pulse's range-frequency axis onto a common grid.

    Parameters
    ----------
    ph : PhaseHistory
    mode : 'low_res' or 'high_res'
    ref_offsets : per-pulse plane offset of the scene center (m).  The
        steep scene-offset phase ramp is removed before interpolating and
        restored analytically after; without it the spectrum is far too
        oscillatory for any local kernel.  Zeros are assumed when omitted
        (only sensible for synthetic near-origin data).
    n_out : output bin count, default the input bin count.

    The output band is the intersection of every pulse's reachable band;
    out-of-band sources are never extrapolated.
    """
    law = scaling_law(mode, ph.theta, ph.phi)
    n_p = ph.n_pulses
    n_out = n_out or ph.n_freq
    fc_ref = float(ph.fc_eff[ph.center_index])
    if ref_offsets is None:
        ref_offsets = np.zeros(n_p)
    ref_offsets = np.asarray(ref_offsets, dtype=float)

    scale = 1.0 / law.delta_r        # cos(theta) [cos(phi)]
    src_hi = np.minimum(ph.fr_axis[-1], ph.br_eff / 2)
    src_lo = np.maximum(ph.fr_axis[0], -ph.br_eff / 2)
    ft_hi = np.min(scale * (ph.fc_eff + src_hi) - fc_ref)
    ft_lo = np.max(scale * (ph.fc_eff + src_lo) - fc_ref)
    if ft_hi <= ft_lo:
        raise ValueError("no common range-frequency band across pulses")
    ft = np.linspace(ft_lo, ft_hi, n_out)

    src = (fc_ref + ft[None, :]) / scale[:, None] - ph.fc_eff[:, None]
    dfr = ph.fr_axis[1] - ph.fr_axis[0]
    k4 = 4 * np.pi / ph.radar.c
    deref = np.exp(1j * k4 * (ph.fc_eff[:, None] + ph.fr_axis[None, :])
                   * ref_offsets[:, None])
    rows = interpolate_1d(ph.data * deref, (src - ph.fr_axis[0]) / dfr)
    rows *= np.exp(-1j * k4 * (ph.fc_eff[:, None] + src) * ref_offsets[:, None])

    out = PhaseHistory(rows, ft, ph.t, ph.theta, ph.phi, ph.a,
                       np.full(n_p, fc_ref), np.full(n_p, ft_hi - ft_lo),
                       ph.radar, ph.u_ref, ph.center_index,
                       scene_ref=ph.scene_ref, range_scaled=mode)
    return out


def azimuth_resample(ph_r, omega=None, n_out=None, coverage=0.999):
    """Resample slow time onto the uniform kx grid.

    Requires range-resampled input (the decoupling chain is ordered).  The
    tt grid spans the guaranteed common coverage at both band edges scaled
    by ``coverage``; theta(t) is inverted by monotone cubic interpolation.
    """
    if ph_r.range_scaled is None:
        raise ValueError("azimuth_resample requires range-resampled input")
    theta = ph_r.theta
    dth = np.diff(theta)
    if not (np.all(dth > 0) or np.all(dth < 0)):
        raise ValueError("theta(t) must be strictly monotonic over the aperture")
    t = ph_r.t
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-6 * abs(dt[0]):
        raise ValueError("slow-time axis must be uniform")
    if omega is None:
        c = ph_r.center_index
        omega = (theta[c + 1] - theta[c - 1]) / (t[c + 1] - t[c - 1])
    if omega <= 0:
        raise ValueError("angular rate must be positive")

    fc_ref = float(ph_r.fc_eff[0])
    ft = ph_r.fr_axis
    n_p = ph_r.n_pulses
    n_out = n_out or n_p

    # common tt coverage over the band: tan(theta) limit is tightest at the
    # band edge with the smallest fc_ref + ft
    tan_lo, tan_hi = np.tan(theta[0]), np.tan(theta[-1])
    edges = np.array([ft[0], ft[-1]])
    tt_hi = np.min(tan_hi * (fc_ref + edges) / (fc_ref * omega))
    tt_lo = np.max(tan_lo * (fc_ref + edges) / (fc_ref * omega))
    tt = np.linspace(tt_lo * coverage, tt_hi * coverage, n_out)

    inv = PchipInterpolator(theta, t) if np.all(dth > 0) \
        else PchipInterpolator(theta[::-1], t[::-1])
    t0, dtp = t[0], float(dt[0])

    need = np.arctan(fc_ref * omega * tt[None, :] / (fc_ref + ft[:, None]))
    t_src = inv(need)                       # (n_freq, n_out)
    cols = interpolate_1d(np.ascontiguousarray(ph_r.data.T),
                          (t_src - t0) / dtp)
    data = np.ascontiguousarray(cols.T)

    kx = 4 * np.pi * fc_ref * omega / ph_r.radar.c * tt
    ky = 4 * np.pi / ph_r.radar.c * (fc_ref + ft)
    t_src0 = inv(np.arctan(omega * tt))
    amap = AzimuthMap(tt, t_src0, np.arctan(omega * tt),
                      PchipInterpolator(t, ph_r.phi)(t_src0), float(omega))
    return WavenumberData(data, kx, ky, float(omega), ph_r.radar, fc_ref,
                          ph_r.scene_ref, amap)

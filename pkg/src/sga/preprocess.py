"""Raw echoes to polar-grid phase history.

Four steps: pulse compression, resampling of fast time onto the plane
offset u (tau = (2/c) sqrt(R^2 + R0^2 - R c tau')), the phase correction
that re-references the carrier to the u variable, and a range FFT.  The
result samples the scene's spatial spectrum along the radial wavenumber
k_r = (4 pi / c)(fc_eff + f_r) at the per-pulse look angles (theta, phi).

Orientation convention: the delay-to-offset map is decreasing (its slope
is a = -R/r), which mirrors the spectrum.  The resampler conjugates the
data once so every downstream axis (fc_eff, k_r, kx, ky) stays positive
and phases follow exp(-j k_r u) with u the target plane offset.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .echo import Gate, RadarParams, RawData, reference_pulse
from .geometry import r_from_u, u_from_r
from .resample import KERNEL_TAPS, interpolate_1d

# whitening guard: spectral bins below this fraction of the chirp spectrum
# peak are zeroed instead of inverted
_WHITEN_FLOOR = 1e-3


@dataclass
class CompressedData:
    """Pulse-compressed echoes; fast-time response is the band-limited sinc."""

    data: np.ndarray
    tau_axis: np.ndarray
    pulse_axis: np.ndarray
    radar: RadarParams
    gate: Gate


@dataclass
class UDomainData:
    """Echoes resampled onto a uniform plane-offset axis.

    Per-pulse scale a = -R/r(u_ref) and the effective carrier/bandwidth
    magnitudes fc_eff = |a| fc, br_eff = |a| Br.
    """

    data: np.ndarray
    u_axis: np.ndarray
    t: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    R: np.ndarray
    a: np.ndarray
    fc_eff: np.ndarray
    br_eff: np.ndarray
    radar: RadarParams
    u_ref: float
    center_index: int
    h1_applied: bool = False


@dataclass
class PhaseHistory:
    """Polar-grid samples of the scene spectrum.

    ``data[i, m]`` sits at radial wavenumber (4 pi / c)(fc_eff[i] +
    fr_axis[m]) and look angles (theta[i], phi[i]).  Phases are referenced
    to the Earth center (u = 0).
    """

    data: np.ndarray
    fr_axis: np.ndarray
    t: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    a: np.ndarray
    fc_eff: np.ndarray
    br_eff: np.ndarray
    radar: RadarParams
    u_ref: float
    center_index: int
    scene_ref: tuple | None = None
    range_scaled: str | None = None     # set by polar_format.range_resample

    @property
    def n_pulses(self):
        return self.data.shape[0]

    @property
    def n_freq(self):
        return self.data.shape[1]

    def kr_axis(self, i):
        """Radial wavenumber axis of pulse i (rad/m)."""
        return 4 * np.pi / self.radar.c * (self.fc_eff[i] + self.fr_axis)


def _whitened_filter(radar, nfft):
    """Frequency response of the matched filter equalized over the chirp band.

    Matched filtering with the conjugate chirp spectrum leaves the response
    weighted by |C(f)|^2 (Fresnel ripple and edge droop); dividing the
    in-band response by |C(f)|^2 restores the flat band the sinc model of
    the compressed pulse assumes.  Out-of-band response is zeroed.
    """
    kk, ref = reference_pulse(radar)
    buf = np.zeros(nfft, dtype=np.complex128)
    buf[kk % nfft] = ref
    spec = np.fft.fft(buf)
    f = np.fft.fftfreq(nfft, 1.0 / radar.fs)
    inband = np.abs(f) <= radar.bandwidth / 2
    keep = inband & (np.abs(spec) > _WHITEN_FLOOR * np.abs(spec[inband]).max())
    filt = np.zeros(nfft, dtype=np.complex128)
    filt[keep] = 1.0 / spec[keep]
    filt *= nfft / keep.sum()       # unit target -> unit compressed peak
    return filt


def pulse_compress(raw):
    """Compress each pulse; a target at delay 2r/c peaks at that coordinate."""
    n_fast = raw.data.shape[1]
    half = int(np.floor(raw.radar.pulse * raw.radar.fs / 2))
    nfft = 1 << int(np.ceil(np.log2(n_fast + 2 * (2 * half + 1))))
    filt = _whitened_filter(raw.radar, nfft)
    spec = np.fft.fft(raw.data, nfft, axis=1)
    comp = np.fft.ifft(spec * filt[None, :], axis=1)[:, :n_fast]
    return CompressedData(comp, raw.tau_axis.copy(), raw.pulse_axis.copy(),
                          raw.radar, raw.gate)


def default_u_axis(comp, traj, earth, u_ref, trim_taps=True):
    """Uniform plane-offset grid covering the fully-compressed gate region.

    Spacing maps the fast-time sampling rate through the slope at the scene
    center, c / (2 |a| fs), so the u-domain keeps the original oversampling
    plus headroom for the off-center spectral shift.
    """
    radar = comp.radar
    a_mag = traj.R / r_from_u(u_ref, traj.R, earth)
    du = radar.c / (2 * a_mag.max() * radar.fs)
    tau_lo = comp.tau_axis[0] + radar.pulse / 2
    tau_hi = comp.tau_axis[-1] - radar.pulse / 2
    u_hi = np.min(u_from_r(radar.c * tau_lo / 2, traj.R, earth))
    u_lo = np.max(u_from_r(radar.c * tau_hi / 2, traj.R, earth))
    if trim_taps:
        u_lo += KERNEL_TAPS / 2 * du
        u_hi -= KERNEL_TAPS / 2 * du
    n_u = int(np.floor((u_hi - u_lo) / du))
    if n_u < 16:
        raise ValueError("gate too short to carve a u axis")
    return u_lo + np.arange(n_u) * du


def resample_to_u(comp, traj, earth, u_axis, u_ref):
    """Evaluate the compressed signal on the plane-offset grid.

    Each pulse is interpolated at tau = 2 r(u) / c with r(u) exact from the
    spherical relation, then conjugated (see module docstring).  Requested
    delays outside the gate zero-fill and raise a coverage warning.
    """
    radar = comp.radar
    u_axis = np.asarray(u_axis, dtype=float)
    n_fast = comp.data.shape[1]
    r_ref = r_from_u(u_ref, traj.R, earth)
    a = -traj.R / r_ref
    fc_eff = np.abs(a) * radar.fc
    br_eff = np.abs(a) * radar.bandwidth

    tau_src = 2.0 * r_from_u(u_axis[None, :], traj.R[:, None], earth) / radar.c
    xpos = (tau_src - comp.gate.start) * radar.fs
    oob = np.count_nonzero((xpos < 0) | (xpos > n_fast - 1))
    if oob:
        warnings.warn(f"{oob} u samples map outside the recorded gate (zero-filled)")
    data = np.conj(interpolate_1d(comp.data, xpos))
    return UDomainData(data, u_axis, traj.t.copy(), traj.theta.copy(),
                       traj.phi.copy(), traj.R.copy(), a, fc_eff, br_eff,
                       radar, float(u_ref), traj.center_index)


def apply_h1(ud, traj, earth):
    """Re-reference the carrier phase to the plane offset.

    Multiplies pulse i by exp{-j (4 pi / c)(fc r(u) + fc_eff[i] u)} with
    r(u) exact per bin, leaving a single target with the constant phase
    -(4 pi / c) fc_eff u_target across its response.
    """
    radar = ud.radar
    out = np.empty_like(ud.data)
    k4 = 4 * np.pi / radar.c
    for i in range(ud.data.shape[0]):
        r_u = r_from_u(ud.u_axis, ud.R[i], earth)
        out[i] = ud.data[i] * np.exp(-1j * k4 * (radar.fc * r_u + ud.fc_eff[i] * ud.u_axis))
    res = UDomainData(out, ud.u_axis, ud.t, ud.theta, ud.phi, ud.R, ud.a,
                      ud.fc_eff, ud.br_eff, radar, ud.u_ref, ud.center_index,
                      h1_applied=True)
    return res


def to_phase_history(ud, scene_ref=None):
    """Range FFT per pulse, phases referenced to the Earth center."""
    if not ud.h1_applied:
        warnings.warn("range FFT on data without the H1 phase correction")
    n_u = len(ud.u_axis)
    dtau = 2 * (ud.u_axis[1] - ud.u_axis[0]) / ud.radar.c
    spec = np.fft.fftshift(np.fft.fft(ud.data, axis=1), axes=1) / n_u
    fr = np.fft.fftshift(np.fft.fftfreq(n_u, d=dtau))
    # DFT phases are indexed from the window start; re-reference to u = 0
    spec *= np.exp(-1j * 2 * np.pi * fr * (2 * ud.u_axis[0] / ud.radar.c))[None, :]
    return PhaseHistory(spec, fr, ud.t, ud.theta, ud.phi, ud.a, ud.fc_eff,
                        ud.br_eff, ud.radar, ud.u_ref, ud.center_index,
                        scene_ref=scene_ref)


def validate_phase_history(ph, target, band_fraction=0.8):
    """Compare measured phases against the spectral-slice model
    exp(-j k_r (x cos(phi) sin(theta) + y cos(phi) cos(theta) + z sin(phi))).

    Meaningful for single-target data only.  Returns (rmse, max_abs) in
    radians over the central ``band_fraction`` of each pulse's band.
    """
    p = target.ground.vector if hasattr(target, "ground") else np.asarray(target)
    u_t = (p[0] * np.cos(ph.phi) * np.sin(ph.theta)
           + p[1] * np.cos(ph.phi) * np.cos(ph.theta)
           + p[2] * np.sin(ph.phi))
    band = np.abs(ph.fr_axis) <= band_fraction * ph.br_eff.min() / 2
    devs = []
    for i in range(ph.n_pulses):
        kr = ph.kr_axis(i)[band]
        d = np.angle(ph.data[i, band] * np.exp(1j * kr * u_t[i]))
        devs.append(np.unwrap(d))
    devs = np.array(devs)
    # stitch rows through the band-center track (deviations are small, so
    # this is a no-op in the nominal case but keeps large errors honest)
    mid = devs.shape[1] // 2
    track = np.unwrap(devs[:, mid])
    devs += (track - devs[:, mid])[:, None]
    rmse = float(np.sqrt(np.mean(devs ** 2)))
    return rmse, float(np.abs(devs).max())

"""Raw echo simulation for point targets on the spherical surface.

The demodulated baseband echo of one target at slant range r is the
delayed chirp times the two-way carrier phase,

    s_b(tau - 2 r / c) * exp(-j 4 pi f_c r / c),

summed over targets, pulse by pulse (stop-and-go, no antenna pattern, no
noise, unit two-way gain).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT
from .geometry import slant_ranges


@dataclass(frozen=True)
class RadarParams:
    """Waveform and sampling parameters.

    fc : carrier frequency (Hz)
    bandwidth : transmitted chirp bandwidth (Hz)
    pulse : pulse duration (s)
    fs : fast-time sampling rate (Hz)
    """

    fc: float
    bandwidth: float
    pulse: float
    fs: float
    c: float = C_LIGHT

    def __post_init__(self):
        if self.fs < 1.1 * self.bandwidth:
            raise ValueError("fast-time sampling rate below 1.1x bandwidth")
        if self.pulse * self.bandwidth < 10:
            raise ValueError("time-bandwidth product below 10")
        if self.fc <= self.bandwidth / 2:
            raise ValueError("carrier must exceed half the bandwidth")

    @property
    def chirp_rate(self):
        return self.bandwidth / self.pulse

    @property
    def wavelength(self):
        return self.c / self.fc


@dataclass
class PointTarget:
    """On-surface scatterer with complex reflectivity."""

    ground: "GroundPoint"
    amplitude: complex = 1.0 + 0.0j


@dataclass(frozen=True)
class Gate:
    """Fast-time receive window: start delay (s) and sample count."""

    start: float
    n_samples: int

    def tau_axis(self, fs):
        return self.start + np.arange(self.n_samples) / fs

    @property
    def extent(self):
        return self.n_samples

    def duration(self, fs):
        return self.n_samples / fs


@dataclass
class RawData:
    """Demodulated baseband echoes, pulses x fast-time samples."""

    data: np.ndarray
    tau_axis: np.ndarray
    pulse_axis: np.ndarray
    radar: RadarParams
    gate: Gate
    truncated_pulses: int = 0

    def __post_init__(self):
        if self.data.shape != (len(self.pulse_axis), len(self.tau_axis)):
            raise ValueError("data shape does not match axes")


def baseband_chirp(tau, radar):
    """Linear FM baseband pulse: exp(j pi (B/Tp) tau^2) on |tau| <= Tp/2."""
    tau = np.asarray(tau, dtype=float)
    out = np.zeros(tau.shape, dtype=np.complex128)
    m = np.abs(tau) <= radar.pulse / 2
    out[m] = np.exp(1j * np.pi * radar.chirp_rate * tau[m] ** 2)
    return out if out.ndim else complex(out)


def auto_gate(targets, traj, radar, pad_samples=64, round_to=256):
    """Gate covering every target echo, 2r/c +- Tp/2, plus margin.

    The sample count is rounded up to a multiple of ``round_to`` to keep
    FFT sizes friendly.
    """
    lo = np.inf
    hi = -np.inf
    for tgt in targets:
        r = slant_ranges(tgt.ground, traj)
        lo = min(lo, 2 * r.min() / radar.c)
        hi = max(hi, 2 * r.max() / radar.c)
    start = lo - radar.pulse / 2 - pad_samples / radar.fs
    stop = hi + radar.pulse / 2 + pad_samples / radar.fs
    n = int(np.ceil((stop - start) * radar.fs))
    n = int(np.ceil(n / round_to) * round_to)
    return Gate(start, n)


def reference_pulse(radar):
    """The sampled transmit pulse, symmetric about its center."""
    half = int(np.floor(radar.pulse * radar.fs / 2))
    kk = np.arange(-half, half + 1)
    return kk, baseband_chirp(kk / radar.fs, radar)


def simulate_raw(targets, traj, radar, gate):
    """Superimpose demodulated point-target echoes over all pulses.

    Each target contributes the reference pulse delayed by 2r/c within the
    receiver band (fractional delays are applied spectrally, which is what
    an ideal anti-alias front end records) times the two-way carrier phase.
    Targets are summed in list order per pulse, so the output is identical
    however the pulse loop is executed.  Echo support falling outside the
    gate is truncated and counted in ``truncated_pulses``.
    """
    tau = gate.tau_axis(radar.fs)
    n_p = len(traj)
    half = radar.pulse / 2
    truncated = 0

    kk, ref = reference_pulse(radar)
    nfft = 1 << int(np.ceil(np.log2(gate.n_samples + 2 * len(kk))))
    buf = np.zeros(nfft, dtype=np.complex128)
    buf[kk % nfft] = ref
    ref_spec = np.fft.fft(buf)
    freqs = np.fft.fftfreq(nfft, 1.0 / radar.fs)

    ranges = np.stack([slant_ranges(t.ground, traj) for t in targets]) \
        if targets else np.zeros((0, n_p))
    data = np.zeros((n_p, gate.n_samples), dtype=np.complex128)

    for i in range(n_p):
        clipped = False
        spec = np.zeros(nfft, dtype=np.complex128)
        for ti, tgt in enumerate(targets):
            delay = 2 * ranges[ti, i] / radar.c
            if delay - half < tau[0] - 0.5 / radar.fs \
                    or delay + half > tau[-1] + 0.5 / radar.fs:
                clipped = True
            carrier = np.exp(-4j * np.pi * radar.fc * ranges[ti, i] / radar.c)
            spec += (tgt.amplitude * carrier) * np.exp(
                -2j * np.pi * freqs * (delay - gate.start))
        if targets:
            data[i] = np.fft.ifft(spec * ref_spec)[:gate.n_samples]
        truncated += clipped

    if truncated:
        warnings.warn(f"echo support truncated by the gate on {truncated} pulses")
    return RawData(data, tau, traj.t.copy(), radar, gate, truncated_pulses=truncated)

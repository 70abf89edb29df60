"""Time-domain backprojection oracle and point-target focus metrics.

Backprojection is the exact matched filter to the echo model: for a grid
point p on the sphere, sum over pulses of the compressed sample at delay
2 r / c times exp(+j 4 pi fc r / c).  It shares the interpolation kernel
with the pipeline resamplers and fixes the pulse summation order, so
results are bit-identical at any thread count.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .imaging import ComplexImage
from .resample import _interp_point


@njit(cache=True, parallel=True)
def _bp_grid(comp, positions, xs, ys, zs, tau0, fs, k_fc, c, out, miss):
    n_x = xs.shape[0]
    n_y = ys.shape[0]
    n_p = positions.shape[0]
    n_fast = comp.shape[1]
    for ix in prange(n_x):
        row_miss = 0
        for iy in range(n_y):
            acc = 0.0 + 0.0j
            px, py, pz = xs[ix], ys[iy], zs[ix, iy]
            for i in range(n_p):
                dx = px - positions[i, 0]
                dy = py - positions[i, 1]
                dz = pz - positions[i, 2]
                r = np.sqrt(dx * dx + dy * dy + dz * dz)
                s = (2.0 * r / c - tau0) * fs
                if s < 0.0 or s > n_fast - 1:
                    row_miss += 1
                    continue
                val = _interp_point(comp[i], s)
                ph = k_fc * r
                acc += val * complex(np.cos(ph), np.sin(ph))
            out[ix, iy] = acc
        miss[ix] = row_miss


def backproject(comp, traj, x_axis, y_axis, earth, pad_to_surface=True):
    """Backproject compressed data onto sphere-surface grid points.

    The grid is the same orbit-plane (x, y) raster the Fourier pipeline
    images onto; z = sqrt(R0^2 - x^2 - y^2).  Pulses whose delay falls
    outside the gate contribute zero; the total count is reported in the
    image provenance.
    """
    radar = comp.radar
    xs = np.ascontiguousarray(x_axis, dtype=np.float64)
    ys = np.ascontiguousarray(y_axis, dtype=np.float64)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    d = earth.radius ** 2 - gx ** 2 - gy ** 2
    if np.any(d < 0):
        raise ValueError("grid extends beyond the spherical surface disc")
    zs = np.sqrt(d)
    data = np.ascontiguousarray(comp.data, dtype=np.complex128)
    pos = np.ascontiguousarray(traj.positions, dtype=np.float64)
    out = np.empty((len(xs), len(ys)), dtype=np.complex128)
    miss = np.zeros(len(xs), dtype=np.int64)
    _bp_grid(data, pos, xs, ys, zs, comp.gate.start, radar.fs,
             4 * np.pi * radar.fc / radar.c, radar.c, out, miss)
    return ComplexImage(out, xs.copy(), ys.copy(), 0.0, 0.0,
                        provenance={"method": "backprojection",
                                    "pulses_out_of_gate": int(miss.sum())})


# ---------------------------------------------------------------------------
# metrics

@dataclass
class FocusMetrics:
    """Point-response quality figures from one profile."""

    irw: float                  # -3 dB width, axis units
    pslr: float                 # dB
    islr: float                 # dB
    peak_pos: float             # axis units
    peak_db: float              # dB relative to profile max (0 by definition)
    reliable: bool = True


def extract_profile(img, axis, through, oversample=16, half_width=None):
    """FFT-oversampled 1-D cut through a peak.

    Parameters
    ----------
    img : ComplexImage
    axis : 'range' (cut along y) or 'azimuth' (cut along x)
    through : (x, y) coordinates the cut passes through
    oversample : FFT interpolation factor; 1 returns the raw cut.
    half_width : restrict the cut to +- this many meters around
        ``through`` (keeps neighboring targets out of the statistics).

    Returns (coords, magnitude_db) normalized to the profile peak.
    """
    ix = int(np.argmin(np.abs(img.x_axis - through[0])))
    iy = int(np.argmin(np.abs(img.y_axis - through[1])))
    if ix in (0, len(img.x_axis) - 1) or iy in (0, len(img.y_axis) - 1):
        raise ValueError("peak on the image boundary")
    if axis == "range":
        row = img.data[ix, :]
        coords = img.y_axis
        center = iy
    elif axis == "azimuth":
        row = img.data[:, iy]
        coords = img.x_axis
        center = ix
    else:
        raise ValueError("axis must be 'range' or 'azimuth'")
    if half_width is not None:
        d = coords[1] - coords[0]
        h = max(int(round(half_width / d)), 8)
        lo = max(center - h, 0)
        hi = min(center + h + 1, len(row))
        row = row[lo:hi]
        coords = coords[lo:hi]
    prof = oversampled_magnitude(row, oversample)
    step = (coords[1] - coords[0]) / oversample
    # the resampled center lands on len(prof)//2 whatever the parity
    fine = coords[len(coords) // 2] \
        + step * (np.arange(len(prof)) - len(prof) // 2)
    db = 20 * np.log10(np.maximum(prof / prof.max(), 1e-300))
    return fine, db


def oversampled_magnitude(row, oversample):
    """Magnitude of a complex sequence FFT-interpolated by ``oversample``."""
    row = np.asarray(row, dtype=np.complex128)
    if oversample == 1:
        return np.abs(row)
    n = len(row)
    spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(row)))
    buf = np.zeros(n * oversample, dtype=np.complex128)
    lo = (n * oversample - n) // 2
    buf[lo:lo + n] = spec
    return np.abs(np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(buf)))) * oversample


def measure(coords, profile_db):
    """IRW / PSLR / ISLR of a single-mainlobe profile.

    IRW interpolates the -3 dB crossings; PSLR is the highest peak outside
    the null-to-null mainlobe; ISLR integrates sidelobe against mainlobe
    power.  If no null brackets the mainlobe inside the window the metrics
    are flagged unreliable.
    """
    coords = np.asarray(coords)
    db = np.asarray(profile_db, dtype=float)
    pk = int(np.argmax(db))
    db = db - db[pk]            # metrics are relative to the peak
    p = 10.0 ** (db / 10.0)

    li = _first_null(db, pk, -1)
    ri = _first_null(db, pk, +1)
    reliable = li is not None and ri is not None
    if li is None:
        li = 0
    if ri is None:
        ri = len(db) - 1

    irw = _width_at(coords, p, pk, 0.5)
    main = p[li:ri + 1].sum()
    side = p[:li].sum() + p[ri + 1:].sum()
    pslr = max(db[:li + 1].max() if li > 0 else -np.inf,
               db[ri:].max() if ri < len(db) - 1 else -np.inf)
    islr = 10 * np.log10(side / main) if side > 0 and main > 0 else -np.inf
    return FocusMetrics(irw=irw, pslr=float(pslr), islr=float(islr),
                        peak_pos=float(coords[pk]), peak_db=0.0,
                        reliable=reliable)


def _first_null(db, pk, step):
    i = pk
    n = len(db)
    while 0 < i < n - 1:
        if db[i] < db[i - 1] and db[i] < db[i + 1] and db[i] < db[pk] - 3.0:
            return i
        i += step
    return None


def _width_at(coords, power, pk, level):
    """Width of the lobe around ``pk`` at ``level`` of its power peak."""
    thr = power[pk] * level
    li = pk
    while li > 0 and power[li] > thr:
        li -= 1
    ri = pk
    while ri < len(power) - 1 and power[ri] > thr:
        ri += 1
    if power[li] > thr or power[ri] > thr:
        return float("nan")
    lf = li + (thr - power[li]) / (power[li + 1] - power[li])
    rf = ri - (thr - power[ri]) / (power[ri - 1] - power[ri])
    return float((rf - lf) * (coords[1] - coords[0]))


def interpolated_peak(img, near, half_window=8, oversample=32):
    """Sub-pixel peak location and complex value by local 2-D zero-padding.

    ``near`` gives approximate (x, y); the search window is
    ``half_window`` pixels around it.
    """
    ix = int(np.argmin(np.abs(img.x_axis - near[0])))
    iy = int(np.argmin(np.abs(img.y_axis - near[1])))
    w = half_window
    sub = img.data[max(ix - w, 0):ix + w + 1, max(iy - w, 0):iy + w + 1]
    pk = np.unravel_index(np.argmax(np.abs(sub)), sub.shape)
    ix = max(ix - w, 0) + pk[0]
    iy = max(iy - w, 0) + pk[1]

    # separable FFT oversampling around the integer peak
    row = img.data[ix, :]
    col = img.data[:, iy]
    prow = oversampled_complex(row, oversample)
    pcol = oversampled_complex(col, oversample)
    ny, nx = len(row), len(col)

    def _fine(coordp, n, k):
        # resampled center lands on len//2; map index back to coordinates
        return coordp[n // 2] + (coordp[1] - coordp[0]) / oversample \
            * (k - (n * oversample) // 2)

    def _center_idx(n, i):
        return (n * oversample) // 2 + (i - n // 2) * oversample

    cy = _center_idx(ny, iy)
    cx = _center_idx(nx, ix)
    span = 2 * oversample
    jy = int(np.argmax(np.abs(prow[cy - span:cy + span + 1]))) + cy - span
    jx = int(np.argmax(np.abs(pcol[cx - span:cx + span + 1]))) + cx - span
    x = _fine(img.x_axis, nx, jx)
    y = _fine(img.y_axis, ny, jy)
    # value at the refined location from the two cuts (geometric mean keeps
    # the phase; both pass through (ix, iy))
    val = prow[jy] if np.abs(prow[jy]) >= np.abs(pcol[jx]) else pcol[jx]
    return (float(x), float(y)), complex(val)


def oversampled_complex(row, oversample):
    row = np.asarray(row, dtype=np.complex128)
    n = len(row)
    spec = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(row)))
    buf = np.zeros(n * oversample, dtype=np.complex128)
    lo = (n * oversample - n) // 2
    buf[lo:lo + n] = spec
    return np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(buf))) * oversample

"""Fourier inversion of the rectangular wavenumber data.

The 2-D inverse transform is split into a range pass (ky -> y) and an
azimuth pass (kx -> x) so the range-dependent phase correction can run in
between.  Both passes zero-pad by ``pad_factor`` (default 2) for metric
extraction and shift the image window onto the scene center.  Transforms
use orthonormal scaling, so energy is preserved through each pass.
"""

from dataclasses import dataclass, field

import numpy as np

from .polar_format import WavenumberData


@dataclass
class RangeCompressed:
    """Intermediate (kx, y) matrix between the two compression passes."""

    data: np.ndarray
    kx_axis: np.ndarray
    y_axis: np.ndarray
    dky_support: float
    scene_ref: tuple | None
    azimuth_map: "AzimuthMap"
    fc_ref: float
    radar: "RadarParams"
    pad_factor: int


@dataclass
class ComplexImage:
    """Focused complex image on orbit-plane projection coordinates."""

    data: np.ndarray
    x_axis: np.ndarray
    y_axis: np.ndarray
    dkx_support: float
    dky_support: float
    provenance: dict = field(default_factory=dict)

    @property
    def dx(self):
        return self.x_axis[1] - self.x_axis[0]

    @property
    def dy(self):
        return self.y_axis[1] - self.y_axis[0]


def _pad_ifft(data, axis, pad_factor, dk, center):
    """Centered, zero-padded, orthonormal inverse FFT along one axis."""
    n = data.shape[axis]
    n_pad = int(pad_factor * n)
    shape = list(data.shape)
    shape[axis] = n_pad
    buf = np.zeros(shape, dtype=np.complex128)
    lo = (n_pad - n) // 2
    sl = [slice(None)] * data.ndim
    sl[axis] = slice(lo, lo + n)
    buf[tuple(sl)] = data
    img = np.fft.fftshift(
        np.fft.ifft(np.fft.ifftshift(buf, axes=axis), axis=axis, norm="ortho"),
        axes=axis)
    ax = center + 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(n_pad, d=dk))
    return img, ax


def range_compress(w, pad_factor=2):
    """Inverse transform along ky; output rows live on an absolute y axis."""
    dky = w.ky_axis[1] - w.ky_axis[0]
    y_c = w.scene_ref[1] if w.scene_ref is not None else 0.0
    shifted = w.data * np.exp(1j * w.ky_axis * y_c)[None, :]
    img, y_axis = _pad_ifft(shifted, 1, pad_factor, dky, y_c)
    return RangeCompressed(img, w.kx_axis.copy(), y_axis, w.dky,
                           w.scene_ref, w.azimuth_map, w.fc_ref, w.radar,
                           pad_factor)


def azimuth_compress(rc, pad_factor=None):
    """Inverse transform along kx, completing the image."""
    pad_factor = pad_factor or rc.pad_factor
    dkx = rc.kx_axis[1] - rc.kx_axis[0]
    x_c = rc.scene_ref[0] if rc.scene_ref is not None else 0.0
    shifted = rc.data * np.exp(1j * rc.kx_axis * x_c)[:, None]
    img, x_axis = _pad_ifft(shifted, 0, pad_factor, dkx, x_c)
    dkx_support = rc.kx_axis[-1] - rc.kx_axis[0]
    return ComplexImage(img, x_axis, rc.y_axis.copy(), dkx_support,
                        rc.dky_support)


def form_image(w, pad_factor=2):
    """Both passes with no correction in between."""
    return azimuth_compress(range_compress(w, pad_factor))


def theoretical_psf(dkx, dky, x, y):
    """Separable sinc point spread function for a rectangular support."""
    if dkx <= 0 or dky <= 0:
        raise ValueError("support extents must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sinc(dkx * x / (2 * np.pi)) * np.sinc(dky * y / (2 * np.pi))

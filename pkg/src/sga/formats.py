"""Binary containers, image rendering, and report files.

All four containers share one 64-byte little-endian header:

    magic (4 bytes) | version u32 | n_rows u32 | n_cols u32 | five f64 | 8 pad

followed by the row-major complex payload as interleaved float32 (re, im).
The five doubles and the 8 pad bytes carry per-container fields:

    SGAC  raw echoes          fs, prf, fc, Br, gate_start      pad: pulse len
    SGAP  phase history       fr0, dfr, fc, Br, u_ref          pad: pulse len
          + per-pulse table (t, theta, phi, a, fc_eff, br_eff) as f64 rows
    SGAW  wavenumber grid     kx0, dkx, ky0, dky, omega        pad: fc_ref
    SGAI  complex image       x0, dx, y0, dy, dkx_support      pad: dky_support
"""

import csv
import json
import struct

import numpy as np
from PIL import Image

from .echo import Gate, RadarParams, RawData
from .imaging import ComplexImage
from .preprocess import PhaseHistory

_HEADER = struct.Struct("<4sIII5d")
_VERSION = 1
HEADER_BYTES = 64


def _write_header(fh, magic, n_rows, n_cols, doubles, pad_value=0.0):
    head = _HEADER.pack(magic, _VERSION, n_rows, n_cols, *doubles)
    fh.write(head + struct.pack("<d", pad_value))


def _read_header(fh, expect_magic):
    raw = fh.read(HEADER_BYTES)
    if len(raw) != HEADER_BYTES:
        raise ValueError("truncated header")
    magic, version, n_rows, n_cols, *doubles = _HEADER.unpack(raw[:_HEADER.size])
    if magic != expect_magic:
        raise ValueError(f"bad magic {magic!r}, expected {expect_magic!r}")
    if version != _VERSION:
        raise ValueError(f"unsupported container version {version}")
    (pad_value,) = struct.unpack("<d", raw[_HEADER.size:_HEADER.size + 8])
    return n_rows, n_cols, doubles, pad_value


def _write_payload(fh, data):
    fh.write(np.ascontiguousarray(data, dtype="<c8").tobytes())


def _read_payload(fh, n_rows, n_cols):
    buf = fh.read(8 * n_rows * n_cols)
    return np.frombuffer(buf, dtype="<c8").reshape(n_rows, n_cols).astype(np.complex128)


def write_raw(path, raw):
    prf = 1.0 / (raw.pulse_axis[1] - raw.pulse_axis[0])
    with open(path, "wb") as fh:
        _write_header(fh, b"SGAC", *raw.data.shape,
                      (raw.radar.fs, prf, raw.radar.fc, raw.radar.bandwidth,
                       raw.gate.start), pad_value=raw.radar.pulse)
        _write_payload(fh, raw.data)


def read_raw(path):
    with open(path, "rb") as fh:
        n_p, n_f, (fs, prf, fc, br, gate_start), tp = _read_header(fh, b"SGAC")
        data = _read_payload(fh, n_p, n_f)
    radar = RadarParams(fc=fc, bandwidth=br, pulse=tp, fs=fs)
    gate = Gate(gate_start, n_f)
    t = (np.arange(n_p) - n_p // 2) / prf
    return RawData(data, gate.tau_axis(fs), t, radar, gate)


def write_phase_history(path, ph):
    dfr = ph.fr_axis[1] - ph.fr_axis[0]
    with open(path, "wb") as fh:
        _write_header(fh, b"SGAP", ph.n_pulses, ph.n_freq,
                      (ph.fr_axis[0], dfr, ph.radar.fc, ph.radar.bandwidth,
                       ph.u_ref), pad_value=ph.radar.pulse)
        _write_payload(fh, ph.data)
        table = np.stack([ph.t, ph.theta, ph.phi, ph.a, ph.fc_eff, ph.br_eff], 1)
        fh.write(np.ascontiguousarray(table, dtype="<f8").tobytes())


def read_phase_history(path):
    with open(path, "rb") as fh:
        n_p, n_f, (fr0, dfr, fc, br, u_ref), tp = _read_header(fh, b"SGAP")
        data = _read_payload(fh, n_p, n_f)
        table = np.frombuffer(fh.read(48 * n_p), dtype="<f8").reshape(n_p, 6)
    # fs is not used downstream of preprocessing; reconstruct a valid value
    radar = RadarParams(fc=fc, bandwidth=br, pulse=tp, fs=1.25 * br)
    fr = fr0 + dfr * np.arange(n_f)
    t, theta, phi, a, fc_eff, br_eff = table.T
    center = int(np.argmin(np.abs(t)))
    return PhaseHistory(data, fr, t.copy(), theta.copy(), phi.copy(), a.copy(),
                        fc_eff.copy(), br_eff.copy(), radar, u_ref, center)


def write_wavenumber(path, w):
    with open(path, "wb") as fh:
        _write_header(fh, b"SGAW", *w.data.shape,
                      (w.kx_axis[0], w.kx_axis[1] - w.kx_axis[0],
                       w.ky_axis[0], w.ky_axis[1] - w.ky_axis[0], w.omega),
                      pad_value=w.fc_ref)
        _write_payload(fh, w.data)


def read_wavenumber(path):
    with open(path, "rb") as fh:
        n_kx, n_ky, (kx0, dkx, ky0, dky, omega), fc_ref = _read_header(fh, b"SGAW")
        data = _read_payload(fh, n_kx, n_ky)
    return {"data": data, "kx_axis": kx0 + dkx * np.arange(n_kx),
            "ky_axis": ky0 + dky * np.arange(n_ky), "omega": omega,
            "fc_ref": fc_ref}


def write_image(path, img):
    with open(path, "wb") as fh:
        _write_header(fh, b"SGAI", *img.data.shape,
                      (img.x_axis[0], img.dx, img.y_axis[0], img.dy,
                       img.dkx_support), pad_value=img.dky_support)
        _write_payload(fh, img.data)


def read_image(path):
    with open(path, "rb") as fh:
        n_x, n_y, (x0, dx, y0, dy, dkx), dky = _read_header(fh, b"SGAI")
        data = _read_payload(fh, n_x, n_y)
    return ComplexImage(data, x0 + dx * np.arange(n_x), y0 + dy * np.arange(n_y),
                        dkx, dky)


def write_png(path, img, dynamic_db=40.0):
    """8-bit grayscale magnitude rendering over ``dynamic_db`` of range."""
    mag = np.abs(img.data)
    peak = mag.max()
    if peak == 0:
        level = np.zeros(mag.shape)
    else:
        db = 20 * np.log10(np.maximum(mag / peak, 10 ** (-dynamic_db / 20 - 2)))
        level = np.clip(db / dynamic_db + 1.0, 0.0, 1.0)
    Image.fromarray((level * 255).astype(np.uint8), mode="L").save(path)


METRIC_FIELDS = ["true_x_m", "true_y_m", "peak_x_m", "peak_y_m",
                 "irw_rg_m", "irw_az_m", "pslr_rg_db", "pslr_az_db",
                 "islr_rg_db", "islr_az_db"]


def write_metrics_csv(path, rows):
    """One row per target, fields per METRIC_FIELDS."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=METRIC_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in METRIC_FIELDS})


def write_budget(path_txt, path_json, budget, extra=None):
    d = budget.as_dict()
    if extra:
        d.update(extra)
    with open(path_json, "w") as fh:
        json.dump(d, fh, indent=2, sort_keys=True)
        fh.write("\n")
    lines = ["out-of-plane error budget", "-" * 34]
    lines += [f"{k:28s} {v:.6g}" for k, v in sorted(d.items())]
    with open(path_txt, "w") as fh:
        fh.write("\n".join(lines) + "\n")

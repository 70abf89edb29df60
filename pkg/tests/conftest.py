"""Shared fixtures: small scenarios and cached pipeline products."""

import numpy as np
import pytest

import sga
from sga import pipeline
from sga.scenario import load_scenario


def wide_scenario(n_pulses=128, n_fast=1536, targets=None, name="wide",
                  duration=1.5, **overrides):
    """Planar-orbit wide-geometry scenario, scaled for unit tests."""
    if targets is None:
        targets = [{"dx_m": 0.0, "dy_m": 0.0}]
    cfg = {
        "name": name,
        "radar": {"fc_hz": 1.0e9, "bandwidth_hz": 3.0e7, "pulse_s": 5.0e-6,
                  "sample_rate_hz": 3.75e7},
        "orbit": {"altitude_m": 2.0e6, "duration_s": duration,
                  "prf_hz": n_pulses / duration, "earth_rotation": False},
        "scene": {"reference_range_m": 3.5e6, "targets": targets},
        "processing": {"mode": "sga_low", "n_fast": n_fast},
    }
    cfg.update(overrides)
    return load_scenario(cfg)


def highres_scenario(n_pulses=256, n_fast=1536, targets=None, name="high",
                     duration=8.0, center_latitude_deg=13.4, mode="sga_high"):
    """Rotating-Earth high-resolution scenario, scaled for unit tests."""
    if targets is None:
        targets = [{"dx_m": 0.0, "dy_m": 0.0}]
    return load_scenario({
        "name": name,
        "radar": {"fc_hz": 1.0e10, "bandwidth_hz": 1.5e8, "pulse_s": 2.0e-6,
                  "sample_rate_hz": 1.875e8},
        "orbit": {"altitude_m": 6.0e5, "duration_s": duration,
                  "prf_hz": n_pulses / duration, "earth_rotation": True,
                  "inclination_deg": 90.0,
                  "center_latitude_deg": center_latitude_deg},
        "scene": {"reference_range_m": 7.6e5, "targets": targets},
        "processing": {"mode": mode, "n_fast": n_fast},
    })


@pytest.fixture(scope="session")
def earth():
    return sga.EarthModel()


@pytest.fixture(scope="session")
def wide_single(earth):
    """Simulated single-center-target wide scene plus its focused products."""
    cfg = wide_scenario()
    traj, ref, targets, raw = pipeline.simulate(cfg)
    img, w, ph = pipeline.focus_sga(raw, traj, earth, ref, "sga_low")
    return {"cfg": cfg, "traj": traj, "ref": ref, "targets": targets,
            "raw": raw, "img": img, "w": w, "ph": ph}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0xD1CE)

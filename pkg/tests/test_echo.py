"""Chirp definition and raw echo synthesis."""

import numpy as np
import pytest

import sga
from sga import (EarthModel, Gate, GroundPoint, PointTarget, RadarParams,
                 baseband_chirp, simulate_raw)
from sga.pipeline import simulate
from tests.conftest import wide_scenario

RADAR = RadarParams(fc=1.0e9, bandwidth=3.0e7, pulse=5.0e-6, fs=3.75e7)


def test_chirp_center_and_support():
    assert baseband_chirp(0.0, RADAR) == 1.0 + 0.0j
    eps = 1e-12
    assert baseband_chirp(RADAR.pulse / 2 + eps, RADAR) == 0
    assert baseband_chirp(-RADAR.pulse / 2 - eps, RADAR) == 0
    assert abs(baseband_chirp(RADAR.pulse / 2, RADAR)) == pytest.approx(1.0)


def test_chirp_instantaneous_frequency():
    # phase slope at Tp/4 is Br/4 (rate Br/Tp times tau)
    tau = RADAR.pulse / 4
    h = 1e-10
    dphi = np.angle(baseband_chirp(tau + h, RADAR)
                    * np.conj(baseband_chirp(tau - h, RADAR)))
    f_inst = dphi / (2 * h) / (2 * np.pi)
    assert f_inst == pytest.approx(RADAR.bandwidth / 4, rel=1e-4)


def test_radar_params_invariants():
    with pytest.raises(ValueError):
        RadarParams(fc=1e9, bandwidth=3e7, pulse=5e-6, fs=3.1e7)
    with pytest.raises(ValueError):
        RadarParams(fc=1e9, bandwidth=3e7, pulse=1e-7, fs=3.75e7)
    with pytest.raises(ValueError):
        RadarParams(fc=1e7, bandwidth=3e7, pulse=5e-6, fs=3.75e7)


def _small_setup(targets):
    cfg = wide_scenario(n_pulses=16, n_fast=1024, targets=targets)
    return simulate(cfg)


def test_matched_filter_peak_at_delay():
    from sga.preprocess import pulse_compress
    traj, ref, targets, raw = _small_setup([{"dx_m": 0.0, "dy_m": 200.0}])
    comp = pulse_compress(raw)
    r = sga.slant_ranges(targets[0].ground, traj)
    for i in (0, len(traj) // 2, len(traj) - 1):
        pk = np.argmax(np.abs(comp.data[i]))
        want = (2 * r[i] / raw.radar.c - raw.gate.start) * raw.radar.fs
        assert abs(pk - want) <= 0.5


def test_raw_phase_at_pulse_center_sample():
    # place the echo delay exactly on a sample so the chirp contributes
    # zero phase there; the remaining phase is the two-way carrier term
    traj, ref, targets, raw = _small_setup([{"dx_m": 0.0, "dy_m": 0.0}])
    radar = raw.radar
    r = sga.slant_ranges(targets[0].ground, traj)
    i = len(traj) // 2
    delay = 2 * r[i] / radar.c
    k = round((delay - raw.gate.start) * radar.fs)
    gate = Gate(delay - k / radar.fs, raw.gate.n_samples)
    raw2 = simulate_raw(targets, traj, radar, gate)
    want = -4 * np.pi * radar.fc * r[i] / radar.c
    got = np.angle(raw2.data[i, k])
    assert abs(np.angle(np.exp(1j * (got - want)))) < 1e-3


def test_equal_targets_add_coherently():
    tgt = [{"dx_m": 0.0, "dy_m": 0.0}]
    traj, ref, targets, raw1 = _small_setup(tgt)
    two = [PointTarget(targets[0].ground, 1.0),
           PointTarget(targets[0].ground, 1.0)]
    raw2 = simulate_raw(two, traj, raw1.radar, raw1.gate)
    assert np.allclose(raw2.data, 2 * raw1.data, rtol=1e-12, atol=1e-15)


def test_superposition_and_homogeneity():
    cfg_a = wide_scenario(n_pulses=8, n_fast=1024,
                          targets=[{"dx_m": 0.0, "dy_m": -150.0}])
    cfg_b = wide_scenario(n_pulses=8, n_fast=1024,
                          targets=[{"dx_m": 300.0, "dy_m": 150.0}])
    traj, ref, t_a, raw_a = simulate(cfg_a)
    _, _, t_b, raw_b = simulate(cfg_b)
    both = simulate_raw(t_a + t_b, traj, raw_a.radar, raw_a.gate)
    raw_b2 = simulate_raw(t_b, traj, raw_a.radar, raw_a.gate)
    assert np.allclose(both.data, raw_a.data + raw_b2.data,
                       rtol=1e-10, atol=1e-12)
    scaled = simulate_raw([PointTarget(t_a[0].ground, 2.5j)], traj,
                          raw_a.radar, raw_a.gate)
    one = simulate_raw([PointTarget(t_a[0].ground, 1.0)], traj,
                       raw_a.radar, raw_a.gate)
    assert np.allclose(scaled.data, 2.5j * one.data, rtol=1e-12, atol=1e-14)


def test_per_pulse_energy_equals_pulse_length():
    traj, ref, targets, raw = _small_setup([{"dx_m": 0.0, "dy_m": 0.0}])
    energy = np.sum(np.abs(raw.data) ** 2, axis=1)
    want = raw.radar.pulse * raw.radar.fs
    assert np.all(np.abs(energy - want) < 2.0)
    assert np.max(energy) - np.min(energy) < 1e-4 * want


def test_empty_target_list_gives_zeros():
    cfg = wide_scenario(n_pulses=8, n_fast=1024)
    traj, ref, targets, raw = simulate(cfg)
    out = simulate_raw([], traj, raw.radar, raw.gate)
    assert not out.data.any()


def test_small_gate_warns():
    traj, ref, targets, raw = _small_setup([{"dx_m": 0.0, "dy_m": 0.0}])
    # cut into the echo support itself (it starts ~320 samples into the gate)
    tight = Gate(raw.gate.start + 380 / raw.radar.fs, 512)
    with pytest.warns(UserWarning, match="truncated"):
        simulate_raw(targets, traj, raw.radar, tight)

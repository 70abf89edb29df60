"""Out-of-plane phase error model and the two-step correction."""

import numpy as np
import pytest

import sga
from sga import EarthModel, GroundPoint
from sga.mocomp import (SceneReference, error_budget, first_order_comp,
                        h2_phase, phase_error, second_order_comp)
from sga.pipeline import _fc_eff, evaluate_targets, focus_sga, simulate
from tests.conftest import highres_scenario, wide_scenario

EARTH = EarthModel()


@pytest.fixture(scope="module")
def rotating():
    cfg = highres_scenario(n_pulses=512, n_fast=2048,
                           targets=[{"dx_m": 0.0, "dy_m": 0.0},
                                    {"dx_m": 0.0, "dy_m": 60.0}])
    traj, ref, targets, raw = simulate(cfg)
    return dict(cfg=cfg, traj=traj, ref=ref, targets=targets, raw=raw,
                fc_eff=_fc_eff(traj, ref, EARTH, raw.radar))


def test_phase_error_zero_cases(rotating):
    traj, fce = rotating["traj"], rotating["fc_eff"]
    p_equator = GroundPoint.on_sphere(0.0, EARTH.radius, EARTH)  # z = 0
    err = phase_error(traj.t, np.array([0.0, 1e7]), p_equator, traj, fce)
    assert np.all(err == 0.0)
    # planar trajectory: phi = 0 everywhere
    cfgp = wide_scenario(n_pulses=16, n_fast=1024)
    trajp, refp, targetsp, rawp = simulate(cfgp)
    errp = phase_error(trajp.t, 0.0, targetsp[0].ground, trajp, fce)
    assert np.all(errp == 0.0)


def test_phase_error_exceeds_defocus_threshold(rotating):
    # long-aperture LEO with Earth rotation: scene-center APE is far past pi/2
    traj, ref, fce = rotating["traj"], rotating["ref"], rotating["fc_eff"]
    center = GroundPoint(ref.x_c, ref.y_c, ref.z_c)
    err = phase_error(traj.t, 0.0, center, traj, fce)
    assert np.abs(err).max() > np.pi / 2


def test_h2_exact_conjugate_at_center(rotating):
    # analytic identity, not a tolerance: H2 phase + error phase == 0
    traj, ref, targets, raw = (rotating[k] for k in
                               ("traj", "ref", "targets", "raw"))
    from sga import preprocess
    comp = preprocess.pulse_compress(raw)
    u_ref = float(ref.plane_offsets(traj)[traj.center_index])
    u_axis = preprocess.default_u_axis(comp, traj, EARTH, u_ref)
    ud = preprocess.resample_to_u(comp, traj, EARTH, u_axis, u_ref)
    ph = preprocess.to_phase_history(preprocess.apply_h1(ud, traj, EARTH))
    center = GroundPoint(ref.x_c, ref.y_c, ref.z_c)
    err = phase_error(ph.t, ph.fr_axis, center, traj, ph.fc_eff[0])
    total = err + h2_phase(ph, ref)
    assert np.abs(total).max() < 1e-12
    # with the per-pulse effective carrier matched, the sum is exactly zero
    rows = np.stack([phase_error(ph.t, ph.fr_axis, center, traj, f)[i]
                     for i, f in enumerate(ph.fc_eff)])
    assert np.all(rows + h2_phase(ph, ref) == 0.0)
    # and first_order_comp applies exactly that phase
    ph2 = first_order_comp(ph, ref)
    mask = ph.data != 0
    applied = np.angle(ph2.data[mask] / ph.data[mask])
    want = np.angle(np.exp(1j * h2_phase(ph, ref)[mask]))
    assert np.allclose(np.angle(np.exp(1j * (applied - want))), 0.0, atol=1e-9)


def test_h2_identity_on_planar_data():
    cfg = wide_scenario(n_pulses=16, n_fast=1024)
    traj, ref, targets, raw = simulate(cfg)
    from sga import preprocess
    comp = preprocess.pulse_compress(raw)
    u_ref = float(ref.plane_offsets(traj)[traj.center_index])
    u_axis = preprocess.default_u_axis(comp, traj, EARTH, u_ref)
    ud = preprocess.resample_to_u(comp, traj, EARTH, u_axis, u_ref)
    ph = preprocess.to_phase_history(preprocess.apply_h1(ud, traj, EARTH))
    ph2 = first_order_comp(ph, ref)
    assert np.array_equal(ph2.data, ph.data)


def test_h2_residual_matches_offset_model(rotating):
    # on synthetic single-target data the residual after H2 equals the
    # error model evaluated at the target minus at the center
    traj, ref, fce = rotating["traj"], rotating["ref"], rotating["fc_eff"]
    from sga.preprocess import PhaseHistory
    n_f = 64
    fr = np.linspace(-5e8, 5e8, n_f)
    tgt = GroundPoint.on_sphere(ref.x_c, ref.y_c + 45.0, EARTH)
    kr = 4 * np.pi / 3e8
    radar = rotating["raw"].radar
    kr = 4 * np.pi / radar.c * (fce + fr)
    err_t = phase_error(traj.t, fr, tgt, traj, fce, c=radar.c)
    data = np.exp(1j * err_t)
    ph = PhaseHistory(data, fr, traj.t, traj.theta, traj.phi,
                      np.full(len(traj), -1.0), np.full(len(traj), fce),
                      np.full(len(traj), 1e9), radar, ref.y_c,
                      traj.center_index)
    ph2 = first_order_comp(ph, ref)
    center = GroundPoint(ref.x_c, ref.y_c, ref.z_c)
    want = err_t - phase_error(traj.t, fr, center, traj, fce, c=radar.c)
    got = np.angle(ph2.data)
    assert np.max(np.abs(np.angle(np.exp(1j * (got - want))))) < 1e-10


def test_second_order_identity_rows(rotating):
    traj, ref, targets, raw = (rotating[k] for k in
                               ("traj", "ref", "targets", "raw"))
    from sga import imaging, preprocess
    from sga.polar_format import azimuth_resample, range_resample
    comp = preprocess.pulse_compress(raw)
    u_ref = float(ref.plane_offsets(traj)[traj.center_index])
    u_axis = preprocess.default_u_axis(comp, traj, EARTH, u_ref)
    ud = preprocess.resample_to_u(comp, traj, EARTH, u_axis, u_ref)
    ph = preprocess.to_phase_history(preprocess.apply_h1(ud, traj, EARTH),
                                     scene_ref=ref.xy)
    ph = first_order_comp(ph, ref)
    ph_r = range_resample(ph, "high_res",
                          ref_offsets=ref.plane_offsets(traj, include_z=False))
    w = azimuth_resample(ph_r)
    rc = imaging.range_compress(w)
    rc2 = second_order_comp(rc, ref, EARTH)
    # the y = y_c column is untouched (zero residual at the reference)
    j = int(np.argmin(np.abs(rc.y_axis - ref.y_c)))
    assert np.allclose(rc2.data[:, j], rc.data[:, j], rtol=1e-12, atol=0)
    factor = rc2.data[:, j + 40] / rc.data[:, j + 40]
    assert np.allclose(np.abs(factor), 1.0, rtol=1e-12)
    assert np.abs(np.angle(factor)).max() > 1e-3   # correction does act


def test_second_order_identity_when_planar():
    cfg = wide_scenario(n_pulses=32, n_fast=1024)
    traj, ref, targets, raw = simulate(cfg)
    img, w, ph = focus_sga(raw, traj, EARTH, ref, "sga_low")
    from sga import imaging
    rc = imaging.range_compress(w)
    rc2 = second_order_comp(rc, ref, EARTH)
    assert np.array_equal(rc2.data, rc.data)


def test_budget_broadside_derivatives(rotating):
    traj, ref, fce = rotating["traj"], rotating["ref"], rotating["fc_eff"]
    radar = rotating["raw"].radar
    b = error_budget(120.0, 74.0, ref, traj, radar, fce, EARTH)
    assert b.d_ape_dx == 0.0            # x_c = 0 broadside
    assert b.d_ape_dy > 0.0
    assert b.peak_ape > np.pi / 2
    assert b.residual_rcm < b.range_cell


def test_budget_zero_for_planar():
    cfg = wide_scenario(n_pulses=16, n_fast=1024)
    traj, ref, targets, raw = simulate(cfg)
    fce = _fc_eff(traj, ref, EARTH, raw.radar)
    b = error_budget(1000.0, 1000.0, ref, traj, raw.radar, fce, EARTH)
    assert b.peak_ape == 0.0
    assert b.peak_ape_center == 0.0
    assert b.residual_rcm == 0.0
    assert b.d_ape_dx == 0.0 and b.d_ape_dy == 0.0


def test_monotone_improvement_with_corrections(rotating):
    traj, ref, targets, raw = (rotating[k] for k in
                               ("traj", "ref", "targets", "raw"))
    irw = {}
    pslr = {}
    for steps in ("none", "h2", "h2h3"):
        img, w, ph = focus_sga(raw, traj, EARTH, ref, "sga_high",
                               mocomp_steps=steps)
        rows = evaluate_targets(img, targets)
        irw[steps] = [r["irw_az_m"] for r in rows]
        pslr[steps] = [r["pslr_az_db"] for r in rows]
    # offset target: strictly better focus at each step
    assert irw["none"][1] > 1.5 * irw["h2"][1]
    assert irw["h2"][1] >= irw["h2h3"][1] * 0.999
    assert pslr["h2h3"][1] < pslr["h2"][1] + 0.1
    assert pslr["h2h3"][1] == pytest.approx(-13.26, abs=1.0)

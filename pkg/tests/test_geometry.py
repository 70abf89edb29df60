"""Frames, spherical relations, and orbit generation."""

import numpy as np
import pytest

from sga import (EarthModel, GroundPoint, build_imaging_frame, generate_orbit,
                 r_from_u, slant_range, slant_ranges, surface_height, u_from_r)
from sga.geometry import load_trajectory_file

EARTH = EarthModel()
R0 = EARTH.radius


def test_frame_center_moves_to_y_axis():
    # center at +Z with velocity along +X ends up on +Y with theta = phi = 0
    t = np.array([-1.0, 0.0, 1.0])
    pos = np.array([[-10.0, 0, 7.371e6], [0, 0, 7.371e6], [10.0, 0, 7.371e6]])
    traj = build_imaging_frame(t, pos, 1)
    assert np.allclose(traj.positions[1], [0, 7.371e6, 0], atol=1e-6)
    assert abs(traj.theta[1]) < 1e-12
    assert abs(traj.phi[1]) < 1e-12


def test_frame_identity_when_already_conventional():
    rs = 7.0e6
    th = np.linspace(-1e-3, 1e-3, 5)
    pos = np.stack([rs * np.sin(th), rs * np.cos(th), np.zeros(5)], 1)
    t = np.linspace(-1, 1, 5)
    traj = build_imaging_frame(t, pos, 2)
    assert np.allclose(traj.positions, pos, rtol=1e-12, atol=1e-6)


def test_frame_circular_arc_angles_match_rate():
    # three samples of a circular orbit: neighbor thetas are +-omega*dt
    rs = R0 + 6.0e5
    omega = np.sqrt(3.986004418e14 / rs ** 3)
    dt = 0.5
    ang = omega * dt * np.array([-1, 0, 1])
    pos = np.stack([rs * np.cos(ang), rs * np.sin(ang), np.zeros(3)], 1)
    traj = build_imaging_frame(dt * np.array([-1.0, 0, 1]), pos, 1)
    assert abs(traj.theta[1]) < 1e-12
    assert traj.theta[2] == pytest.approx(omega * dt, rel=1e-6)
    assert traj.theta[0] == pytest.approx(-omega * dt, rel=1e-6)


def test_frame_degenerate_velocity_rejected():
    t = np.array([0.0, 1.0])
    pos = np.array([[0, 7e6, 0], [0, 7.1e6, 0]])  # radial motion
    with pytest.raises(ValueError):
        build_imaging_frame(t, pos, 0)


def test_slant_range_nadir():
    traj = build_imaging_frame(
        np.array([-1.0, 0, 1]),
        np.array([[-10.0, 7.371e6, 0], [0, 7.371e6, 0], [10.0, 7.371e6, 0]]), 1)
    p = GroundPoint(0.0, 6.371e6, 0.0)
    assert slant_range(p, traj.state(1)) == pytest.approx(1.0e6, rel=1e-12)


def test_slant_range_reference_geometry():
    # wide-swath geometry: 2000 km altitude, 3500 km reference slant range
    R = R0 + 2.0e6
    u = u_from_r(3.5e6, R, EARTH)
    p = GroundPoint.on_sphere(0.0, u, EARTH)
    s_pos = np.array([0.0, R, 0.0])
    assert slant_range(p, s_pos) == pytest.approx(3.5e6, rel=1e-12)


def test_slant_range_matches_independent_expression(rng):
    for _ in range(50):
        p = rng.uniform(-1e6, 1e6, 3)
        s = rng.uniform(6.5e6, 8.5e6, 3)
        direct = np.sqrt(((p - s) ** 2).sum())
        assert slant_range(p, s) == pytest.approx(direct, rel=1e-14)


def test_u_from_r_identities():
    R = 7.371e6
    assert u_from_r(R - R0, R, EARTH) == pytest.approx(R0, rel=1e-9)
    # direct evaluation with the wide-swath numbers
    assert u_from_r(3.5e6, 8.371e6, EARTH) == pytest.approx(5878227.332457293,
                                                            rel=1e-12)


def test_u_r_round_trip(rng):
    R = 8.371e6
    u_lo = u_from_r(R + R0 - 1.0, R, EARTH)   # deep edge of valid band
    u = rng.uniform(u_lo, R0, 1000)
    back = u_from_r(r_from_u(u, R, EARTH), R, EARTH)
    assert np.max(np.abs(back - u) / u) < 1e-12


def test_r_from_u_rejects_unreachable():
    with pytest.raises(ValueError):
        r_from_u(1.2 * (8.371e6 ** 2 + R0 ** 2) / (2 * 8.371e6), 8.371e6, EARTH)


def test_surface_height():
    assert surface_height(0.0, R0, EARTH) == 0.0
    assert surface_height(0.0, 0.0, EARTH) == R0
    z = surface_height(1e5, 6.3e6, EARTH)
    assert 1e5 ** 2 + 6.3e6 ** 2 + z ** 2 == pytest.approx(R0 ** 2, rel=1e-14)
    with pytest.raises(ValueError):
        surface_height(R0, R0, EARTH)


def test_generate_orbit_planar_without_rotation():
    t, pos = generate_orbit(6.0e5, 10.0, 10.0, EARTH, earth_rotation=False)
    # best-fit plane normal via SVD of centered positions
    _, _, vt = np.linalg.svd(pos - pos.mean(0))
    n = vt[-1]
    assert np.max(np.abs(pos @ n)) < 1e-3
    assert np.max(np.abs(np.linalg.norm(pos, axis=1) - (R0 + 6.0e5))) < 1e-6


def test_generate_orbit_rotation_bends_out_of_plane():
    t, pos = generate_orbit(6.0e5, 15.0, 20.0, EARTH, earth_rotation=True,
                            center_latitude=np.deg2rad(45.0))
    traj = build_imaging_frame(t, pos, len(t) // 2)
    assert not traj.planar
    z = np.abs(traj.positions[:, 2])
    c = traj.center_index
    assert z[c] < 1e-6
    # excursion grows roughly quadratically away from the center
    assert z[0] > 3.5 * z[c // 2] > 0
    assert z[-1] > 3.5 * z[c + c // 2] > 0


def test_generate_orbit_sample_spacing():
    t, pos = generate_orbit(6.0e5, 2.0, 32.0, EARTH)
    assert len(t) == 64
    assert t[len(t) // 2] == 0.0
    assert np.allclose(np.diff(t), 1 / 32.0)


def test_spherical_cartesian_round_trip():
    t, pos = generate_orbit(2.0e6, 5.0, 12.8, EARTH, earth_rotation=True,
                            center_latitude=0.3)
    traj = build_imaging_frame(t, pos, len(t) // 2)
    rebuilt = np.stack([
        traj.R * np.cos(traj.phi) * np.sin(traj.theta),
        traj.R * np.cos(traj.phi) * np.cos(traj.theta),
        traj.R * np.sin(traj.phi)], 1)
    err = np.linalg.norm(rebuilt - traj.positions, axis=1) / traj.R
    assert err.max() < 1e-9


def test_law_of_cosines_consistency(rng):
    # on-surface points in the constant-offset plane have slant range r(u)
    t, pos = generate_orbit(2.0e6, 3.0, 21.0, EARTH, earth_rotation=True,
                            center_latitude=0.5)
    traj = build_imaging_frame(t, pos, len(t) // 2)
    for _ in range(20):
        i = rng.integers(0, len(traj))
        s = traj.state(i)
        u = rng.uniform(5.0e6, 6.2e6)
        rho = np.sqrt(R0 ** 2 - u ** 2)
        shat = s.position / s.R
        e1 = np.cross(shat, [0.0, 0.0, 1.0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(shat, e1)
        psi = rng.uniform(0, 2 * np.pi)
        p = u * shat + rho * (np.cos(psi) * e1 + np.sin(psi) * e2)
        assert np.linalg.norm(p) == pytest.approx(R0, rel=1e-12)
        assert slant_range(p, s) == pytest.approx(
            float(r_from_u(u, s.R, EARTH)), rel=1e-6)


def test_frame_rotation_preserves_ranges(rng):
    t, pos = generate_orbit(2.0e6, 3.0, 21.0, EARTH, earth_rotation=True,
                            center_latitude=0.4)
    traj = build_imaging_frame(t, pos, len(t) // 2)
    # pick a fixed point defined relative to the ECEF trajectory, rotate it
    # with the same frame, and compare distances
    p_ecef = pos[len(t) // 2] * (R0 / np.linalg.norm(pos[len(t) // 2]))
    d_before = np.linalg.norm(pos - p_ecef, axis=1)
    # recover the rotation (about the origin) by orthogonal procrustes
    u, _, vt = np.linalg.svd(pos.T @ traj.positions)
    rot = u @ vt
    p_frame = p_ecef @ rot
    d_after = np.linalg.norm(traj.positions - p_frame, axis=1)
    assert np.max(np.abs(d_after - d_before) / d_before) < 1e-9
    # sample-to-sample distances are rigid-motion invariants too
    dd_a = np.linalg.norm(pos[1:] - pos[:-1], axis=1)
    dd_b = np.linalg.norm(traj.positions[1:] - traj.positions[:-1], axis=1)
    assert np.max(np.abs(dd_a - dd_b) / dd_a) < 1e-9


def test_trajectory_file_round_trip(tmp_path):
    path = tmp_path / "traj.txt"
    path.write_text(
        "# demo trajectory\n"
        "0.0 7000000.0 0.0 100.0\n"
        "0.5 7000010.0 50.0 100.0\n"
        "# trailing comment\n"
        "1.0 7000020.0 100.0 100.0\n")
    t, pos = load_trajectory_file(path)
    assert t.tolist() == [0.0, 0.5, 1.0]
    assert pos.shape == (3, 3)
    assert pos[1, 1] == 50.0
    bad = tmp_path / "bad.txt"
    bad.write_text("0.0 1 2\n1.0 3 4\n")
    with pytest.raises(ValueError):
        load_trajectory_file(bad)

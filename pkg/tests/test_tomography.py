import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from echotomo.channels import build_channel, build_cnot_echo
from echotomo.gates import RngStream, haar_su2, rx
from echotomo.linalg import density_from_bloch, density_from_statevector, random_density_matrix
from echotomo.noise import KrausSet, amplitude_damping_kraus, apply_kraus, depolarizing_kraus, thermal_relaxation_kraus
from echotomo.tomography import (DEFAULT_REPS, DEFAULT_SHOTS, INPUT_BLOCH, INPUT_STATES, STATE_LABELS,
                                 AffineMap, ellipsoid_report, fidelity, forward_bloch,
                                 reconstruct_affine, run_tomography)


def _random_map(rng):
    u, _, vt = np.linalg.svd(rng.normal(size=(3, 3)))
    s = np.sort(rng.uniform(0, 1, 3))[::-1]
    return AffineMap(u @ np.diag(s) @ vt, rng.normal(size=3) * 0.1)


def _rotation_x(t):
    return np.array([[1, 0, 0], [0, math.cos(t), -math.sin(t)], [0, math.sin(t), math.cos(t)]])


def test_reconstruct_examples():
    ident = reconstruct_affine(INPUT_BLOCH)
    assert np.array_equal(ident.m, np.eye(3)) and np.array_equal(ident.c, np.zeros(3))
    zero = reconstruct_affine({s: np.zeros(3) for s in STATE_LABELS})
    assert np.array_equal(zero.m, np.zeros((3, 3))) and np.array_equal(zero.c, np.zeros(3))


def test_reconstruct_inverts_forward_map(rng):
    for _ in range(200):
        amap = _random_map(rng)
        back = reconstruct_affine(forward_bloch(amap))
        assert np.max(np.abs(back.parameters() - amap.parameters())) < 1e-12


def test_affine_map_is_read_only():
    amap = AffineMap.identity()
    assert AffineMap.n_params == len(amap.parameters()) == 12
    with pytest.raises(ValueError):
        amap.m[0, 0] = 2.0


def test_defaults():
    assert DEFAULT_SHOTS == 8192 and DEFAULT_REPS == 25
    res = run_tomography(build_cnot_echo(0), rng=RngStream(0))
    assert res.shots == 8192 and res.n_reps == 25 and res.samples.shape == (25, 4, 3)


def test_identity_channel_exact():
    res = run_tomography(build_cnot_echo(0), shots=None, n_reps=1)
    assert np.max(np.abs(res.map.m - np.eye(3))) < 1e-15 and np.max(np.abs(res.map.c)) < 1e-15
    assert all(abs(f - 1) < 1e-15 for f in res.fidelities.values())
    assert np.isnan(res.m_stderr).all()


@pytest.mark.parametrize("gamma", [0.0, 0.1, 0.5, 1.0])
def test_amplitude_damping_map(gamma):
    res = run_tomography(amplitude_damping_kraus(gamma), shots=None, n_reps=1)
    m = np.diag([math.sqrt(1 - gamma), math.sqrt(1 - gamma), 1 - gamma])
    assert np.max(np.abs(res.map.m - m)) < 1e-10
    assert np.max(np.abs(res.map.c - [0, 0, gamma])) < 1e-10


def test_kraus_channel_matches_bloch_propagation(rng):
    channels = [thermal_relaxation_kraus(80e-6, 50e-6, 10e-6), depolarizing_kraus(0.2),
                KrausSet((haar_su2(rng),)),
                amplitude_damping_kraus(0.3).compose(KrausSet((rx(0.4),)))]
    for k in channels:
        amap = run_tomography(k, shots=None, n_reps=1).map
        for _ in range(20):
            r = rng.normal(size=3)
            r *= rng.uniform() / np.linalg.norm(r)
            out = apply_kraus(density_from_bloch(r), k)
            expect = [2 * out[0, 1].real, -2 * out[0, 1].imag, (out[0, 0] - out[1, 1]).real]
            assert np.max(np.abs(amap.apply(r) - expect)) < 1e-10


def test_two_qubit_kraus_channel_acts_on_qubit0():
    k = depolarizing_kraus(0.3, 2)
    res = run_tomography(k, shots=None, n_reps=1)
    assert np.allclose(res.map.m, 0.7 * np.eye(3), atol=1e-12)


def test_fidelity_examples():
    for s in STATE_LABELS:
        r = INPUT_BLOCH[s]
        assert fidelity(s, r) == 1
        assert fidelity(s, np.zeros(3)) == 0.5
        assert fidelity(s, -r) == 0
    assert fidelity("0", [0, 0, 1.02]) == 1
    assert fidelity("0", [0, 0, 1.02], clamp=False) == pytest.approx(1.01)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(STATE_LABELS), st.integers(0, 2**32 - 1))
def test_fidelity_matches_density_overlap(label, seed):
    gen = np.random.default_rng(seed)
    rho = random_density_matrix(gen, 2)
    r = [2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real]
    psi = INPUT_STATES[label]
    direct = float(np.real(psi.conj() @ rho @ psi))
    assert abs(fidelity(label, r) - direct) < 1e-12


def test_ellipsoid_examples():
    sphere = ellipsoid_report(AffineMap.identity())
    assert sphere.degenerate and sphere.tilt_deg == 0
    assert np.allclose(sphere.semi_axes, 1)
    diag = ellipsoid_report(AffineMap(np.diag([0.5, 0.5, 0.9]), np.zeros(3)))
    assert not diag.degenerate and diag.tilt_deg == 0
    assert np.allclose(np.abs(diag.principal_axes[0]), [0, 0, 1])
    tilted = ellipsoid_report(AffineMap(_rotation_x(0.3) @ np.diag([0.5, 0.5, 0.9]), [0.1, 0, 0]))
    assert tilted.tilt_deg == pytest.approx(17.188733853924695, abs=1e-9)
    assert np.allclose(tilted.semi_axes, [0.9, 0.5, 0.5])
    assert np.allclose(tilted.center, [0.1, 0, 0])


def test_diagonal_z_major_has_zero_tilt(rng):
    for _ in range(100):
        a, b = rng.uniform(0, 0.8, 2)
        rep = ellipsoid_report(AffineMap(np.diag([a, b, rng.uniform(0.81, 1)]), np.zeros(3)))
        assert rep.tilt_deg == 0.0


def test_ellipsoid_invariants(rng):
    for _ in range(200):
        rep = ellipsoid_report(_random_map(rng))
        assert np.all(np.diff(rep.semi_axes) <= 0)
        assert np.max(np.abs(rep.principal_axes @ rep.principal_axes.T - np.eye(3))) < 1e-10
        assert 0 <= rep.tilt_deg <= 90


def test_physical_maps_contract(example_noise):
    for kind in ("cnot", "random", "twirl-u"):
        for n in (1, 4):
            amap = run_tomography(build_channel(kind, n, RngStream(n)), example_noise, shots=None, n_reps=1).map
            assert np.linalg.svd(amap.m, compute_uv=False).max() <= 1 + 1e-9
            for r in np.random.default_rng(n).normal(size=(200, 3)):
                r /= np.linalg.norm(r)
                assert np.linalg.norm(amap.apply(r)) <= 1 + 1e-9


def test_sampled_mode_stderr_and_determinism(example_noise):
    c = build_cnot_echo(3)
    a = run_tomography(c, example_noise, shots=2000, n_reps=6, rng=RngStream(11))
    b = run_tomography(c, example_noise, shots=2000, n_reps=6, rng=RngStream(11))
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.map.m, b.map.m)
    expect = a.samples.std(axis=0, ddof=1) / math.sqrt(6)
    assert np.allclose(a.bloch_stderr["x"], expect[2])
    assert np.all(a.m_stderr > 0) and np.all(a.c_stderr > 0)


def test_callable_channel_draws_fresh_circuits(example_noise):
    res = run_tomography(lambda r: build_channel("random", 1, r), example_noise,
                         shots=None, n_reps=4, rng=RngStream(2))
    assert not np.array_equal(res.samples[0], res.samples[1])


def test_n_reps_validation():
    with pytest.raises(ValueError):
        run_tomography(build_cnot_echo(1), n_reps=0)


def test_input_states_match_bloch():
    for s in STATE_LABELS:
        rho = density_from_statevector(INPUT_STATES[s])
        assert np.allclose(rho, density_from_bloch(INPUT_BLOCH[s]))

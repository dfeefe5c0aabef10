import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from echotomo.gates import PAULI_X, haar_u4, rx
from echotomo.linalg import (I2, I4, bloch_from_density, density_from_statevector, is_density_matrix,
                             random_density_matrix)
from echotomo.noise import (AttachMode, CoherentError, KrausSet, NoiseModel, NoiseModelError,
                            amplitude_damping_kraus, apply_kraus, coherent_error_unitary,
                            depolarizing_kraus, example_noise_model_path, load_noise_model,
                            noise_model_from_dict, noise_model_to_dict, readout_confusion,
                            save_noise_model, thermal_relaxation_kraus)

RHO0 = np.diag([1, 0]).astype(complex)
RHO1 = np.diag([0, 1]).astype(complex)


def _complete(k: KrausSet):
    return np.max(np.abs(sum(op.conj().T @ op for op in k) - np.eye(k.dim)))


def test_thermal_zero_duration_is_identity():
    k = thermal_relaxation_kraus(100e-6, 80e-6, 0.0)
    assert len(k) == 1 and np.allclose(k.operators[0], I2)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1e-3), st.floats(0.01, 2.0), st.floats(0, 1e-3))
def test_thermal_fixed_point_and_cpt(t1, ratio, duration):
    t2 = ratio * t1
    k = thermal_relaxation_kraus(t1, t2, duration)
    assert _complete(k) < 1e-10
    assert np.max(np.abs(apply_kraus(RHO0, k) - RHO0)) < 1e-12


def test_thermal_decay_of_excited_state():
    t1 = t2 = 100e-6
    d = 300e-9
    gamma = 1 - math.exp(-0.003)
    out = apply_kraus(RHO1, thermal_relaxation_kraus(t1, t2, d))
    # closed form amplitude damping: populations (gamma, 1 - gamma)
    assert abs(bloch_from_density(out)[2] - (-1 + 2 * gamma)) < 1e-14


def test_thermal_coherence_decays_at_t2():
    t1, t2, d = 100e-6, 60e-6, 5e-6
    plus = density_from_statevector(np.array([1, 1]) / np.sqrt(2))
    out = apply_kraus(plus, thermal_relaxation_kraus(t1, t2, d))
    assert abs(bloch_from_density(out)[0] - math.exp(-d / t2)) < 1e-14


def test_thermal_rejects_unphysical():
    with pytest.raises(ValueError):
        thermal_relaxation_kraus(10e-6, 25e-6, 1e-6)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-6, 1e-3), st.floats(0.05, 2.0), st.floats(0, 5e-5), st.floats(0, 5e-5))
def test_thermal_semigroup(t1, ratio, d1, d2):
    t2 = ratio * t1
    rho = random_density_matrix(np.random.default_rng(int(d1 * 1e9) % 1000))
    two = apply_kraus(apply_kraus(rho, thermal_relaxation_kraus(t1, t2, d1)), thermal_relaxation_kraus(t1, t2, d2))
    one = apply_kraus(rho, thermal_relaxation_kraus(t1, t2, d1 + d2))
    assert np.max(np.abs(one - two)) < 1e-10


def test_amplitude_damping_full_decay():
    assert np.allclose(apply_kraus(RHO1, amplitude_damping_kraus(1.0)), RHO0)


@pytest.mark.parametrize("n", [1, 2])
def test_depolarizing_limits(n, rng):
    dim = 2 ** n
    rho = random_density_matrix(rng, dim)
    assert np.allclose(apply_kraus(rho, depolarizing_kraus(0.0, n)), rho, atol=1e-15)
    assert np.allclose(apply_kraus(rho, depolarizing_kraus(1.0, n)), np.eye(dim) / dim, atol=1e-15)
    k = depolarizing_kraus(0.3, n)
    assert _complete(k) < 1e-12
    assert np.max(np.abs(apply_kraus(np.eye(dim) / dim, k) - np.eye(dim) / dim)) < 1e-15
    direct = 0.7 * rho + 0.3 * np.eye(dim) / dim
    assert np.allclose(apply_kraus(rho, k), direct, atol=1e-14)


def test_depolarizing_bloch_contraction():
    out = apply_kraus(RHO0, depolarizing_kraus(0.01, 1))
    assert abs(bloch_from_density(out)[2] - 0.99) < 1e-14


def test_depolarizing_rejects_bad_probability():
    with pytest.raises(ValueError):
        depolarizing_kraus(1.5)


def test_apply_kraus_identity_and_mismatch(rng):
    rho = random_density_matrix(rng, 4)
    assert np.allclose(apply_kraus(rho, KrausSet((I4,))), rho)
    with pytest.raises(ValueError):
        apply_kraus(rho, KrausSet((I2,)))


def test_kraus_set_checks_completeness():
    with pytest.raises(ValueError):
        KrausSet((0.5 * I2,))


def test_apply_kraus_trace_and_hermiticity_random(rng):
    for _ in range(1000):
        rho = random_density_matrix(rng, 4)
        u = haar_u4(rng)
        k = KrausSet((np.sqrt(0.6) * u, np.sqrt(0.4) * I4)).compose(depolarizing_kraus(0.05, 2))
        out = apply_kraus(rho, k)
        assert abs(np.trace(out) - 1) < 1e-12
        assert np.max(np.abs(out - out.conj().T)) < 1e-12
        assert is_density_matrix(out)


def test_coherent_error_unitary():
    assert np.allclose(coherent_error_unitary(CoherentError(0.0, (0, 0, 1))), I2)
    u = coherent_error_unitary(CoherentError(np.pi, (1, 0, 0)))
    assert np.allclose(u, -1j * PAULI_X)
    # Rodrigues: rotating z-hat by 0.1 about x-hat gives (0, -sin 0.1, cos 0.1)
    out = apply_kraus(RHO0, KrausSet((coherent_error_unitary(CoherentError(0.1, (1, 0, 0))),)))
    assert np.allclose(bloch_from_density(out), [0, -math.sin(0.1), math.cos(0.1)], atol=1e-14)
    assert np.allclose(coherent_error_unitary(CoherentError(0.1, (1, 0, 0))), rx(0.1))


def test_coherent_error_validation():
    with pytest.raises(NoiseModelError):
        CoherentError(0.1, (1, 1, 0))
    with pytest.raises(NoiseModelError):
        CoherentError(-0.1, (1, 0, 0))


def test_readout_confusion():
    assert np.allclose(readout_confusion([0.3, 0.7], 0, 0), [0.3, 0.7])
    assert np.allclose(readout_confusion([1, 0], 0.5, 0.5), [0.5, 0.5])
    assert np.allclose(readout_confusion([0.2, 0.8], 0.5, 0.5), [0.5, 0.5])
    assert np.allclose(readout_confusion([1, 0], 0.02, 0.0), [0.98, 0.02])
    two = readout_confusion([1, 0, 0, 0], [0.02, 0.1], [0, 0])
    assert np.allclose(two, [0.98 * 0.9, 0.98 * 0.1, 0.02 * 0.9, 0.02 * 0.1])
    assert abs(two.sum() - 1) < 1e-15
    with pytest.raises(ValueError):
        readout_confusion([0.5, 0.6], 0, 0)


def test_noise_model_invariants():
    with pytest.raises(NoiseModelError) as err:
        NoiseModel(t1=10e-6, t2=30e-6)
    assert err.value.field == "t2"
    with pytest.raises(NoiseModelError):
        NoiseModel(t1=10e-6, t2=10e-6, depol_2q=1.2)
    with pytest.raises(NoiseModelError):
        NoiseModel(t1=10e-6, t2=10e-6, readout_p01=(0.1, -0.1))


def test_load_minimal_defaults(tmp_path):
    path = tmp_path / "min.json"
    path.write_text(json.dumps({"t1_us": [100, 90], "t2_us": 80}))
    m = load_noise_model(path)
    assert m.t1 == (100e-6, 90e-6) and m.t2 == (80e-6, 80e-6)
    assert m.gate_time_1q == 35e-9 and m.gate_time_2q == 300e-9
    assert m.depol_1q == m.depol_2q == 0 and m.coherent_error is None


def test_load_rejects_t2_above_twice_t1(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"t1_us": [10, 10], "t2_us": [30, 10]}))
    with pytest.raises(NoiseModelError, match="T2 <= 2\\*T1") as err:
        load_noise_model(path)
    assert err.value.field == "t2"


@pytest.mark.parametrize("doc,field", [
    ("{not json", "<file>"),
    ('{"t1_us": [1, 1]}', "t2_us"),
    ('{"t1_us": 1, "t2_us": 1, "bogus": 3}', "bogus"),
    ('{"t1_us": 1, "t2_us": 1, "depol_1q": "lots"}', "depol_1q"),
    ('{"t1_us": 1, "t2_us": 1, "coherent_error": {"attach": "sideways"}}', "coherent_error.attach"),
    ('{"t1_us": [1, 2, 3], "t2_us": 1}', "t1"),
])
def test_load_reports_field(tmp_path, doc, field):
    path = tmp_path / "cfg.json"
    path.write_text(doc)
    with pytest.raises(NoiseModelError) as err:
        load_noise_model(path)
    assert err.value.field == field


def test_full_config_round_trip(tmp_path):
    full = {
        "t1_us": [123.4, 98.7], "t2_us": [56.7, 87.6],
        "gate_time_1q_ns": 35.5, "gate_time_2q_ns": 312.0,
        "depol_1q": 3e-4, "depol_2q": 9e-3,
        "readout_p01": [0.011, 0.013], "readout_p10": [0.021, 0.019],
        "coherent_error": {"epsilon_rad": 0.05, "axis": [0.6, 0.0, 0.8], "attach": "control"},
        "virtual_rz": False,
    }
    src = tmp_path / "full.json"
    src.write_text(json.dumps(full))
    model = load_noise_model(src)
    assert model.coherent_error.attach is AttachMode.AFTER_CNOT_CONTROL
    out = tmp_path / "again.json"
    save_noise_model(model, out)
    assert load_noise_model(out) == model
    assert noise_model_to_dict(model) == full
    assert noise_model_from_dict(noise_model_to_dict(model)) == model


def test_example_config_loads():
    m = load_noise_model(example_noise_model_path())
    assert all(t2 <= 2 * t1 for t1, t2 in zip(m.t1, m.t2))
    assert m.coherent_error is None

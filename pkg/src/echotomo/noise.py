"""Noise channels, coherent-error injection and noise-model configuration."""

from __future__ import annotations

import enum
import itertools
import json
import math
import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .gates import DEFAULT_GATE_TIME_1Q, DEFAULT_GATE_TIME_2Q, rotation_about
from .linalg import I2, PAULI_X, PAULI_Y, PAULI_Z, kron

KRAUS_TOL = 1e-10


class NoiseModelError(ValueError):
    """Invalid noise-model configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class AttachMode(enum.Enum):
    AFTER_CNOT_CONTROL = "control"
    AFTER_CNOT_TARGET = "target"
    AFTER_CNOT_BOTH = "both"


DEFAULT_COHERENT_EPSILON = 0.05
DEFAULT_COHERENT_AXIS = (1 / math.sqrt(2), 0.0, 1 / math.sqrt(2))


@dataclass(frozen=True)
class CoherentError:
    """Systematic rotation by ``epsilon`` radians about ``axis``, injected after CNOTs."""

    epsilon: float = DEFAULT_COHERENT_EPSILON
    axis: tuple[float, float, float] = DEFAULT_COHERENT_AXIS
    attach: AttachMode = AttachMode.AFTER_CNOT_BOTH

    def __post_init__(self):
        axis = tuple(float(a) for a in self.axis)
        if len(axis) != 3:
            raise NoiseModelError("coherent_error.axis", "must have 3 components")
        if abs(np.linalg.norm(axis) - 1) > 1e-10:
            raise NoiseModelError("coherent_error.axis", f"must be a unit vector, norm is {np.linalg.norm(axis)!r}")
        if not (self.epsilon >= 0):
            raise NoiseModelError("coherent_error.epsilon_rad", "must be non-negative")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "attach", AttachMode(self.attach))


def _pair(value, name: str) -> tuple[float, float]:
    if np.ndim(value) == 0:
        value = [value, value]
    value = [float(v) for v in value]
    if len(value) != 2:
        raise NoiseModelError(name, f"expected one value per qubit (2), got {len(value)}")
    return tuple(value)


@dataclass(frozen=True)
class NoiseModel:
    """Incoherent and coherent noise parameters, in SI units (seconds).

    Per-qubit fields hold ``(qubit0, qubit1)``. ``readout_p01`` is
    P(read 1 | prepared 0) and ``readout_p10`` the converse. With
    ``virtual_rz`` the R_z gates are frame changes: zero duration, no error.
    """

    t1: tuple[float, float]
    t2: tuple[float, float]
    gate_time_1q: float = DEFAULT_GATE_TIME_1Q
    gate_time_2q: float = DEFAULT_GATE_TIME_2Q
    depol_1q: float = 0.0
    depol_2q: float = 0.0
    readout_p01: tuple[float, float] = (0.0, 0.0)
    readout_p10: tuple[float, float] = (0.0, 0.0)
    coherent_error: CoherentError | None = None
    virtual_rz: bool = True

    def __post_init__(self):
        for name in ("t1", "t2", "readout_p01", "readout_p10"):
            object.__setattr__(self, name, _pair(getattr(self, name), name))
        for q in range(2):
            if not self.t1[q] > 0:
                raise NoiseModelError("t1", f"qubit {q}: T1 must be positive")
            if not self.t2[q] > 0:
                raise NoiseModelError("t2", f"qubit {q}: T2 must be positive")
            if self.t2[q] > 2 * self.t1[q]:
                raise NoiseModelError("t2", f"qubit {q}: T2 <= 2*T1 violated ({self.t2[q]!r} > 2*{self.t1[q]!r})")
        for name in ("gate_time_1q", "gate_time_2q"):
            if not getattr(self, name) >= 0:
                raise NoiseModelError(name, "gate time must be non-negative")
        for name in ("depol_1q", "depol_2q"):
            if not 0 <= getattr(self, name) <= 1:
                raise NoiseModelError(name, "probability must lie in [0, 1]")
        for name in ("readout_p01", "readout_p10"):
            if not all(0 <= p <= 1 for p in getattr(self, name)):
                raise NoiseModelError(name, "probabilities must lie in [0, 1]")

    @classmethod
    def ideal(cls) -> "NoiseModel":
        """Placeholder with no incoherent noise at all."""
        return cls(t1=math.inf, t2=math.inf)

    def with_coherent_error(self, coherent: CoherentError | None) -> "NoiseModel":
        return replace(self, coherent_error=coherent)

    def without_coherent_error(self) -> "NoiseModel":
        return replace(self, coherent_error=None)


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Kraus operators of a CPT map; completeness is checked on construction."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.operators)
        if not ops:
            raise ValueError("a Kraus set needs at least one operator")
        shape = ops[0].shape
        if shape not in ((2, 2), (4, 4)) or any(k.shape != shape for k in ops):
            raise ValueError("Kraus operators must all be 2x2 or all be 4x4")
        completeness = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(completeness - np.eye(shape[0]))) > KRAUS_TOL:
            raise ValueError("Kraus operators are not trace preserving")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def superoperator(self) -> np.ndarray:
        """Matrix acting on row-major ``vec(rho)``: ``sum_k K (x) conj(K)``."""
        return sum(np.kron(k, k.conj()) for k in self.operators)

    def tensor(self, other: "KrausSet") -> "KrausSet":
        """Independent action on two qubits (``self`` on qubit 0)."""
        return KrausSet(tuple(np.kron(a, b) for a, b in itertools.product(self, other)))

    def compose(self, after: "KrausSet") -> "KrausSet":
        """Apply ``self`` first, then ``after``."""
        return KrausSet(_drop_zero(b @ a for b, a in itertools.product(after, self)))


def _drop_zero(ops, tol: float = 1e-15):
    kept = [k for k in ops if np.max(np.abs(k)) > tol]
    return tuple(kept) if kept else (np.zeros_like(next(iter(ops))),)


def amplitude_damping_kraus(gamma: float) -> KrausSet:
    if not 0 <= gamma <= 1:
        raise ValueError("gamma must lie in [0, 1]")
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausSet(_drop_zero([k0, k1]))


def phase_damping_kraus(lam: float) -> KrausSet:
    """Coherences shrink by ``sqrt(1 - lam)``; populations are untouched."""
    if not 0 <= lam <= 1:
        raise ValueError("lam must lie in [0, 1]")
    k0 = np.array([[1, 0], [0, math.sqrt(1 - lam)]], dtype=complex)
    k1 = np.array([[0, 0], [0, math.sqrt(lam)]], dtype=complex)
    return KrausSet(_drop_zero([k0, k1]))


def thermal_relaxation_kraus(t1: float, t2: float, duration: float) -> KrausSet:
    """Zero-temperature T1/T2 relaxation of one qubit over ``duration`` seconds.

    Amplitude damping with ``gamma = 1 - exp(-duration/t1)`` followed by pure
    dephasing at rate ``1/t2 - 1/(2 t1)``, so coherences decay as
    ``exp(-duration/t2)`` overall.
    """
    if t2 > 2 * t1:
        raise ValueError(f"unphysical relaxation: t2={t2!r} exceeds 2*t1={2 * t1!r}")
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if t1 <= 0 or t2 <= 0:
        raise ValueError("t1 and t2 must be positive")
    gamma = -math.expm1(-duration / t1)
    rate_phi = max(1 / t2 - 1 / (2 * t1), 0.0)
    lam = -math.expm1(-2 * duration * rate_phi)
    # Composed operators written with exact exponentials; 1 - gamma and
    # 1 - lam lose relative precision once they are tiny.
    keep = math.exp(-duration / (2 * t1))
    coherence = keep * math.exp(-duration * rate_phi)
    k0 = np.array([[1, 0], [0, coherence]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    k2 = np.array([[0, 0], [0, keep * math.sqrt(lam)]], dtype=complex)
    return KrausSet(_drop_zero([k0, k1, k2]))


def depolarizing_kraus(p: float, nqubits: int = 1) -> KrausSet:
    """``rho -> (1 - p) rho + p tr(rho) I / 2^n`` as Pauli Kraus operators."""
    if not 0 <= p <= 1:
        raise ValueError("depolarizing probability must lie in [0, 1]")
    if nqubits not in (1, 2):
        raise ValueError("nqubits must be 1 or 2")
    d2 = 4 ** nqubits
    paulis = [kron(*ps) for ps in itertools.product((I2, PAULI_X, PAULI_Y, PAULI_Z), repeat=nqubits)]
    ops = [math.sqrt(1 - p + p / d2) * paulis[0]]
    ops += [math.sqrt(p / d2) * pm for pm in paulis[1:]]
    return KrausSet(_drop_zero(ops))


def apply_kraus(rho, k: KrausSet) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (k.dim, k.dim):
        raise ValueError(f"dimension mismatch: state {rho.shape} vs Kraus {k.dim}x{k.dim}")
    out = sum(op @ rho @ op.conj().T for op in k)
    return (out + out.conj().T) / 2


def coherent_error_unitary(cfg: CoherentError) -> np.ndarray:
    return rotation_about(cfg.axis, cfg.epsilon)


def readout_confusion(probabilities, p01, p10) -> np.ndarray:
    """Push an outcome distribution through per-qubit classical confusion.

    ``probabilities`` has length ``2**n`` with qubit 0 as the slow index;
    ``p01``/``p10`` are scalars or length-``n`` sequences.
    """
    probs = np.asarray(probabilities, dtype=float).reshape(-1)
    n = int(round(math.log2(probs.size))) if probs.size else 0
    if probs.size < 2 or 2 ** n != probs.size:
        raise ValueError("distribution length must be a power of two")
    if np.any(probs < -1e-12) or abs(probs.sum() - 1) > 1e-9:
        raise ValueError("input is not a probability distribution")
    p01 = np.broadcast_to(np.asarray(p01, dtype=float), (n,))
    p10 = np.broadcast_to(np.asarray(p10, dtype=float), (n,))
    confusion = kron(*[np.array([[1 - a, b], [a, 1 - b]]) for a, b in zip(p01, p10)]).real
    return confusion @ probs


# -- configuration files ----------------------------------------------------

_US = 1e6
_NS = 1e9
_KNOWN_KEYS = {"t1_us", "t2_us", "gate_time_1q_ns", "gate_time_2q_ns", "depol_1q", "depol_2q",
               "readout_p01", "readout_p10", "coherent_error", "virtual_rz"}


def _number(value, name: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise NoiseModelError(name, f"expected a number, got {value!r}") from None


def _numbers(value, name: str):
    if isinstance(value, (list, tuple)):
        return [_number(v, name) for v in value]
    return _number(value, name)


def _scaled(value, scale):
    if isinstance(value, list):
        return [v / scale for v in value]
    return value / scale


def noise_model_from_dict(data: dict) -> NoiseModel:
    """Build a :class:`NoiseModel` from the config-file schema (units in key names)."""
    if not isinstance(data, dict):
        raise NoiseModelError("<root>", "expected a key-value object")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise NoiseModelError(sorted(unknown)[0], "unknown field")
    for key in ("t1_us", "t2_us"):
        if key not in data:
            raise NoiseModelError(key, "required field is missing")
    kwargs = {
        "t1": _scaled(_numbers(data["t1_us"], "t1_us"), _US),
        "t2": _scaled(_numbers(data["t2_us"], "t2_us"), _US),
    }
    if "gate_time_1q_ns" in data:
        kwargs["gate_time_1q"] = _number(data["gate_time_1q_ns"], "gate_time_1q_ns") / _NS
    if "gate_time_2q_ns" in data:
        kwargs["gate_time_2q"] = _number(data["gate_time_2q_ns"], "gate_time_2q_ns") / _NS
    for key in ("depol_1q", "depol_2q"):
        if key in data:
            kwargs[key] = _number(data[key], key)
    for key in ("readout_p01", "readout_p10"):
        if key in data:
            kwargs[key] = _numbers(data[key], key)
    if "virtual_rz" in data:
        if not isinstance(data["virtual_rz"], bool):
            raise NoiseModelError("virtual_rz", "expected true or false")
        kwargs["virtual_rz"] = data["virtual_rz"]
    ce = data.get("coherent_error")
    if ce is not None:
        if not isinstance(ce, dict):
            raise NoiseModelError("coherent_error", "expected an object")
        extra = set(ce) - {"epsilon_rad", "axis", "attach"}
        if extra:
            raise NoiseModelError(f"coherent_error.{sorted(extra)[0]}", "unknown field")
        try:
            attach = AttachMode(ce.get("attach", AttachMode.AFTER_CNOT_BOTH.value))
        except ValueError:
            raise NoiseModelError("coherent_error.attach",
                                  f"expected one of {[m.value for m in AttachMode]}") from None
        kwargs["coherent_error"] = CoherentError(
            epsilon=_number(ce.get("epsilon_rad", DEFAULT_COHERENT_EPSILON), "coherent_error.epsilon_rad"),
            axis=tuple(_numbers(ce.get("axis", list(DEFAULT_COHERENT_AXIS)), "coherent_error.axis")),
            attach=attach,
        )
    return NoiseModel(**kwargs)


def noise_model_to_dict(model: NoiseModel) -> dict:
    def us(v):
        return [round(x * _US, 9) for x in v]

    out = {
        "t1_us": us(model.t1),
        "t2_us": us(model.t2),
        "gate_time_1q_ns": round(model.gate_time_1q * _NS, 9),
        "gate_time_2q_ns": round(model.gate_time_2q * _NS, 9),
        "depol_1q": model.depol_1q,
        "depol_2q": model.depol_2q,
        "readout_p01": list(model.readout_p01),
        "readout_p10": list(model.readout_p10),
        "virtual_rz": model.virtual_rz,
    }
    if model.coherent_error is not None:
        ce = model.coherent_error
        out["coherent_error"] = {"epsilon_rad": ce.epsilon, "axis": list(ce.axis), "attach": ce.attach.value}
    return out


def load_noise_model(path: str | os.PathLike) -> NoiseModel:
    """Read and validate a JSON noise-model file.

    Raises:
        OSError: the file cannot be read.
        NoiseModelError: the file does not parse or violates a constraint.
    """
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NoiseModelError("<file>", f"parse error: {exc}") from None
    return noise_model_from_dict(data)


def save_noise_model(model: NoiseModel, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(noise_model_to_dict(model), indent=2) + "\n")


def example_noise_model_path() -> Path:
    """Bundled example configuration (plausible magnitudes, not a calibration record)."""
    return Path(__file__).with_name("data") / "example_noise.json"

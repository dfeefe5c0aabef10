"""Echo-channel builders and the noisy density-matrix simulator."""

from __future__ import annotations

import enum
import functools

import numpy as np

from .circuit import ChannelKind, Circuit, equal_up_to_phase
from .gates import (HADAMARD, GateKind, GateOp, RngStream, as_generator, embed_single_qubit,
                    haar_su2, haar_u4, inverse_op, op_unitary)
from .kak import compile_unitary, euler_zyz
from .linalg import I2, dagger, partial_trace_qubit1
from .noise import (AttachMode, KrausSet, NoiseModel, coherent_error_unitary, depolarizing_kraus,
                    readout_confusion, thermal_relaxation_kraus)

__all__ = [
    "ChannelKind", "Circuit", "TwirlMode", "build_channel", "build_cnot_echo", "build_random_echo",
    "build_twirled_cnot_echo", "measure_polarization", "simulate",
]


class TwirlMode(enum.Enum):
    GENERAL_U = "general"
    SINGLE_AXIS = "axis"


def _seed_of(rng):
    return rng.seed if isinstance(rng, RngStream) else None


def build_cnot_echo(n_steps: int, control: int = 0) -> Circuit:
    """``2 * n_steps`` CNOTs controlled by ``control`` (qubit 0 by default)."""
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    cnot = GateOp(GateKind.CNOT, target=1 - control, control=control)
    return Circuit((cnot,) * (2 * n_steps), ChannelKind.CNOT_ECHO, n_steps)


def _reversed_inverse(ops) -> list[GateOp]:
    out = []
    for op in reversed(ops):
        out.extend(inverse_op(op))
    return out


def build_random_echo(n_steps: int, rng, invert_by_reversal: bool = False) -> Circuit:
    """Product of ``U_k^dag U_k`` over Haar-random two-qubit ``U_k``.

    Each ``U_k`` is compiled through the KAK circuit; ``U_k^dag`` is compiled
    independently from its own decomposition unless ``invert_by_reversal``,
    in which case ``U_k``'s gate list is reversed and inverted instead.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    gen = as_generator(rng)
    ops: list[GateOp] = []
    for _ in range(n_steps):
        u = haar_u4(gen)
        forward = list(compile_unitary(u).ops)
        backward = _reversed_inverse(forward) if invert_by_reversal else list(compile_unitary(dagger(u)).ops)
        ops.extend(forward)
        ops.extend(backward)
    return Circuit(ops, ChannelKind.RANDOM_ECHO, n_steps, _seed_of(rng))


def _twirl_gates(gen: np.random.Generator, mode: TwirlMode, qubit: int) -> list[GateOp]:
    if mode is TwirlMode.GENERAL_U:
        t1, t2, t3, _ = euler_zyz(haar_su2(gen))
        return [GateOp(GateKind.RZ, qubit, angle=t3),
                GateOp(GateKind.RY, qubit, angle=t2),
                GateOp(GateKind.RZ, qubit, angle=t1)]
    kind = GateKind.RX if gen.integers(2) == 0 else GateKind.RY
    return [GateOp(kind, qubit, angle=float(gen.uniform(0, 2 * np.pi)))]


def build_twirled_cnot_echo(n_steps: int, mode: TwirlMode | str, rng, control: int = 0) -> Circuit:
    """CNOT echo with each CNOT pair conjugated by random local gates.

    One step is ``V_a (x) V_b``, CNOT, CNOT, ``V_a^dag (x) V_b^dag``.
    ``GENERAL_U`` draws Haar SU(2) twirls compiled as ZYZ rotations;
    ``SINGLE_AXIS`` draws one R_x or R_y (axis chosen at random) with a
    uniform angle in [0, 2 pi).
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    mode = TwirlMode(mode)
    gen = as_generator(rng)
    cnot = GateOp(GateKind.CNOT, target=1 - control, control=control)
    ops: list[GateOp] = []
    for _ in range(n_steps):
        va = _twirl_gates(gen, mode, 0)
        vb = _twirl_gates(gen, mode, 1)
        ops += va + vb + [cnot, cnot] + _reversed_inverse(va) + _reversed_inverse(vb)
    kind = ChannelKind.TWIRLED_U if mode is TwirlMode.GENERAL_U else ChannelKind.TWIRLED_AXIS
    return Circuit(ops, kind, n_steps, _seed_of(rng))


def build_channel(kind: ChannelKind | str, n_steps: int, rng=None, **options) -> Circuit:
    """Dispatch to the builder for ``kind``; ``rng`` is ignored for the CNOT echo."""
    kind = ChannelKind(kind)
    if kind is ChannelKind.CNOT_ECHO:
        return build_cnot_echo(n_steps, **options)
    if kind is ChannelKind.RANDOM_ECHO:
        return build_random_echo(n_steps, rng, **options)
    mode = TwirlMode.GENERAL_U if kind is ChannelKind.TWIRLED_U else TwirlMode.SINGLE_AXIS
    return build_twirled_cnot_echo(n_steps, mode, rng, **options)


def is_echo_identity(circuit: Circuit, tol: float = 1e-8) -> bool:
    return equal_up_to_phase(circuit.unitary(), np.eye(4))[0] <= tol


# -- simulation -------------------------------------------------------------

def _superop(k: KrausSet) -> np.ndarray:
    return k.superoperator()


def _unitary_superop(u: np.ndarray) -> np.ndarray:
    return np.kron(u, u.conj())


@functools.lru_cache(maxsize=256)
def _relaxation_superop(noise: NoiseModel, duration: float) -> np.ndarray:
    k0 = thermal_relaxation_kraus(noise.t1[0], noise.t2[0], duration)
    k1 = thermal_relaxation_kraus(noise.t1[1], noise.t2[1], duration)
    return _superop(k0.tensor(k1))


@functools.lru_cache(maxsize=256)
def _depolarizing_superop(p: float, support: tuple[int, ...]) -> np.ndarray:
    if len(support) == 2:
        return _superop(depolarizing_kraus(p, 2))
    single = depolarizing_kraus(p, 1)
    ident = KrausSet((I2,))
    return _superop(single.tensor(ident) if support[0] == 0 else ident.tensor(single))


@functools.lru_cache(maxsize=256)
def _coherent_superop(noise: NoiseModel, control: int, target: int) -> np.ndarray | None:
    ce = noise.coherent_error
    if ce is None or ce.epsilon == 0:
        return None
    c = coherent_error_unitary(ce)
    if ce.attach is AttachMode.AFTER_CNOT_CONTROL:
        u = embed_single_qubit(c, control)
    elif ce.attach is AttachMode.AFTER_CNOT_TARGET:
        u = embed_single_qubit(c, target)
    else:
        u = np.kron(c, c)
    return _unitary_superop(u)


@functools.lru_cache(maxsize=1024)
def _noise_superop(noise: NoiseModel, support: tuple[int, ...], duration: float,
                   cnot: tuple[int, int] | None) -> np.ndarray:
    """Combined post-gate noise: depolarizing, then relaxation, then coherent error."""
    p = noise.depol_2q if len(support) == 2 else noise.depol_1q
    s = _relaxation_superop(noise, duration) @ _depolarizing_superop(p, support)
    if cnot is not None:
        coherent = _coherent_superop(noise, *cnot)
        if coherent is not None:
            s = coherent @ s
    return s


def _gate_noise(op: GateOp, noise: NoiseModel) -> np.ndarray | None:
    if op.kind is GateKind.RZ and noise.virtual_rz and op.duration is None:
        return None
    duration = op.duration
    if duration is None:
        duration = noise.gate_time_2q if op.is_two_qubit else noise.gate_time_1q
    cnot = (op.control, op.target) if op.kind is GateKind.CNOT else None
    return _noise_superop(noise, op.qubits, float(duration), cnot)


def simulate(circuit: Circuit, rho, noise: NoiseModel | None = None) -> np.ndarray:
    """Evolve a two-qubit density matrix through ``circuit``.

    Per gate: the ideal unitary, then (with ``noise``) depolarizing on the
    gate's support, thermal relaxation of both qubits for the gate duration,
    and after CNOTs the coherent-error unitary.
    """
    rho = np.array(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("simulate expects a 4x4 density matrix")
    for op in circuit.ops:
        u = op_unitary(op)
        rho = u @ rho @ u.conj().T
        s = None if noise is None else _gate_noise(op, noise)
        if s is not None:
            rho = (s @ rho.reshape(16)).reshape(4, 4)
    return (rho + rho.conj().T) / 2


def circuit_superoperator(circuit: Circuit, noise: NoiseModel | None = None) -> np.ndarray:
    """16x16 superoperator of the (noisy) circuit on row-major ``vec(rho)``."""
    s = np.eye(16, dtype=complex)
    for op in circuit.ops:
        s = _unitary_superop(op_unitary(op)) @ s
        g = None if noise is None else _gate_noise(op, noise)
        if g is not None:
            s = g @ s
    return s


_S_DAG = np.diag([1, -1j])
_BASIS_CHANGE = {"x": HADAMARD, "y": HADAMARD @ _S_DAG, "z": I2}


def measure_polarization(rho, axis: str, shots: int | None = None, noise: NoiseModel | None = None,
                         rng=None) -> float:
    """Polarization of qubit 0 along ``axis`` (``"x"``, ``"y"`` or ``"z"``).

    ``shots=None`` returns the exact expectation ``p+ - p-``; otherwise
    ``shots`` outcomes are drawn and ``(n+ - n-)/shots`` is returned.
    Readout error from ``noise`` (qubit 0) is applied to the outcome
    probabilities in both modes.
    """
    axis = axis.lower()
    if axis not in _BASIS_CHANGE:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    rho = np.asarray(rho, dtype=complex)
    reduced = partial_trace_qubit1(rho) if rho.shape == (4, 4) else rho
    v = _BASIS_CHANGE[axis]
    p0 = float(np.clip((v @ reduced @ v.conj().T)[0, 0].real, 0.0, 1.0))
    probs = np.array([p0, 1.0 - p0])
    if noise is not None:
        probs = readout_confusion(probs, noise.readout_p01[0], noise.readout_p10[0])
    if shots is None:
        return float(probs[0] - probs[1])
    if shots < 1:
        raise ValueError("shots must be at least 1")
    n_plus = as_generator(rng).binomial(shots, min(max(probs[0], 0.0), 1.0))
    return (2 * n_plus - shots) / shots

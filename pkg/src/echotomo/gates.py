"""Gate library, two-qubit embedding and Haar-random unitaries."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import I2, PAULI_X, PAULI_Y, PAULI_Z, dagger, is_unitary

DEFAULT_GATE_TIME_1Q = 35e-9
DEFAULT_GATE_TIME_2Q = 300e-9


class GateKind(enum.Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    H = "h"
    X = "x"
    CNOT = "cnot"
    UNITARY1Q = "unitary1q"
    UNITARY2Q = "unitary2q"


ROTATIONS = (GateKind.RX, GateKind.RY, GateKind.RZ)
TWO_QUBIT_KINDS = (GateKind.CNOT, GateKind.UNITARY2Q)


class RngStream:
    """Seeded, splittable random stream.

    Wraps a :class:`numpy.random.Generator` seeded from ``SeedSequence(seed,
    spawn_key=path)``. ``child(i, ...)`` derives an independent stream whose
    state depends only on ``(seed, path + (i, ...))``, so concurrent workers
    that own different children reproduce bit-exactly regardless of
    scheduling.
    """

    def __init__(self, seed: int = 0, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        self.generator = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=self.path))

    def child(self, *index: int) -> "RngStream":
        return RngStream(self.seed, self.path + tuple(index))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, path={self.path})"


def as_generator(rng) -> np.random.Generator:
    """Accept an :class:`RngStream`, a ``Generator`` or an integer seed."""
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

# Control on qubit 0 (left factor), target on qubit 1.
CNOT01 = np.array([[1, 0, 0, 0],
                   [0, 1, 0, 0],
                   [0, 0, 0, 1],
                   [0, 0, 1, 0]], dtype=complex)
# Control on qubit 1, target on qubit 0.
CNOT10 = np.array([[1, 0, 0, 0],
                   [0, 0, 0, 1],
                   [0, 0, 1, 0],
                   [0, 1, 0, 0]], dtype=complex)

_ROTATION_FUNCS = {GateKind.RX: rx, GateKind.RY: ry, GateKind.RZ: rz}


@dataclass(frozen=True, eq=False)
class GateOp:
    """One gate of a two-qubit circuit.

    ``duration`` is in seconds; ``None`` means "use the noise model's gate
    time for this kind". For ``UNITARY2Q`` the matrix acts on ``|q0 q1>``
    and ``target`` is ignored.
    """

    kind: GateKind
    target: int = 0
    angle: float | None = None
    control: int | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)
    duration: float | None = None

    def __post_init__(self):
        if self.kind in ROTATIONS:
            if self.angle is None or not np.isfinite(self.angle):
                raise ValueError(f"{self.kind.name} needs a finite angle")
        if self.kind in (GateKind.UNITARY1Q, GateKind.UNITARY2Q):
            dim = 2 if self.kind is GateKind.UNITARY1Q else 4
            if self.matrix is None or np.shape(self.matrix) != (dim, dim):
                raise ValueError(f"{self.kind.name} needs a {dim}x{dim} matrix")
            if not is_unitary(self.matrix, 1e-10):
                raise ValueError(f"{self.kind.name} matrix is not unitary")
            m = np.array(self.matrix, dtype=complex)
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
        if self.target not in (0, 1):
            raise ValueError(f"target must be 0 or 1, got {self.target}")
        if self.kind is GateKind.CNOT:
            control = 1 - self.target if self.control is None else self.control
            if control not in (0, 1) or control == self.target:
                raise ValueError("CNOT control must differ from its target")
            object.__setattr__(self, "control", control)
        elif self.control is not None:
            raise ValueError(f"{self.kind.name} does not take a control qubit")
        if self.duration is not None and self.duration < 0:
            raise ValueError("duration must be non-negative")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.kind is GateKind.CNOT:
            return (self.control, self.target)
        if self.kind is GateKind.UNITARY2Q:
            return (0, 1)
        return (self.target,)

    def __eq__(self, other):
        if not isinstance(other, GateOp):
            return NotImplemented
        same_matrix = (self.matrix is None and other.matrix is None) or (
            self.matrix is not None and other.matrix is not None
            and np.array_equal(self.matrix, other.matrix))
        return (self.kind, self.target, self.angle, self.control, self.duration) == (
            other.kind, other.target, other.angle, other.control, other.duration) and same_matrix

    __hash__ = None


def gate_matrix(op: GateOp) -> np.ndarray:
    """Native matrix of ``op``: 2x2 for single-qubit kinds, 4x4 otherwise."""
    if op.kind in _ROTATION_FUNCS:
        return _ROTATION_FUNCS[op.kind](op.angle)
    if op.kind is GateKind.H:
        return HADAMARD.copy()
    if op.kind is GateKind.X:
        return PAULI_X.copy()
    if op.kind is GateKind.CNOT:
        return (CNOT01 if op.control == 0 else CNOT10).copy()
    return np.array(op.matrix, dtype=complex)


def embed_single_qubit(u, qubit: int) -> np.ndarray:
    """Lift a 2x2 operator to the two-qubit space (``u (x) I`` for qubit 0)."""
    if qubit == 0:
        return np.kron(u, I2)
    if qubit == 1:
        return np.kron(I2, u)
    raise ValueError(f"qubit must be 0 or 1, got {qubit}")


def op_unitary(op: GateOp) -> np.ndarray:
    """4x4 action of ``op`` on the two-qubit register."""
    m = gate_matrix(op)
    if op.is_two_qubit:
        return m
    return embed_single_qubit(m, op.target)


def _ginibre_qr(gen: np.random.Generator, n: int) -> np.ndarray:
    z = (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    # Fix the phase ambiguity of QR so that q is Haar distributed.
    return q * (d / np.abs(d))


def haar_unitary(rng, n: int) -> np.ndarray:
    """Haar-random ``n x n`` unitary via QR of a complex Ginibre matrix."""
    return _ginibre_qr(as_generator(rng), n)


def haar_u4(rng) -> np.ndarray:
    return _ginibre_qr(as_generator(rng), 4)


def haar_su2(rng) -> np.ndarray:
    """Haar-random element of SU(2) (a U(2) sample with its phase removed)."""
    u = _ginibre_qr(as_generator(rng), 2)
    return u / np.sqrt(np.linalg.det(u))


def rotation_about(axis, angle: float) -> np.ndarray:
    """``exp(-i angle (n . sigma) / 2)`` for a unit 3-vector ``n``."""
    nx, ny, nz = np.asarray(axis, dtype=float)
    gen = nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z
    return np.cos(angle / 2) * I2 - 1j * np.sin(angle / 2) * gen


def inverse_op(op: GateOp) -> list[GateOp]:
    """Gates implementing ``op^dagger`` (a single gate for every kind)."""
    if op.kind in ROTATIONS:
        return [GateOp(op.kind, op.target, angle=-op.angle, duration=op.duration)]
    if op.kind in (GateKind.H, GateKind.X, GateKind.CNOT):
        return [op]
    return [GateOp(op.kind, op.target, matrix=dagger(op.matrix), duration=op.duration)]

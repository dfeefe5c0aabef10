"""Ordered gate lists on the two-qubit register."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .gates import GateKind, GateOp, op_unitary
from .linalg import I4


class ChannelKind(enum.Enum):
    CNOT_ECHO = "cnot"
    RANDOM_ECHO = "random"
    TWIRLED_U = "twirl-u"
    TWIRLED_AXIS = "twirl-axis"


@dataclass(frozen=True)
class Circuit:
    """Gates in time order (``ops[0]`` acts first) plus provenance metadata."""

    ops: tuple[GateOp, ...] = ()
    channel_kind: ChannelKind | None = None
    steps: int = 0
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            if not isinstance(op, GateOp):
                raise TypeError(f"expected GateOp, got {type(op).__name__}")

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def unitary(self) -> np.ndarray:
        """Noiseless 4x4 unitary of the whole circuit."""
        u = I4.copy()
        for op in self.ops:
            u = op_unitary(op) @ u
        return u

    def count(self, *kinds: GateKind) -> int:
        return sum(op.kind in kinds for op in self.ops)

    @property
    def cnot_count(self) -> int:
        return self.count(GateKind.CNOT)

    @property
    def single_qubit_count(self) -> int:
        return sum(not op.is_two_qubit for op in self.ops)


def equal_up_to_phase(u, v) -> tuple[float, float]:
    """Return ``(err, phi)`` minimizing ``max|u - e^{i phi} v|`` over ``phi``.

    ``phi`` is taken from the overlap ``tr(v^dag u)``, which is the exact
    Frobenius-optimal phase and agrees with the max-norm optimum to first order.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    overlap = np.vdot(v, u)
    phi = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    return float(np.max(np.abs(u - np.exp(1j * phi) * v))), phi

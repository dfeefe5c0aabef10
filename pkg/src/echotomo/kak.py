"""Cartan (KAK) decomposition of two-qubit unitaries and 3-CNOT synthesis.

Every ``U`` in U(4) is written as::

    U = e^{i phi} (a3 (x) a4) . exp(i(a XX + b YY + c ZZ)) . (a1 (x) a2)

with ``a_j`` in SU(2) and ``(a, b, c)`` folded into the Weyl chamber
``pi/4 >= a >= b >= |c|``. The interaction core is then compiled into three
CNOTs and three rotations, and each ``a_j`` into a ZYZ Euler triple, giving
at most 3 CNOTs and 15 single-qubit rotations from {R_y, R_z}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .gates import CNOT01, CNOT10, GateKind, GateOp, rx, ry, rz
from .linalg import I2, PAULI_X, PAULI_Y, PAULI_Z, as_matrix, dagger, is_unitary

# Columns are the magic (Bell) basis; local unitaries become real orthogonal in it.
MAGIC = np.array([[1, 0, 0, 1j],
                  [0, 1j, 1, 0],
                  [0, 1j, -1, 0],
                  [1, 0, 0, -1j]], dtype=complex) / np.sqrt(2)
MAGIC_DAG = dagger(MAGIC)

# XX, YY, ZZ eigenvalues on the magic basis columns.
_MAGIC_SIGNS = np.array([[1, -1, 1],
                         [1, 1, -1],
                         [-1, -1, -1],
                         [-1, 1, 1]], dtype=float)

_GROUP_TOL = 1e-6
# Irrational mixing weight for the second diagonalization stage.
_MIX = 1 / math.sqrt(3)

_PAULI_PAIRS = (np.kron(PAULI_X, PAULI_X), np.kron(PAULI_Y, PAULI_Y), np.kron(PAULI_Z, PAULI_Z))
# Local conjugations swapping two interaction coefficients: (i, j) -> L.
_SWAPPERS = {
    (0, 1): np.kron(rz(np.pi / 2), rz(np.pi / 2)),
    (0, 2): np.kron(ry(np.pi / 2), ry(np.pi / 2)),
    (1, 2): np.kron(rx(np.pi / 2), rx(np.pi / 2)),
}
# Local conjugations negating two interaction coefficients.
_FLIPPERS = {
    (0, 1): np.kron(PAULI_Z, I2),
    (0, 2): np.kron(PAULI_Y, I2),
    (1, 2): np.kron(PAULI_X, I2),
}


@dataclass(frozen=True, eq=False)
class KakDecomposition:
    """Local factors, Weyl-chamber coefficients and global phase of a 4x4 unitary.

    ``a1``/``a2`` act first on qubits 0/1, ``a3``/``a4`` act last.
    """

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    a4: np.ndarray
    canonical_params: tuple[float, float, float]
    global_phase: float

    def unitary(self) -> np.ndarray:
        return (np.exp(1j * self.global_phase)
                * np.kron(self.a3, self.a4)
                @ interaction_unitary(*self.canonical_params)
                @ np.kron(self.a1, self.a2))


def interaction_unitary(a: float, b: float, c: float) -> np.ndarray:
    """``exp(i(a XX + b YY + c ZZ))``, built exactly in the magic basis."""
    phases = _MAGIC_SIGNS @ np.array([a, b, c], dtype=float)
    return MAGIC @ np.diag(np.exp(1j * phases)) @ MAGIC_DAG


def _simultaneous_real_diagonalize(m: np.ndarray) -> np.ndarray:
    """Real orthogonal ``O`` (det +1) with ``O^T m O`` diagonal, for symmetric unitary ``m``.

    Real and imaginary parts of ``m`` commute; diagonalize the real part, then
    resolve each (near-)degenerate eigenspace with a mixture of both parts.
    """
    re = (m.real + m.real.T) / 2
    im = (m.imag + m.imag.T) / 2
    w, v = np.linalg.eigh(re)
    start = 0
    for stop in range(1, 5):
        if stop == 4 or w[stop] - w[stop - 1] > _GROUP_TOL:
            if stop - start > 1:
                block = v[:, start:stop]
                sub = block.T @ (re + _MIX * im) @ block
                _, v2 = np.linalg.eigh((sub + sub.T) / 2)
                v[:, start:stop] = block @ v2
            start = stop
    if np.linalg.det(v) < 0:
        v[:, 0] = -v[:, 0]
    return v


def _factor_local(k: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Split ``k = e^{i phi} (a (x) b)`` with ``a, b`` in SU(2)."""
    r = k.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(r)
    a = u[:, 0].reshape(2, 2) * np.sqrt(s[0])
    b = vh[0, :].reshape(2, 2) * np.sqrt(s[0])
    a = a / np.sqrt(np.linalg.det(a))
    b = b / np.sqrt(np.linalg.det(b))
    overlap = np.vdot(np.kron(a, b), k)
    return a, b, float(np.angle(overlap))


def _fold_into_chamber(coeffs, k1, k2, phase):
    """Move ``(a, b, c)`` into the Weyl chamber, absorbing changes into the locals.

    Invariant throughout: ``U = e^{i phase} k1 . core(coeffs) . k2``.
    """
    coeffs = list(coeffs)
    # Shifts by pi/2: core(x) = core(x - n pi/2) . (i P(x)P)^n.
    for i in range(3):
        n = math.ceil((coeffs[i] - np.pi / 4) / (np.pi / 2))
        if n:
            coeffs[i] -= n * np.pi / 2
            k2 = np.linalg.matrix_power(_PAULI_PAIRS[i], n % 2) @ k2
            phase += n * np.pi / 2

    def conjugate(lmat, new_coeffs):
        # L core(new) L^dag = core(old)  =>  core(old) = L core(new) L^dag.
        nonlocal k1, k2
        k1 = k1 @ lmat
        k2 = dagger(lmat) @ k2
        coeffs[:] = new_coeffs

    # Sort by magnitude, descending.
    for i, j in ((0, 1), (1, 2), (0, 1)):
        if abs(coeffs[j]) > abs(coeffs[i]):
            new = list(coeffs)
            new[i], new[j] = coeffs[j], coeffs[i]
            conjugate(dagger(_SWAPPERS[(i, j)]), new)
    if coeffs[0] < 0:
        conjugate(_FLIPPERS[(0, 2)], [-coeffs[0], coeffs[1], -coeffs[2]])
    if coeffs[1] < 0:
        conjugate(_FLIPPERS[(1, 2)], [coeffs[0], -coeffs[1], -coeffs[2]])
    return tuple(float(x) for x in coeffs), k1, k2, phase


def kak_decompose(u) -> KakDecomposition:
    """KAK decomposition of a 4x4 unitary via the magic basis."""
    u = as_matrix(u)
    if u.shape != (4, 4):
        raise ValueError("kak_decompose needs a 4x4 matrix")
    if not is_unitary(u, 1e-10):
        raise ValueError("kak_decompose needs a unitary matrix")
    det_phase = float(np.angle(np.linalg.det(u))) / 4
    su = u * np.exp(-1j * det_phase)
    up = MAGIC_DAG @ su @ MAGIC
    o = _simultaneous_real_diagonalize(up.T @ up)
    d = np.diag(o.T @ up.T @ up @ o)
    theta = np.angle(d) / 2
    # det(diag(e^{i theta})) = +-1; pick the branch that makes it +1.
    if np.cos(np.sum(theta)) < 0:
        theta[0] += np.pi
    q1 = (up @ o @ np.diag(np.exp(-1j * theta))).real
    shared = float(np.sum(theta)) / 4
    coeffs = np.linalg.lstsq(_MAGIC_SIGNS, theta - shared, rcond=None)[0]
    k1 = MAGIC @ q1 @ MAGIC_DAG
    k2 = MAGIC @ o.T @ MAGIC_DAG
    coeffs, k1, k2, phase = _fold_into_chamber(coeffs, k1, k2, det_phase + shared)
    a3, a4, p1 = _factor_local(k1)
    a1, a2, p2 = _factor_local(k2)
    phase = math.remainder(phase + p1 + p2, 2 * np.pi)
    return KakDecomposition(a1, a2, a3, a4, coeffs, phase)


def euler_zyz(u) -> tuple[float, float, float, float]:
    """Angles with ``Rz(t1) Ry(t2) Rz(t3) e^{i phase} = u``."""
    u = np.asarray(u, dtype=complex)
    phase = float(np.angle(np.linalg.det(u))) / 2
    v = u * np.exp(-1j * phase)
    alpha, beta = v[0, 0], v[1, 0]
    t2 = 2 * math.atan2(abs(beta), abs(alpha))
    total = -2 * float(np.angle(alpha))
    diff = 2 * float(np.angle(beta))
    return (total + diff) / 2, t2, (total - diff) / 2, phase


def _euler_ops(u, qubit: int) -> tuple[list[GateOp], float]:
    t1, t2, t3, phase = euler_zyz(u)
    ops = [GateOp(GateKind.RZ, qubit, angle=t3),
           GateOp(GateKind.RY, qubit, angle=t2),
           GateOp(GateKind.RZ, qubit, angle=t1)]
    return ops, phase


def kak_to_circuit(d: KakDecomposition) -> Circuit:
    """Compile a decomposition into 3 CNOTs and 15 R_y/R_z rotations.

    The circuit's unitary ``V`` satisfies ``U = e^{i g} V`` with ``g`` stored
    in ``circuit.meta["global_phase"]``.
    """
    a, b, c = d.canonical_params
    # core(a, b, c) = e^{i pi/4} (I (x) Rz(pi/2)) T (Rz(-pi/2) (x) I), T the CNOT block.
    first0, ph1 = _euler_ops(rz(-np.pi / 2) @ d.a1, 0)
    first1, ph2 = _euler_ops(d.a2, 1)
    last0, ph3 = _euler_ops(d.a3, 0)
    last1, ph4 = _euler_ops(d.a4 @ rz(np.pi / 2), 1)
    core = [
        GateOp(GateKind.CNOT, target=0, control=1),
        GateOp(GateKind.RY, 1, angle=np.pi / 2 - 2 * b),
        GateOp(GateKind.CNOT, target=1, control=0),
        GateOp(GateKind.RZ, 0, angle=np.pi / 2 - 2 * c),
        GateOp(GateKind.RY, 1, angle=2 * a - np.pi / 2),
        GateOp(GateKind.CNOT, target=0, control=1),
    ]
    phase = d.global_phase + np.pi / 4 + ph1 + ph2 + ph3 + ph4
    ops = first0 + first1 + core + last0 + last1
    return Circuit(ops, meta={"global_phase": math.remainder(phase, 2 * np.pi)})


def compile_unitary(u) -> Circuit:
    return kak_to_circuit(kak_decompose(u))

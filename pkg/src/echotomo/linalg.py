"""Dense one- and two-qubit linear algebra.

Matrices are plain complex ``numpy`` arrays of shape (2, 2) or (4, 4).
Every function returns a new array and never mutates its arguments.

Qubit ordering: qubit 0 is the *left* tensor factor (the slow index), so the
two-qubit basis is ``|q0 q1>`` in the order ``|00>, |01>, |10>, |11>`` and a
single-qubit operator ``u`` on qubit 0 embeds as ``kron(u, I)``. Qubit 0 is
the tomography target, qubit 1 the ancilla.
"""

from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

_VALID_DIMS = (2, 4)


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a complex 2x2 or 4x4 array, raising on other shapes."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in _VALID_DIMS:
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    return m


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def dagger(a) -> np.ndarray:
    return np.conj(np.asarray(a, dtype=complex)).T


def is_unitary(a, tol: float = 1e-10) -> bool:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol)


def is_hermitian(a, tol: float = 1e-10) -> bool:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def is_density_matrix(rho, tol: float = 1e-10, eig_tol: float = 1e-8) -> bool:
    """Check trace one, Hermiticity and positivity within tolerances."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] not in _VALID_DIMS:
        return False
    if not is_hermitian(rho, tol) or abs(np.trace(rho) - 1) > tol:
        return False
    return bool(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) >= -eig_tol)


def kron(*factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def density_from_statevector(psi, tol: float = 1e-12) -> np.ndarray:
    """Return the projector ``|psi><psi|`` for a normalized 2- or 4-vector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.size not in _VALID_DIMS:
        raise ValueError(f"state vector must have length 2 or 4, got {psi.size}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > tol:
        raise ValueError(f"state vector is not normalized (norm={norm!r})")
    return np.outer(psi, psi.conj())


def bloch_from_density(rho) -> np.ndarray:
    """Bloch vector ``(tr(rho X), tr(rho Y), tr(rho Z))`` of a qubit state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a single-qubit density matrix, got shape {rho.shape}")
    return np.array([
        2 * rho[0, 1].real,
        -2 * rho[0, 1].imag,
        (rho[0, 0] - rho[1, 1]).real,
    ])


def density_from_bloch(r, tol: float = 1e-10) -> np.ndarray:
    """Inverse of :func:`bloch_from_density`: ``(I + r . sigma) / 2``."""
    r = np.asarray(r, dtype=float).reshape(-1)
    if r.size != 3:
        raise ValueError("Bloch vector must have 3 components")
    if np.linalg.norm(r) > 1 + tol:
        raise ValueError(f"Bloch vector lies outside the unit ball (norm={np.linalg.norm(r)!r})")
    x, y, z = r
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=complex)


def partial_trace_qubit1(rho) -> np.ndarray:
    """Trace out the ancilla (qubit 1) and return the reduced state of qubit 0."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a two-qubit density matrix, got shape {rho.shape}")
    return np.einsum("ijkj->ik", rho.reshape(2, 2, 2, 2))


def random_density_matrix(rng: np.random.Generator, dim: int = 2, rank: int | None = None) -> np.ndarray:
    """Random mixed state ``G G^dag / tr(G G^dag)`` with complex Gaussian ``G``."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real

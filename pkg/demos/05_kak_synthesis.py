"""
Compiling two-qubit unitaries
=============================

Any two-qubit gate factors into local gates around an XX/YY/ZZ interaction.
That core needs at most three CNOTs, so every gate compiles to three CNOTs
and at most fifteen R_y/R_z rotations.
"""

import numpy as np

from echotomo import haar_u4, kak_decompose, kak_to_circuit
from echotomo.gates import CNOT01

swap = np.eye(4)[[0, 2, 1, 3]]
iswap = np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]])
for name, u in (("identity", np.eye(4)), ("CNOT", CNOT01), ("iSWAP", iswap), ("SWAP", swap)):
    a, b, c = kak_decompose(u).canonical_params
    print(f"{name:9s} (a, b, c) / (pi/4) = ({a / (np.pi / 4):.3f}, {b / (np.pi / 4):.3f}, {c / (np.pi / 4):.3f})")

rng = np.random.default_rng(0)
u = haar_u4(rng)
d = kak_decompose(u)
circ = kak_to_circuit(d)
print("\nrandom U(4):", circ.cnot_count, "CNOTs,", circ.single_qubit_count, "rotations")
for op in circ:
    print("   ", op.kind.value, op.qubits, "" if op.angle is None else f"{op.angle:+.4f}")

# The circuit matches U up to the global phase stored alongside it.
v = np.exp(1j * circ.meta["global_phase"]) * circ.unitary()
print("max |U - circuit|:", np.max(np.abs(u - v)))

errors = [np.max(np.abs(kak_decompose(w).unitary() - w)) for w in (haar_u4(rng) for _ in range(1000))]
print("1000 random gates, worst reconstruction error:", max(errors))

"""
Random two-qubit echoes
=======================

Each step applies a Haar-random two-qubit unitary and then its inverse, both
compiled to CNOTs and single-qubit rotations. The random rotations scramble
the noise, so the four input states end up with similar fidelities.
"""

import numpy as np

from echotomo import RngStream, build_random_echo, load_noise_model, run_tomography
from echotomo.noise import example_noise_model_path
from echotomo.tomography import average_results

noise = load_noise_model(example_noise_model_path())

c = build_random_echo(1, RngStream(3))
print(f"one step: {c.cnot_count} CNOTs, {c.single_qubit_count} rotations")

print("\nsteps  F(0)    F(1)    F(x)    F(y)    spread")
for n in (1, 2, 3, 5):
    f = average_results(run_tomography(build_random_echo(n, RngStream(s)), noise, shots=None, n_reps=1)
                        for s in range(25))
    v = np.array(list(f.values()))
    print(f"{n:5d}  " + "  ".join(f"{x:.4f}" for x in v) + f"  {v.max() - v.min():.4f}")

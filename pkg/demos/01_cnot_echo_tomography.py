"""
CNOT echo under relaxation noise
================================

Pairs of CNOTs multiply to the identity, so any change to the target qubit
comes from noise. We reconstruct the qubit-0 Bloch map after each echo
length and look at the four input-state fidelities.
"""

import numpy as np

from echotomo import build_cnot_echo, ellipsoid_report, load_noise_model, run_tomography
from echotomo.noise import example_noise_model_path

# The bundled model has plausible magnitudes for a superconducting device,
# not a real calibration.
noise = load_noise_model(example_noise_model_path())
print("T1 (us):", [t * 1e6 for t in noise.t1], " T2 (us):", [t * 1e6 for t in noise.t2])

print("steps   F(0)    F(1)    F(x)    F(y)")
for n in range(0, 21, 4):
    res = run_tomography(build_cnot_echo(n), noise, shots=None, n_reps=1)
    f = res.fidelities
    print(f"{n:5d}  {f['0']:.4f}  {f['1']:.4f}  {f['x']:.4f}  {f['y']:.4f}")

# |0> is the relaxation fixed point and suffers only from depolarizing and
# readout error, so it stays on top. |1> beats the equator here because
# T2 < T1 / 2 on qubit 0.

# The same data, sampled like a real run: 25 repetitions of 8192 shots.
res = run_tomography(build_cnot_echo(10), noise, rng=2022)
print("\nsampled M at 10 steps:\n", np.round(res.map.m, 4))
print("standard errors:\n", np.round(res.m_stderr, 4))

# Incoherent noise leaves M diagonal: the ball shrinks into an ellipsoid
# whose long axis stays on z.
rep = ellipsoid_report(run_tomography(build_cnot_echo(10), noise, shots=None, n_reps=1).map)
print("\nsemi-axes", np.round(rep.semi_axes, 4), "tilt", round(rep.tilt_deg, 6), "deg")

"""
A coherent error rotates the ellipsoid
======================================

A small systematic rotation after every CNOT does not just shrink the Bloch
ball. It also turns it, so the major axis drifts away from z as the echo
gets longer.
"""

import numpy as np

from echotomo import CoherentError, build_cnot_echo, ellipsoid_report, load_noise_model, run_tomography
from echotomo.noise import example_noise_model_path

base = load_noise_model(example_noise_model_path())
noisy = base.with_coherent_error(CoherentError(epsilon=0.05, axis=(1 / np.sqrt(2), 0, 1 / np.sqrt(2))))

print("steps  tilt(incoherent)  tilt(coherent)  F_mean(coherent)")
for n in range(0, 21, 2):
    plain = ellipsoid_report(run_tomography(build_cnot_echo(n), base, shots=None, n_reps=1).map)
    res = run_tomography(build_cnot_echo(n), noisy, shots=None, n_reps=1)
    tilted = ellipsoid_report(res.map)
    print(f"{n:5d}  {plain.tilt_deg:16.3f}  {tilted.tilt_deg:14.3f}  {res.mean_fidelity:16.4f}")

# Step 0 is the identity: all three semi-axes are 1 and the tilt is flagged
# as undefined (reported as 0).
print("\nstep 0 degenerate:", ellipsoid_report(run_tomography(build_cnot_echo(0), noisy, shots=None, n_reps=1).map).degenerate)

# The fidelities now depend strongly on the input state.
res = run_tomography(build_cnot_echo(10), noisy, shots=None, n_reps=1)
print("fidelities at 10 steps:", {k: round(v, 4) for k, v in res.fidelities.items()})

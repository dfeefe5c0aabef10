"""
Twirling the CNOT pairs
=======================

Sandwiching each CNOT pair between a random local unitary and its inverse
leaves the ideal circuit unchanged but averages the coherent error into a
stochastic one. Each twirl draw is a different circuit, so we average over
25 of them.
"""

import numpy as np

from echotomo import CoherentError, RngStream, build_channel, load_noise_model, run_tomography
from echotomo.noise import example_noise_model_path
from echotomo.tomography import average_results

noise = load_noise_model(example_noise_model_path()).with_coherent_error(CoherentError())
n_steps = 10
seeds = range(25)


def summary(fids):
    values = list(fids.values())
    return f"mean {np.mean(values):.4f}  spread {max(values) - min(values):.4f}"


plain = run_tomography(build_channel("cnot", n_steps), noise, shots=None, n_reps=1)
print("plain CNOT echo      ", summary(plain.fidelities))

for kind in ("twirl-u", "twirl-axis"):
    fids = average_results(run_tomography(build_channel(kind, n_steps, RngStream(s)), noise,
                                          shots=None, n_reps=1) for s in seeds)
    print(f"{kind:<21}", summary(fids))

# Random R_x or R_y twirls need four single-qubit gates per step instead of
# twelve and do about as well.
u = build_channel("twirl-u", 1, RngStream(0))
ax = build_channel("twirl-axis", 1, RngStream(0))
print("\nsingle-qubit gates per step:", u.single_qubit_count, "vs", ax.single_qubit_count)

# The same averaging happens inside one tomography run when the channel is a
# callable: every repetition draws a fresh twirl.
res = run_tomography(lambda r: build_channel("twirl-u", n_steps, r), noise, shots=None,
                     n_reps=25, rng=RngStream(7))
print("fresh twirl per repetition:", summary(res.fidelities))

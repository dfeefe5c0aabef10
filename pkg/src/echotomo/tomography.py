"""Single-qubit process tomography of the echo channels.

The qubit-0 channel acts on Bloch vectors as ``r -> M r + c``. Preparing
``|0>, |1>, |x>, |y>`` (ancilla in ``|0>``) and measuring the output
polarization along x, y and z (12 experiments) fixes all 12 parameters by
linear inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .channels import measure_polarization, simulate
from .circuit import Circuit
from .gates import RngStream, as_generator
from .linalg import density_from_statevector
from .noise import KrausSet, NoiseModel, apply_kraus

DEFAULT_SHOTS = 8192
DEFAULT_REPS = 25
DEGENERACY_TOL = 1e-9

STATE_LABELS = ("0", "1", "x", "y")
INPUT_STATES = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "x": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "y": np.array([1, 1j], dtype=complex) / math.sqrt(2),
}
INPUT_BLOCH = {
    "0": np.array([0.0, 0.0, 1.0]),
    "1": np.array([0.0, 0.0, -1.0]),
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
}
_ANCILLA = np.array([1, 0], dtype=complex)

Channel = Union[Circuit, KrausSet, Callable[[RngStream], Circuit]]


@dataclass(frozen=True, eq=False)
class AffineMap:
    """Bloch-ball action ``r -> m r + c`` (9 + 3 = 12 real parameters)."""

    m: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float).reshape(3, 3)
        c = np.array(self.c, dtype=float).reshape(3)
        m.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "c", c)

    n_params = 12

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(np.eye(3), np.zeros(3))

    def apply(self, r) -> np.ndarray:
        return self.m @ np.asarray(r, dtype=float) + self.c

    def parameters(self) -> np.ndarray:
        return np.concatenate([self.m.reshape(-1), self.c])


@dataclass(frozen=True, eq=False)
class TomographyResult:
    """Reconstructed map and per-state diagnostics.

    ``fidelities`` are clamped to [0, 1]; ``raw_fidelities`` keep the
    unclamped values. Standard errors are over the repetition means.
    """

    map: AffineMap
    fidelities: dict
    raw_fidelities: dict
    bloch: dict
    bloch_stderr: dict
    m_stderr: np.ndarray
    c_stderr: np.ndarray
    n_reps: int
    shots: int | None
    samples: np.ndarray = field(repr=False, default=None)

    @property
    def mean_fidelity(self) -> float:
        return float(np.mean([self.fidelities[s] for s in STATE_LABELS]))

    @property
    def fidelity_spread(self) -> float:
        values = [self.fidelities[s] for s in STATE_LABELS]
        return float(max(values) - min(values))


@dataclass(frozen=True, eq=False)
class EllipsoidReport:
    """Geometry of the image of the Bloch ball.

    ``principal_axes[i]`` is the unit direction of ``semi_axes[i]``.
    ``degenerate`` is set when the two largest semi-axes tie, in which case
    ``tilt_deg`` is reported as 0.
    """

    semi_axes: np.ndarray
    principal_axes: np.ndarray
    center: np.ndarray
    tilt_deg: float
    degenerate: bool


def reconstruct_affine(out_bloch: dict) -> AffineMap:
    """Linear inversion from the output Bloch vectors of ``|0>, |1>, |x>, |y>``."""
    r0, r1, rx, ry = (np.asarray(out_bloch[s], dtype=float) for s in STATE_LABELS)
    c = (r0 + r1) / 2
    m = np.column_stack([rx - c, ry - c, (r0 - r1) / 2])
    return AffineMap(m, c)


def fidelity(state: str, out_bloch, clamp: bool = True) -> float:
    """``<psi|rho|psi> = (1 + r_in . r_out) / 2`` for one of the four inputs."""
    f = 0.5 * (1 + float(INPUT_BLOCH[state] @ np.asarray(out_bloch, dtype=float)))
    return min(max(f, 0.0), 1.0) if clamp else f


def ellipsoid_report(amap: AffineMap) -> EllipsoidReport:
    u, s, _ = np.linalg.svd(amap.m)
    axes = u.T.copy()
    degenerate = bool(s[0] - s[1] <= DEGENERACY_TOL)
    if degenerate:
        tilt = 0.0
    else:
        major = axes[0]
        tilt = math.degrees(math.atan2(math.hypot(major[0], major[1]), abs(major[2])))
    return EllipsoidReport(s, axes, amap.c.copy(), tilt, degenerate)


def _as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(0 if rng is None else int(rng))
    return RngStream(int(as_generator(rng).integers(2**63)))


def _input_state(label: str, two_qubit: bool) -> np.ndarray:
    psi = INPUT_STATES[label]
    return density_from_statevector(np.kron(psi, _ANCILLA) if two_qubit else psi)


def _output_states(channel, noise: NoiseModel | None, rng: RngStream) -> dict:
    if isinstance(channel, KrausSet):
        two = channel.dim == 4
        return {s: apply_kraus(_input_state(s, two), channel) for s in STATE_LABELS}
    circuit = channel if isinstance(channel, Circuit) else channel(rng)
    return {s: simulate(circuit, _input_state(s, True), noise) for s in STATE_LABELS}


def run_tomography(channel: Channel, noise: NoiseModel | None = None, shots: int | None = DEFAULT_SHOTS,
                   n_reps: int = DEFAULT_REPS, rng=None) -> TomographyResult:
    """Run the 12 experiments ``n_reps`` times and reconstruct the qubit-0 map.

    Args:
        channel: a :class:`Circuit`, a :class:`KrausSet` applied directly
            (2x2 operators act on qubit 0 alone), or a callable mapping an
            :class:`RngStream` to a fresh circuit for every repetition.
        noise: noise model for the simulator and readout; ``None`` is ideal.
        shots: measurement runs per experiment; ``None`` for exact expectations.
        n_reps: number of repetitions averaged.
        rng: :class:`RngStream` or integer seed. Repetition ``i`` uses
            ``rng.child(i)`` so results do not depend on evaluation order.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be at least 1")
    stream = _as_stream(rng)
    fixed = not callable(channel) or isinstance(channel, (Circuit, KrausSet))
    samples = np.empty((n_reps, len(STATE_LABELS), 3))
    states = None
    for rep in range(n_reps):
        rep_rng = stream.child(rep)
        if states is None or not fixed:
            states = _output_states(channel, noise, rep_rng.child(0))
        if shots is None and fixed and rep > 0:
            samples[rep] = samples[0]
            continue
        shot_gen = rep_rng.child(1).generator
        for i, label in enumerate(STATE_LABELS):
            for j, axis in enumerate("xyz"):
                samples[rep, i, j] = measure_polarization(states[label], axis, shots, noise, shot_gen)
    return _summarize(samples, shots)


def _summarize(samples: np.ndarray, shots: int | None) -> TomographyResult:
    n_reps = samples.shape[0]
    mean = samples.mean(axis=0)
    if n_reps > 1:
        stderr = samples.std(axis=0, ddof=1) / math.sqrt(n_reps)
    else:
        stderr = np.full_like(mean, np.nan)
    bloch = {s: mean[i] for i, s in enumerate(STATE_LABELS)}
    se = {s: stderr[i] for i, s in enumerate(STATE_LABELS)}
    amap = reconstruct_affine(bloch)
    c_err = np.hypot(se["0"], se["1"]) / 2
    m_err = np.column_stack([np.hypot(se["x"], c_err), np.hypot(se["y"], c_err), c_err])
    raw = {s: fidelity(s, bloch[s], clamp=False) for s in STATE_LABELS}
    clamped = {s: min(max(f, 0.0), 1.0) for s, f in raw.items()}
    return TomographyResult(amap, clamped, raw, bloch, se, m_err, c_err, n_reps, shots, samples)


def forward_bloch(amap: AffineMap) -> dict:
    """Output Bloch vectors the four inputs would have under ``amap``."""
    return {s: amap.apply(INPUT_BLOCH[s]) for s in STATE_LABELS}


def average_results(results) -> dict:
    """Mean per-state fidelities over several tomography results (e.g. twirl seeds)."""
    results = list(results)
    return {s: float(np.mean([r.fidelities[s] for r in results])) for s in STATE_LABELS}

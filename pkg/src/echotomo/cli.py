"""Experiment runner: fidelity and ellipsoid data versus echo length.

Example::

    python -m echotomo --channel cnot --steps 0..20 --exact --out cnot.csv
    python -m echotomo --channel twirl-u --steps 0,5,10 --coherent-eps 0.05 \\
        --coherent-axis 1,0,1 --format json --out twirl.json

Exit status: 0 success, 2 bad arguments, 3 invalid noise model, 4 I/O error.
``ECHOTOMO_WORKERS`` sets the number of worker processes (default 1).
"""

from __future__ import annotations

import argparse
import csv
import functools
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .channels import build_channel
from .circuit import ChannelKind
from .gates import RngStream
from .noise import (AttachMode, CoherentError, NoiseModel, NoiseModelError, example_noise_model_path,
                    load_noise_model, noise_model_to_dict)
from .tomography import DEFAULT_REPS, DEFAULT_SHOTS, STATE_LABELS, ellipsoid_report, run_tomography

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_NOISE, EXIT_IO = 0, 2, 3, 4
WORKERS_ENV = "ECHOTOMO_WORKERS"

COLUMNS = (
    ["n_steps"]
    + [f"F_{s}" for s in STATE_LABELS] + ["F_mean", "F_spread"]
    + [f"m_{i}{j}" for i in range(3) for j in range(3)]
    + ["c_x", "c_y", "c_z"]
    + ["semi_axis_1", "semi_axis_2", "semi_axis_3", "tilt_deg", "degenerate"]
    + [f"m_{i}{j}_se" for i in range(3) for j in range(3)]
    + ["c_x_se", "c_y_se", "c_z_se"]
    + [f"F_{s}_raw" for s in STATE_LABELS]
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep over echo lengths. ``shots=None`` selects exact expectations.

    ``noise_config_path`` is ``None`` for the bundled example model and the
    string ``"none"`` for a noiseless run. ``coherent`` overrides the file's
    coherent-error entry.
    """

    channel_kind: ChannelKind = ChannelKind.CNOT_ECHO
    steps_list: tuple[int, ...] = tuple(range(21))
    shots: int | None = DEFAULT_SHOTS
    n_reps: int = DEFAULT_REPS
    seed: int = 0
    noise_config_path: str | None = None
    coherent: CoherentError | None = None
    output_path: str | None = None
    output_format: str = "csv"
    control: int = 0

    def __post_init__(self):
        object.__setattr__(self, "channel_kind", ChannelKind(self.channel_kind))
        steps = tuple(int(s) for s in self.steps_list)
        if not steps:
            raise ConfigError("steps list is empty")
        if any(s < 0 for s in steps) or any(b <= a for a, b in zip(steps, steps[1:])):
            raise ConfigError("steps must be non-negative and strictly increasing")
        object.__setattr__(self, "steps_list", steps)
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be at least 1")
        if self.n_reps < 1:
            raise ConfigError("reps must be at least 1")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.control not in (0, 1):
            raise ConfigError("control must be 0 or 1")


def parse_steps(text: str) -> tuple[int, ...]:
    """``"A..B"`` (inclusive) or a comma-separated list."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"cannot parse steps {text!r}") from None


def resolve_noise(cfg: ExperimentConfig) -> NoiseModel | None:
    """Load the configured noise model and apply the coherent-error override."""
    path = cfg.noise_config_path
    if path is not None and path.lower() == "none":
        noise = None
    else:
        noise = load_noise_model(example_noise_model_path() if path is None else path)
    if cfg.coherent is not None:
        noise = (noise or NoiseModel.ideal()).with_coherent_error(cfg.coherent)
    return noise


def _build(kind: ChannelKind, n_steps: int, control: int, rng: RngStream):
    if kind is ChannelKind.RANDOM_ECHO:
        return build_channel(kind, n_steps, rng)
    return build_channel(kind, n_steps, rng, control=control)


def run_step(cfg: ExperimentConfig, noise: NoiseModel | None, n_steps: int) -> dict:
    """Tomography at one echo length; the RNG depends only on ``(seed, n_steps)``."""
    rng = RngStream(cfg.seed).child(n_steps)
    if cfg.channel_kind is ChannelKind.CNOT_ECHO:
        channel = build_channel(cfg.channel_kind, n_steps, control=cfg.control)
    else:
        channel = functools.partial(_build, cfg.channel_kind, n_steps, cfg.control)
    result = run_tomography(channel, noise, cfg.shots, cfg.n_reps, rng)
    report = ellipsoid_report(result.map)
    rec = {"n_steps": n_steps}
    rec.update({f"F_{s}": result.fidelities[s] for s in STATE_LABELS})
    rec["F_mean"] = result.mean_fidelity
    rec["F_spread"] = result.fidelity_spread
    rec.update({f"m_{i}{j}": float(result.map.m[i, j]) for i in range(3) for j in range(3)})
    rec.update({f"c_{a}": float(v) for a, v in zip("xyz", result.map.c)})
    rec.update({f"semi_axis_{k + 1}": float(v) for k, v in enumerate(report.semi_axes)})
    rec["tilt_deg"] = report.tilt_deg
    rec["degenerate"] = int(report.degenerate)
    rec.update({f"m_{i}{j}_se": float(result.m_stderr[i, j]) for i in range(3) for j in range(3)})
    rec.update({f"c_{a}_se": float(v) for a, v in zip("xyz", result.c_stderr)})
    rec.update({f"F_{s}_raw": result.raw_fidelities[s] for s in STATE_LABELS})
    return rec


def _workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def compute_records(cfg: ExperimentConfig, noise: NoiseModel | None) -> list[dict]:
    workers = _workers()
    task = functools.partial(run_step, cfg, noise)
    if workers == 1 or len(cfg.steps_list) == 1:
        return [task(n) for n in cfg.steps_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, cfg.steps_list))


def config_dict(cfg: ExperimentConfig, noise: NoiseModel | None) -> dict:
    d = asdict(cfg)
    d["channel_kind"] = cfg.channel_kind.value
    d["steps_list"] = list(cfg.steps_list)
    d.pop("output_path")
    d.pop("coherent")
    d["noise"] = None if noise is None else noise_model_to_dict(noise)
    return d


def config_hash(cfg: ExperimentConfig, noise: NoiseModel | None) -> str:
    blob = json.dumps(config_dict(cfg, noise), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def format_csv(records: list[dict], cfg: ExperimentConfig, noise: NoiseModel | None) -> str:
    buf = io.StringIO()
    buf.write(f"# echotomo schema={SCHEMA_VERSION} channel={cfg.channel_kind.value} "
              f"seed={cfg.seed} config_hash={config_hash(cfg, noise)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for rec in records:
        writer.writerow([repr(float(rec[c])) if c not in ("n_steps", "degenerate") else rec[c] for c in COLUMNS])
    return buf.getvalue()


def _json_safe(v):
    return None if isinstance(v, float) and math.isnan(v) else v


def format_json(records: list[dict], cfg: ExperimentConfig, noise: NoiseModel | None) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config_hash": config_hash(cfg, noise),
        "config": config_dict(cfg, noise),
        "columns": list(COLUMNS),
        "records": [{k: _json_safe(rec[k]) for k in COLUMNS} for rec in records],
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def read_records(path: str | os.PathLike) -> list[dict]:
    """Load records written by :func:`run_experiment` (CSV or JSON)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return [{k: (math.nan if v is None else v) for k, v in rec.items()}
                for rec in json.loads(text)["records"]]
    rows = csv.DictReader(line for line in text.splitlines() if not line.startswith("#"))
    return [{k: (int(v) if k in ("n_steps", "degenerate") else float(v)) for k, v in row.items()} for row in rows]


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory and rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, cfg: ExperimentConfig) -> int:
    if cfg.output_path is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        write_atomic(cfg.output_path, text)
    except OSError as exc:
        print(f"error: cannot write {cfg.output_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _load_noise_or_exit(cfg: ExperimentConfig):
    try:
        return resolve_noise(cfg), EXIT_OK
    except NoiseModelError as exc:
        print(f"error: invalid noise model: {exc}", file=sys.stderr)
        return None, EXIT_NOISE
    except OSError as exc:
        print(f"error: cannot read noise model: {exc}", file=sys.stderr)
        return None, EXIT_IO


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run the sweep and write one record per step; returns the exit status."""
    noise, status = _load_noise_or_exit(cfg)
    if status:
        return status
    records = compute_records(cfg, noise)
    fmt = format_csv if cfg.output_format == "csv" else format_json
    return _emit(fmt(records, cfg, noise), cfg)


def _spread(rec: dict) -> float:
    values = [rec[f"F_{s}"] for s in STATE_LABELS]
    return max(values) - min(values)


def compare_channels(base: ExperimentConfig, other: ExperimentConfig) -> dict:
    """Per-step ``F_mean(other) - F_mean(base)`` and each channel's state spread.

    The two configurations must differ only in ``channel_kind``.
    """
    if replace(other, channel_kind=base.channel_kind) != base:
        raise ConfigError("configurations must differ only in channel kind")
    noise = resolve_noise(base)
    rec_a = compute_records(base, noise)
    rec_b = compute_records(other, noise)
    return {
        "base": base.channel_kind.value,
        "other": other.channel_kind.value,
        "n_steps": list(base.steps_list),
        "mean_fidelity_difference": [b["F_mean"] - a["F_mean"] for a, b in zip(rec_a, rec_b)],
        "spread_base": [_spread(a) for a in rec_a],
        "spread_other": [_spread(b) for b in rec_b],
    }


def _axis(text: str) -> tuple[float, float, float]:
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise ConfigError(f"cannot parse axis {text!r}") from None
    if v.size != 3 or not np.linalg.norm(v) > 0:
        raise ConfigError("axis needs three components, not all zero")
    return tuple(v / np.linalg.norm(v))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="echotomo", description=__doc__.split("\n\n")[0])
    p.add_argument("--channel", choices=[k.value for k in ChannelKind], default="cnot")
    p.add_argument("--steps", default="0..20", help="A..B (inclusive) or comma list")
    shots = p.add_mutually_exclusive_group()
    shots.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    shots.add_argument("--exact", action="store_true", help="exact expectations, no sampling")
    p.add_argument("--reps", type=int, default=DEFAULT_REPS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", default=None, help="noise-model JSON file, or 'none' (default: bundled example)")
    p.add_argument("--coherent-eps", type=float, default=None, metavar="RAD")
    p.add_argument("--coherent-axis", default=None, metavar="X,Y,Z")
    p.add_argument("--coherent-attach", choices=[m.value for m in AttachMode], default="both")
    p.add_argument("--control", type=int, choices=(0, 1), default=0, help="CNOT control qubit")
    p.add_argument("--compare-with", choices=[k.value for k in ChannelKind], default=None,
                   help="also run this channel and write a comparison summary (JSON) instead")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    coherent = None
    if args.coherent_eps is not None or args.coherent_axis is not None:
        coherent = CoherentError(
            epsilon=0.05 if args.coherent_eps is None else args.coherent_eps,
            axis=CoherentError().axis if args.coherent_axis is None else _axis(args.coherent_axis),
            attach=AttachMode(args.coherent_attach),
        )
    return ExperimentConfig(
        channel_kind=ChannelKind(args.channel),
        steps_list=parse_steps(args.steps),
        shots=None if args.exact else args.shots,
        n_reps=args.reps,
        seed=args.seed,
        noise_config_path=args.noise,
        coherent=coherent,
        output_path=args.out,
        output_format=args.format,
        control=args.control,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, NoiseModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.compare_with is None:
        return run_experiment(cfg)
    noise, status = _load_noise_or_exit(cfg)
    if status:
        return status
    summary = compare_channels(cfg, replace(cfg, channel_kind=ChannelKind(args.compare_with)))
    return _emit(json.dumps(summary, indent=1) + "\n", cfg)


if __name__ == "__main__":
    sys.exit(main())

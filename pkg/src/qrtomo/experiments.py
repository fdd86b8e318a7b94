"""Config-driven experiment runs: tomography, memory sweeps, spectral sweeps.

A single JSON document configures each run; unknown keys are a hard error
so sweep typos cannot pass silently.  Every random draw derives from the
seed list, making output files byte-stable across reruns.  Results are
emitted as a CSV plus a JSON sidecar carrying the full config echo, seeds
and library version.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from . import __version__
from .channels import (
    EntanglerParams,
    TemporalMapSpec,
    apply_temporal_map,
    generate_bit_stream,
    generate_input_stream,
    random_entangler_params,
)
from .metrics import MemoryProfile, fidelity_batch, memory_profile
from .qcore import haar_random_pure, make_rng, negativity
from .readout import baseline_features, fit_ridge, predict_states, vectorize_density
from .reservoir import ReservoirConfig, ReservoirOps, ReservoirState, run_sequence
from .spectral import ensemble_reports


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the offending field name."""

    def __init__(self, fld: str, message: str):
        self.field = fld
        super().__init__(f"{fld}: {message}")


@dataclass
class StreamSpec:
    washout: int = 0
    train: int = 1
    evaluate: int = 1
    hold_steps: int = 1
    seeds: tuple = (0,)

    @property
    def total(self) -> int:
        return self.washout + self.train + self.evaluate


@dataclass
class ExperimentConfig:
    reservoir: ReservoirConfig
    stream: StreamSpec
    task: TemporalMapSpec | None = None
    ridge: float = 1e-10
    output_path: str | None = None
    d_max: int = 10
    spectral_samples: int = 100
    sweep: dict | None = None


_TOP_KEYS = {"task", "reservoir", "stream", "ridge", "output_path", "memory", "spectral", "sweep"}
_TASK_KEYS = {"kind", "delays", "weights", "entangler"}
_ENTANGLER_KEYS = {"h12", "g1", "g2", "t"}
_RESERVOIR_KEYS = {"n_m", "n_e", "tau_b", "alpha", "j_strength", "b_field",
                   "multiplexity", "observable_set"}
_STREAM_KEYS = {"washout", "train", "eval", "hold_steps", "seeds"}
_MEMORY_KEYS = {"d_max"}
_SPECTRAL_KEYS = {"samples"}


def _reject_unknown(section: dict, allowed: set, where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}", "unknown key")


def load_config(source) -> ExperimentConfig:
    """Parse and validate a config dict or JSON file path."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        raw = source
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "config")
    if "reservoir" not in raw:
        raise ConfigError("reservoir", "section missing")
    _reject_unknown(raw["reservoir"], _RESERVOIR_KEYS, "reservoir")
    try:
        reservoir = ReservoirConfig(**raw["reservoir"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("reservoir", str(exc)) from exc

    stream_raw = dict(raw.get("stream", {}))
    _reject_unknown(stream_raw, _STREAM_KEYS, "stream")
    if "eval" in stream_raw:
        stream_raw["evaluate"] = stream_raw.pop("eval")
    if "seeds" in stream_raw:
        stream_raw["seeds"] = tuple(int(s) for s in stream_raw["seeds"])
    try:
        stream = StreamSpec(**stream_raw)
    except TypeError as exc:
        raise ConfigError("stream", str(exc)) from exc
    if len(stream.seeds) == 0:
        raise ConfigError("stream.seeds", "seed list must be non-empty")
    if stream.hold_steps < 1:
        raise ConfigError("stream.hold_steps", "must be >= 1")

    task = None
    if "task" in raw:
        task_raw = dict(raw["task"])
        _reject_unknown(task_raw, _TASK_KEYS, "task")
        ent = None
        if task_raw.get("entangler") is not None:
            _reject_unknown(task_raw["entangler"], _ENTANGLER_KEYS, "task.entangler")
            ent = EntanglerParams(**task_raw["entangler"])
        try:
            task = TemporalMapSpec(
                kind=task_raw.get("kind", ""),
                delays=tuple(task_raw.get("delays", ())),
                weights=task_raw.get("weights"),
                entangler=ent,
            )
        except ValueError as exc:
            raise ConfigError("task", str(exc)) from exc

    memory_raw = dict(raw.get("memory", {}))
    _reject_unknown(memory_raw, _MEMORY_KEYS, "memory")
    spectral_raw = dict(raw.get("spectral", {}))
    _reject_unknown(spectral_raw, _SPECTRAL_KEYS, "spectral")

    sweep = raw.get("sweep")
    if sweep is not None:
        for key, values in sweep.items():
            if key not in _RESERVOIR_KEYS:
                raise ConfigError(f"sweep.{key}", "not a reservoir parameter")
            if not isinstance(values, (list, tuple)) or len(values) == 0:
                raise ConfigError(f"sweep.{key}", "must be a non-empty list")

    ridge = float(raw.get("ridge", 1e-10))
    if ridge < 0.0:
        raise ConfigError("ridge", "must be >= 0")
    return ExperimentConfig(
        reservoir=reservoir,
        stream=stream,
        task=task,
        ridge=ridge,
        output_path=raw.get("output_path"),
        d_max=int(memory_raw.get("d_max", 10)),
        spectral_samples=int(spectral_raw.get("samples", 100)),
        sweep=dict(sweep) if sweep else None,
    )


def config_echo(config: ExperimentConfig) -> dict:
    task = None
    if config.task is not None:
        task = {
            "kind": config.task.kind,
            "delays": list(config.task.delays),
            "weights": None if config.task.weights is None else
                       [float(w) for w in config.task.weights],
            "entangler": None if config.task.entangler is None else {
                "h12": config.task.entangler.h12, "g1": config.task.entangler.g1,
                "g2": config.task.entangler.g2, "t": config.task.entangler.t,
            },
        }
    r = config.reservoir
    return {
        "task": task,
        "reservoir": {
            "n_m": r.n_m, "n_e": r.n_e, "tau_b": r.tau_b, "alpha": r.alpha,
            "j_strength": r.j_strength, "b_field": r.b_field,
            "multiplexity": r.multiplexity, "observable_set": r.observable_set,
        },
        "stream": {
            "washout": config.stream.washout, "train": config.stream.train,
            "eval": config.stream.evaluate, "hold_steps": config.stream.hold_steps,
            "seeds": list(config.stream.seeds),
        },
        "ridge": config.ridge,
        "memory": {"d_max": config.d_max},
        "spectral": {"samples": config.spectral_samples},
        "sweep": config.sweep,
        "output_path": config.output_path,
    }


@dataclass
class RunResult:
    seed: int
    task_kind: str
    fidelities: np.ndarray
    rmsf: float
    error: float
    wall_time: float
    eval_start: int
    negativity_target: np.ndarray | None = None
    negativity_pred: np.ndarray | None = None
    entangler: EntanglerParams | None = None


@dataclass
class TomographyOutcome:
    runs: list
    error_mean: float
    error_sd: float
    baseline: bool
    config: ExperimentConfig


def _validate_tomography(config: ExperimentConfig) -> None:
    if config.task is None:
        raise ConfigError("task", "tomography run needs a task section")
    if config.stream.train < 1:
        raise ConfigError("stream.train", "training window must be >= 1")
    if config.stream.evaluate < 1:
        raise ConfigError("stream.eval", "evaluation window must be >= 1")
    if config.stream.washout < config.task.max_delay:
        raise ConfigError(
            "stream.washout",
            f"washout {config.stream.washout} below max delay {config.task.max_delay}",
        )
    if config.task.kind in ("entangler", "bell_creator", "quantum_switch") \
            and config.reservoir.n_e != 1:
        raise ConfigError("reservoir.n_e", f"{config.task.kind} task expects n_e = 1")


def _single_tomography_run(config: ExperimentConfig, seed: int, baseline: bool,
                           ops: ReservoirOps | None) -> RunResult:
    t0 = time.perf_counter()
    rcfg = config.reservoir
    stream_spec = config.stream
    task = config.task
    rng = make_rng(seed)
    # draw order is fixed: initial state, entangler params, then the stream,
    # so baseline and reservoir modes see identical targets per seed
    init = ReservoirState(haar_random_pure(rcfg.dim_s, rng), 0)
    if task.kind == "entangler" and task.entangler is None:
        task = TemporalMapSpec(kind=task.kind, delays=task.delays,
                               entangler=random_entangler_params(rng))
    if task.kind == "bell_creator":
        stream = generate_bit_stream(stream_spec.total, rng)
    else:
        stream = generate_input_stream(
            stream_spec.total, rcfg.n_e, stream_spec.hold_steps, rng
        )
    if baseline:
        features = baseline_features(stream.betas)
    else:
        features, _ = run_sequence(stream.betas, rcfg, initial=init, ops=ops)
    targets = np.stack([
        apply_temporal_map(task, stream, n)
        for n in range(stream_spec.washout, stream_spec.total)
    ])
    y = np.stack([vectorize_density(t) for t in targets])
    train_rows = slice(stream_spec.washout, stream_spec.washout + stream_spec.train)
    eval_rows = slice(stream_spec.washout + stream_spec.train, stream_spec.total)
    model = fit_ridge(features[train_rows], y[:stream_spec.train], config.ridge)
    preds = predict_states(model, features[eval_rows])
    eval_targets = targets[stream_spec.train:]
    fids = fidelity_batch(eval_targets, preds)
    rms = float(np.sqrt(np.mean(fids ** 2)))
    neg_t = neg_p = None
    if task.kind in ("entangler", "bell_creator"):
        neg_t = np.array([negativity(s, 2) for s in eval_targets])
        neg_p = np.array([negativity(s, 2) for s in preds])
    return RunResult(
        seed=seed,
        task_kind=task.kind,
        fidelities=fids,
        rmsf=rms,
        error=1.0 - rms,
        wall_time=time.perf_counter() - t0,
        eval_start=stream_spec.washout + stream_spec.train,
        negativity_target=neg_t,
        negativity_pred=neg_p,
        entangler=task.entangler if task.kind == "entangler" else None,
    )


def run_tomography(config: ExperimentConfig, baseline: bool = False) -> TomographyOutcome:
    """Train and evaluate the readout on the configured task, per seed."""
    _validate_tomography(config)
    ops = None if baseline else ReservoirOps(config.reservoir)
    runs = [
        _single_tomography_run(config, seed, baseline, ops)
        for seed in config.stream.seeds
    ]
    errors = np.array([r.error for r in runs])
    sd = float(errors.std(ddof=1)) if errors.size > 1 else 0.0
    return TomographyOutcome(
        runs=runs, error_mean=float(errors.mean()), error_sd=sd,
        baseline=baseline, config=config,
    )


def _grid_points(config: ExperimentConfig) -> list[dict]:
    if not config.sweep:
        return [{}]
    keys = sorted(config.sweep)
    return [dict(zip(keys, combo)) for combo in product(*(config.sweep[k] for k in keys))]


def _override_reservoir(base: ReservoirConfig, point: dict) -> ReservoirConfig:
    fields = {
        "n_m": base.n_m, "n_e": base.n_e, "tau_b": base.tau_b, "alpha": base.alpha,
        "j_strength": base.j_strength, "b_field": base.b_field,
        "multiplexity": base.multiplexity, "observable_set": base.observable_set,
    }
    fields.update(point)
    return ReservoirConfig(**fields)


@dataclass
class MemorySweepPoint:
    grid: dict
    qmc_mean: float
    qmc_sd: float
    r2_mean: np.ndarray
    r2_sd: np.ndarray
    profiles: list = field(default_factory=list)


@dataclass
class MemorySweepOutcome:
    points: list
    config: ExperimentConfig

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def run_memory_sweep(config: ExperimentConfig) -> MemorySweepOutcome:
    """Delay-reconstruction memory profiles over the sweep grid.

    Each grid point averages the per-delay R^2 over the seed list; one
    reservoir feature pass per seed is shared by all delays.
    """
    if config.stream.washout < config.d_max:
        raise ConfigError("stream.washout", f"must cover d_max {config.d_max}")
    if config.stream.evaluate < 2:
        raise ConfigError("stream.eval", "memory scoring needs >= 2 eval steps")
    points = []
    for point in _grid_points(config):
        rcfg = _override_reservoir(config.reservoir, point)
        ops = ReservoirOps(rcfg)
        profiles = []
        for seed in config.stream.seeds:
            rng = make_rng(seed)
            init = ReservoirState(haar_random_pure(rcfg.dim_s, rng), 0)
            stream = generate_input_stream(
                config.stream.total, rcfg.n_e, config.stream.hold_steps, rng
            )
            features, _ = run_sequence(stream.betas, rcfg, initial=init, ops=ops)
            profiles.append(memory_profile(
                features, stream.betas, config.d_max,
                config.stream.washout, config.stream.train, config.ridge,
            ))
        r2 = np.stack([p.r2_by_delay for p in profiles])
        qmc = np.array([p.qmc for p in profiles])
        points.append(MemorySweepPoint(
            grid=point,
            qmc_mean=float(qmc.mean()),
            qmc_sd=float(qmc.std(ddof=1)) if qmc.size > 1 else 0.0,
            r2_mean=r2.mean(axis=0),
            r2_sd=r2.std(axis=0, ddof=1) if r2.shape[0] > 1 else np.zeros(r2.shape[1]),
            profiles=profiles,
        ))
    return MemorySweepOutcome(points=points, config=config)


@dataclass
class SpectralSweepPoint:
    grid: dict
    inv_lambda2_median: float
    inv_lambda2_mean: float
    inv_lambda2_sd: float
    ratio_mean_median: float
    ratio_mean_mean: float
    ratio_mean_sd: float


@dataclass
class SpectralSweepOutcome:
    points: list
    config: ExperimentConfig

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def run_spectral_sweep(config: ExperimentConfig) -> SpectralSweepOutcome:
    """Ensemble eigenvalue statistics over Haar-random inputs per grid point."""
    if config.spectral_samples < 1:
        raise ConfigError("spectral.samples", "must be >= 1")
    points = []
    seed0 = config.stream.seeds[0]
    for idx, point in enumerate(_grid_points(config)):
        rcfg = _override_reservoir(config.reservoir, point)
        rng = make_rng((seed0, idx))
        reports = ensemble_reports(rcfg, config.spectral_samples, rng)
        inv2 = np.array([r.inv_lambda2 for r in reports])
        ratios = np.array([r.ratio_mean for r in reports])
        points.append(SpectralSweepPoint(
            grid=point,
            inv_lambda2_median=float(np.median(inv2)),
            inv_lambda2_mean=float(inv2.mean()),
            inv_lambda2_sd=float(inv2.std(ddof=1)) if inv2.size > 1 else 0.0,
            ratio_mean_median=float(np.median(ratios)),
            ratio_mean_mean=float(ratios.mean()),
            ratio_mean_sd=float(ratios.std(ddof=1)) if ratios.size > 1 else 0.0,
        ))
    return SpectralSweepOutcome(points=points, config=config)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_safe(value):
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    return value


def _sidecar_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".json") if csv_path.suffix == ".csv" \
        else csv_path.with_name(csv_path.name + ".json")


def _write_sidecar(csv_path: Path, config: ExperimentConfig, summary: dict) -> None:
    payload = {
        "version": __version__,
        "seeds": list(config.stream.seeds),
        "config": config_echo(config),
        "summary": _json_safe(summary),
    }
    with open(_sidecar_path(csv_path), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def emit_results(results, path) -> Path:
    """Write results to CSV plus a JSON sidecar; returns the CSV path.

    Tomography CSVs carry one row per (seed, eval step) with columns
    seed, step, fidelity and, for entangler/bell tasks, negativity_target
    and negativity_pred.  Sweep CSVs carry one row per grid point.  Output
    bytes depend only on the config and seeds.
    """
    csv_path = Path(path)
    if csv_path.parent and not csv_path.parent.exists():
        raise OSError(f"output directory {csv_path.parent} does not exist")
    if isinstance(results, TomographyOutcome):
        _write_tomography(results, csv_path)
    elif isinstance(results, MemorySweepOutcome):
        _write_memory(results, csv_path)
    elif isinstance(results, SpectralSweepOutcome):
        _write_spectral(results, csv_path)
    else:
        raise TypeError(f"cannot emit results of type {type(results)!r}")
    return csv_path


def _write_tomography(outcome: TomographyOutcome, csv_path: Path) -> None:
    with_neg = outcome.runs and outcome.runs[0].negativity_target is not None
    header = ["seed", "step", "fidelity"]
    if with_neg:
        header += ["negativity_target", "negativity_pred"]
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for run in outcome.runs:
            for i, fid in enumerate(run.fidelities):
                row = [str(run.seed), str(run.eval_start + i), _fmt(fid)]
                if with_neg:
                    row += [_fmt(run.negativity_target[i]), _fmt(run.negativity_pred[i])]
                writer.writerow(row)
    summary = {
        "baseline": outcome.baseline,
        "error_mean": outcome.error_mean,
        "error_sd": outcome.error_sd,
        "per_seed": [
            {
                "seed": r.seed, "rmsf": r.rmsf, "error": r.error,
                "entangler": None if r.entangler is None else {
                    "h12": r.entangler.h12, "g1": r.entangler.g1,
                    "g2": r.entangler.g2, "t": r.entangler.t,
                },
            }
            for r in outcome.runs
        ],
    }
    _write_sidecar(csv_path, outcome.config, summary)


def _write_memory(outcome: MemorySweepOutcome, csv_path: Path) -> None:
    points = outcome.points
    grid_keys = sorted(points[0].grid) if points else []
    d_max = points[0].r2_mean.size - 1 if points else outcome.config.d_max
    header = grid_keys + ["qmc_mean", "qmc_sd"]
    header += [f"r2_d{d}_mean" for d in range(d_max + 1)]
    header += [f"r2_d{d}_sd" for d in range(d_max + 1)]
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for pt in points:
            row = [_fmt(pt.grid[k]) for k in grid_keys]
            row += [_fmt(pt.qmc_mean), _fmt(pt.qmc_sd)]
            row += [_fmt(v) for v in pt.r2_mean]
            row += [_fmt(v) for v in pt.r2_sd]
            writer.writerow(row)
    summary = {
        "points": [
            {"grid": pt.grid, "qmc_mean": pt.qmc_mean, "qmc_sd": pt.qmc_sd}
            for pt in points
        ],
    }
    _write_sidecar(csv_path, outcome.config, summary)


def _write_spectral(outcome: SpectralSweepOutcome, csv_path: Path) -> None:
    points = outcome.points
    grid_keys = sorted(points[0].grid) if points else []
    header = grid_keys + [
        "inv_lambda2_median", "inv_lambda2_mean", "inv_lambda2_sd",
        "ratio_mean_median", "ratio_mean_mean", "ratio_mean_sd",
    ]
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for pt in points:
            row = [_fmt(pt.grid[k]) for k in grid_keys]
            row += [
                _fmt(pt.inv_lambda2_median), _fmt(pt.inv_lambda2_mean),
                _fmt(pt.inv_lambda2_sd), _fmt(pt.ratio_mean_median),
                _fmt(pt.ratio_mean_mean), _fmt(pt.ratio_mean_sd),
            ]
            writer.writerow(row)
    summary = {
        "points": [
            {
                "grid": pt.grid,
                "inv_lambda2_median": pt.inv_lambda2_median,
                "ratio_mean_median": pt.ratio_mean_median,
            }
            for pt in points
        ],
    }
    _write_sidecar(csv_path, outcome.config, summary)

"""Batch experiment harness: config files, environment schedules, artifacts.

An experiment is n_runs independent seeded runs of one configuration (run r
uses seed base_seed + r). Each run writes its own artifact directory

    <output_dir>/run_<r>/generations.csv   per-generation metrics
    <output_dir>/run_<r>/population.tsv    final population, one member per line
    <output_dir>/run_<r>/meta              seed, config hash, classification

and the coordinator writes <output_dir>/summary once all runs finish. Runs
are independent, so they can execute in parallel without changing any
output byte.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any

import yaml

from .engine import EcaConfig, Model, RunOutcome, run
from .expr import WORST, Environment, render_prefix


class ConfigError(ValueError):
    """Invalid experiment configuration, with the offending field named."""


@dataclass(frozen=True)
class EnvironmentEvent:
    """Mid-run change of the inputs and/or the target, applied before the
    step whose index equals at_generation."""

    at_generation: int
    inputs: tuple[int, ...] | None = None
    target: int | None = None

    def __post_init__(self) -> None:
        if self.at_generation < 0:
            raise ValueError("at_generation must be >= 0")
        if self.inputs is None and self.target is None:
            raise ValueError("an event must change the inputs or the target")
        if self.inputs is not None:
            object.__setattr__(self, "inputs", tuple(self.inputs))
            if len(self.inputs) < 1:
                raise ValueError("event inputs must be non-empty")


@dataclass(frozen=True)
class EnvironmentSchedule:
    initial: Environment
    events: tuple[EnvironmentEvent, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        gens = [e.at_generation for e in self.events]
        if any(b <= a for a, b in zip(gens, gens[1:])):
            raise ValueError("events must be strictly increasing in at_generation")


def apply_environment_event(env: Environment, event: EnvironmentEvent) -> Environment:
    """New environment with the event's fields substituted. The caller must
    recompute every cached fitness afterwards."""
    inputs = event.inputs if event.inputs is not None else env.inputs
    target = event.target if event.target is not None else env.target
    if len(inputs) < 1:
        raise ValueError("event inputs must be non-empty")
    return Environment(tuple(inputs), target)


@dataclass(frozen=True)
class ExperimentConfig:
    eca: EcaConfig
    schedule: EnvironmentSchedule
    n_runs: int = 1
    base_seed: int = 0
    log_stride: int = 1000
    classify_window: int = 1000
    output_dir: Path = Path("results")

    def __post_init__(self) -> None:
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if self.log_stride < 1:
            raise ValueError("log_stride must be >= 1")
        if self.classify_window < 1:
            raise ValueError("classify_window must be >= 1")


@dataclass(frozen=True)
class ExperimentSummary:
    n_runs: int
    classifications: tuple  # one RunClassification per run, in run order
    fraction_converged: float
    fraction_oscillating: float
    fraction_with_optimum: float
    mean_generation_of_first_optimum: float | None


_ECA_KEYS = {"model", "d_init", "np", "n_gen", "p_m", "lambda", "p_c", "d_max"}
_EXPERIMENT_KEYS = {"n_runs", "base_seed", "log_stride", "classify_window", "output_dir"}


def _require_int(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{field}: expected an integer, got {value!r}")
    return value


def _parse_model(value: Any) -> Model:
    if isinstance(value, str):
        name = value.strip().lower().replace("_", "-")
        for model in Model:
            if model.value == name:
                return model
    raise ConfigError(
        f"eca.model: expected 'generational' or 'steady-state', got {value!r}"
    )


def load_config(path: str | Path) -> ExperimentConfig:
    """Load and validate an experiment config file (YAML, JSON-compatible)."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: not parseable: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    known_sections = {"eca", "environment", "events", "experiment"}
    for key in raw:
        if key not in known_sections:
            raise ConfigError(f"unknown section {key!r}")

    env_raw = raw.get("environment")
    if not isinstance(env_raw, dict):
        raise ConfigError("environment: section is required")
    inputs = env_raw.get("inputs")
    if not isinstance(inputs, list) or not inputs:
        raise ConfigError("environment.inputs: expected a non-empty integer list")
    inputs = tuple(_require_int(v, "environment.inputs") for v in inputs)
    target = _require_int(env_raw.get("target"), "environment.target")
    for key in env_raw:
        if key not in {"inputs", "target"}:
            raise ConfigError(f"environment.{key}: unknown key")

    eca_raw = raw.get("eca")
    if not isinstance(eca_raw, dict) or "model" not in eca_raw:
        raise ConfigError("eca.model: a population model is required")
    for key in eca_raw:
        if key not in _ECA_KEYS:
            raise ConfigError(f"eca.{key}: unknown key")
    kwargs: dict[str, Any] = {"model": _parse_model(eca_raw["model"])}
    for src, dst in (
        ("d_init", "d_init"),
        ("np", "np"),
        ("n_gen", "n_gen"),
        ("lambda", "lambda_"),
        ("d_max", "d_max"),
    ):
        if src in eca_raw:
            kwargs[dst] = _require_int(eca_raw[src], f"eca.{src}")
    for prob in ("p_m", "p_c"):
        if prob in eca_raw:
            value = eca_raw[prob]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"eca.{prob}: expected a probability, got {value!r}")
            kwargs[prob] = float(value)
    try:
        eca = EcaConfig(**kwargs)
    except ValueError as e:
        raise ConfigError(f"eca: {e}") from e

    events: list[EnvironmentEvent] = []
    for i, ev_raw in enumerate(raw.get("events") or []):
        if not isinstance(ev_raw, dict) or "at" not in ev_raw:
            raise ConfigError(f"events[{i}]: expected a mapping with an 'at' key")
        for key in ev_raw:
            if key not in {"at", "inputs", "target"}:
                raise ConfigError(f"events[{i}].{key}: unknown key")
        ev_inputs = ev_raw.get("inputs")
        if ev_inputs is not None:
            if not isinstance(ev_inputs, list) or not ev_inputs:
                raise ConfigError(f"events[{i}].inputs: expected a non-empty integer list")
            ev_inputs = tuple(_require_int(v, f"events[{i}].inputs") for v in ev_inputs)
        ev_target = ev_raw.get("target")
        if ev_target is not None:
            ev_target = _require_int(ev_target, f"events[{i}].target")
        try:
            events.append(
                EnvironmentEvent(
                    at_generation=_require_int(ev_raw["at"], f"events[{i}].at"),
                    inputs=ev_inputs,
                    target=ev_target,
                )
            )
        except ValueError as e:
            raise ConfigError(f"events[{i}]: {e}") from e

    exp_raw = raw.get("experiment") or {}
    if not isinstance(exp_raw, dict):
        raise ConfigError("experiment: expected a mapping")
    for key in exp_raw:
        if key not in _EXPERIMENT_KEYS:
            raise ConfigError(f"experiment.{key}: unknown key")
    exp_kwargs: dict[str, Any] = {}
    for key in ("n_runs", "base_seed", "log_stride", "classify_window"):
        if key in exp_raw:
            exp_kwargs[key] = _require_int(exp_raw[key], f"experiment.{key}")
    if "output_dir" in exp_raw:
        if not isinstance(exp_raw["output_dir"], str):
            raise ConfigError("experiment.output_dir: expected a path string")
        exp_kwargs["output_dir"] = Path(exp_raw["output_dir"])

    try:
        schedule = EnvironmentSchedule(Environment(inputs, target), tuple(events))
    except ValueError as e:
        raise ConfigError(f"events: {e}") from e
    try:
        return ExperimentConfig(eca=eca, schedule=schedule, **exp_kwargs)
    except ValueError as e:
        raise ConfigError(f"experiment: {e}") from e


def config_digest(cfg: ExperimentConfig) -> str:
    """Stable hash of the semantic configuration (everything that affects
    run content; output location excluded)."""
    payload = asdict(cfg)
    payload["eca"]["model"] = cfg.eca.model.value
    del payload["output_dir"]
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _format_fitness(f: int | float) -> str:
    return "INF" if f == WORST else str(int(f))


def write_run_artifacts(
    outcome: RunOutcome,
    directory: str | Path,
    *,
    seed: int | None = None,
    config_hash: str | None = None,
) -> None:
    """Write generations.csv, population.tsv and meta for one run."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)

        with open(directory / "generations.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                [
                    "generation",
                    "best_fitness",
                    "mean_finite_fitness",
                    "distinct_genomes",
                    "mean_pairwise_distance",
                    "worst_count",
                ]
            )
            for rec in outcome.log:
                writer.writerow(
                    [
                        rec.generation,
                        _format_fitness(rec.best_fitness),
                        "" if rec.mean_finite_fitness is None else rec.mean_finite_fitness,
                        rec.distinct_genomes,
                        "" if rec.mean_pairwise_distance is None else rec.mean_pairwise_distance,
                        rec.worst_count,
                    ]
                )

        with open(directory / "population.tsv", "w") as fh:
            for ind in outcome.final_population:
                text = render_prefix(ind.genome, outcome.env_final, strict=False)
                fh.write(f"{_format_fitness(ind.fitness)}\t{text}\n")

        meta = {
            "seed": seed,
            "config_hash": config_hash,
            "classification": outcome.classification.kind.value,
            "generation_of_first_optimum": outcome.classification.generation_of_first_optimum,
            "terminal_diversity": outcome.classification.terminal_diversity,
            "optimum_by_epoch": [list(e) for e in outcome.optimum_by_epoch],
            "final_inputs": list(outcome.env_final.inputs),
            "final_target": outcome.env_final.target,
        }
        with open(directory / "meta", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as e:
        raise OSError(f"writing run artifacts under {directory}: {e}") from e


def execute_run(cfg: ExperimentConfig, run_index: int) -> RunOutcome:
    """Run seed base_seed + run_index and write its artifact directory.

    Self-contained per run: re-executing one index regenerates exactly the
    same bytes regardless of what other runs did.
    """
    seed = cfg.base_seed + run_index
    outcome = run(
        replace(cfg.eca, seed=seed),
        cfg.schedule,
        log_stride=cfg.log_stride,
        classify_window=cfg.classify_window,
    )
    write_run_artifacts(
        outcome,
        cfg.output_dir / f"run_{run_index}",
        seed=seed,
        config_hash=config_digest(cfg),
    )
    return outcome


def _pool_run(cfg: ExperimentConfig, run_index: int):
    outcome = execute_run(cfg, run_index)
    terminal_best = min(ind.fitness for ind in outcome.final_population)
    return outcome.classification, terminal_best == 0


def run_experiment(cfg: ExperimentConfig, max_workers: int | None = None) -> ExperimentSummary:
    """Execute all runs (in parallel when possible) and write the summary."""
    if max_workers is None:
        max_workers = min(cfg.n_runs, os.cpu_count() or 1)
    if max_workers > 1 and cfg.n_runs > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_pool_run, [cfg] * cfg.n_runs, range(cfg.n_runs)))
    else:
        results = [_pool_run(cfg, r) for r in range(cfg.n_runs)]

    classifications = tuple(cls for cls, _ in results)
    kinds = [cls.kind.value for cls in classifications]
    first_opts = [
        cls.generation_of_first_optimum
        for cls in classifications
        if cls.generation_of_first_optimum is not None
    ]
    summary = ExperimentSummary(
        n_runs=cfg.n_runs,
        classifications=classifications,
        fraction_converged=kinds.count("converged") / cfg.n_runs,
        fraction_oscillating=kinds.count("oscillating") / cfg.n_runs,
        fraction_with_optimum=sum(has_opt for _, has_opt in results) / cfg.n_runs,
        mean_generation_of_first_optimum=(
            sum(first_opts) / len(first_opts) if first_opts else None
        ),
    )

    payload = {
        "n_runs": summary.n_runs,
        "base_seed": cfg.base_seed,
        "config_hash": config_digest(cfg),
        "classifications": kinds,
        "generation_of_first_optimum": [
            cls.generation_of_first_optimum for cls in classifications
        ],
        "terminal_diversity": [cls.terminal_diversity for cls in classifications],
        "fraction_converged": summary.fraction_converged,
        "fraction_oscillating": summary.fraction_oscillating,
        "fraction_with_optimum": summary.fraction_with_optimum,
        "mean_generation_of_first_optimum": summary.mean_generation_of_first_optimum,
    }
    try:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        with open(cfg.output_dir / "summary", "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as e:
        raise OSError(f"writing summary under {cfg.output_dir}: {e}") from e
    return summary

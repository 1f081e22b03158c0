"""Evolutionary control loop over populations of prefix-expression genomes.

Two population models:

* generational — every slot is challenged each generation by a trial built
  from crossover (probability ``p_c``) plus mutation; the better of trial
  and incumbent survives, ties going to the trial (elitist survival with
  neutral drift).
* steady-state — ``lambda_`` times per generation a uniformly chosen target
  is replaced by a mutated crossover offspring unconditionally, even when
  the offspring is worse (non-elitist).

Determinism: a run consumes a single ``random.Random`` stream seeded from
the config, in a fixed order. Per generation: due environment events are
applied first, then each offspring draws, in order:

* generational, per slot i: crossover coin, mate index (when the coin
  fires), cut point in the target, cut point in the mate, mutation coin,
  then (when mutating) position, token kind, token value;
* steady-state, per offspring: target index, mate index, both cut points,
  then the same mutation draws.

``random_genome`` during initialization draws length first, then kind and
value per token.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from random import Random
from typing import TYPE_CHECKING

from .diagnostics import (
    GenerationRecord,
    RunClassification,
    classify,
    population_record,
)
from .expr import Environment, Genome, fitness, random_genome, random_token

if TYPE_CHECKING:
    from .experiment import EnvironmentSchedule

DEFAULT_D_MAX = 100


class Model(str, Enum):
    GENERATIONAL = "generational"
    STEADY_STATE = "steady-state"


@dataclass(frozen=True)
class EcaConfig:
    """Control-algorithm settings; the defaults are the standard setup
    (d_init=10, np=10, n_gen=10^6, p_m=0.1, lambda=1, p_c=1.0)."""

    model: Model
    d_init: int = 10
    np: int = 10
    n_gen: int = 1_000_000
    p_m: float = 0.1
    lambda_: int = 1
    p_c: float = 1.0
    d_max: int = DEFAULT_D_MAX
    seed: int = 0

    def __post_init__(self) -> None:
        if self.d_init < 1:
            raise ValueError("d_init must be >= 1")
        if self.np < 1:
            raise ValueError("np must be >= 1")
        if self.n_gen < 0:
            raise ValueError("n_gen must be >= 0")
        if not 0.0 <= self.p_m <= 1.0:
            raise ValueError("p_m must be in [0, 1]")
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError("p_c must be in [0, 1]")
        if not 1 <= self.lambda_ <= self.np:
            raise ValueError("lambda_ must be in [1, np]")
        if self.d_max < 1:
            raise ValueError("d_max must be >= 1")


@dataclass(frozen=True, slots=True)
class Individual:
    genome: Genome
    fitness: int | float


Population = list[Individual]


@dataclass(frozen=True)
class RunOutcome:
    final_population: Population
    log: list[GenerationRecord]
    classification: RunClassification
    env_final: Environment
    #: (epoch start generation, generation the epoch first saw error 0 or None),
    #: one entry per environment epoch in schedule order.
    optimum_by_epoch: tuple[tuple[int, int | None], ...] = ()


def init_population(cfg: EcaConfig, env: Environment, rng: Random) -> Population:
    return [
        Individual(g, fitness(g, env))
        for g in (random_genome(rng, env, cfg.d_init) for _ in range(cfg.np))
    ]


def splice(a: Genome, b: Genome, cut_a: int, cut_b: int, d_max: int = DEFAULT_D_MAX) -> Genome:
    """Child = first cut_a tokens of a, then the suffix of b from cut_b on,
    truncated to the leading d_max tokens (evaluation is prefix-greedy, so
    truncation keeps the part that matters)."""
    child = a[:cut_a] + b[cut_b:]
    return child[:d_max] if len(child) > d_max else child


def one_point_crossover(a: Genome, b: Genome, rng: Random, d_max: int = DEFAULT_D_MAX) -> Genome:
    """Cut points drawn independently: cut_a uniform on [1, |a|], cut_b
    uniform on [0, |b|-1], so the child keeps at least one token of a and
    at least one of b."""
    cut_a = rng.randint(1, len(a))
    cut_b = rng.randrange(len(b))
    return splice(a, b, cut_a, cut_b, d_max)


def mutate(g: Genome, env: Environment, p_m: float, rng: Random) -> Genome:
    """With probability p_m replace one uniformly chosen token by a fresh
    random token (which may coincide with the old one). Length never
    changes."""
    if rng.random() >= p_m:
        return g
    pos = rng.randrange(len(g))
    tok = random_token(rng, len(env.inputs))
    return g[:pos] + (tok,) + g[pos + 1 :]


def _pick_mate(rng: Random, np_: int, exclude: int) -> int:
    # np=1 degenerates to self-crossover; otherwise uniform over indices != exclude
    if np_ == 1:
        return exclude
    j = rng.randrange(np_ - 1)
    return j + 1 if j >= exclude else j


def generational_step(pop: Population, env: Environment, cfg: EcaConfig, rng: Random) -> Population:
    """Challenge every slot with a trial; keep the better, ties to the trial.

    Mates are drawn from the pre-step population (synchronous update).
    """
    out: Population = []
    for i, incumbent in enumerate(pop):
        if rng.random() < cfg.p_c:
            mate = pop[_pick_mate(rng, cfg.np, i)]
            trial = one_point_crossover(incumbent.genome, mate.genome, rng, cfg.d_max)
        else:
            trial = incumbent.genome
        trial = mutate(trial, env, cfg.p_m, rng)
        f = fitness(trial, env)
        out.append(Individual(trial, f) if f <= incumbent.fitness else incumbent)
    return out


def steady_state_step(pop: Population, env: Environment, cfg: EcaConfig, rng: Random) -> Population:
    """Replace lambda_ uniformly chosen targets by their offspring, whatever
    the offspring's fitness. At most lambda_ members change."""
    out = list(pop)
    for _ in range(cfg.lambda_):
        t = rng.randrange(cfg.np)
        mate = out[_pick_mate(rng, cfg.np, t)]
        child = one_point_crossover(out[t].genome, mate.genome, rng, cfg.d_max)
        child = mutate(child, env, cfg.p_m, rng)
        out[t] = Individual(child, fitness(child, env))
    return out


def _best(pop: Population) -> int | float:
    return min(ind.fitness for ind in pop)


def run(
    cfg: EcaConfig,
    schedule: "EnvironmentSchedule",
    *,
    log_stride: int = 1,
    classify_window: int = 1000,
    rng: Random | None = None,
) -> RunOutcome:
    """Execute a full run: init, n_gen steps, logging, classification.

    Environment events fire before the step whose index equals their
    ``at_generation`` (an event at 0 applies before the first step); every
    cached fitness is recomputed immediately. Records are appended every
    ``log_stride``-th completed generation and always at the last one.
    Pure function of (cfg, schedule): the stream is seeded from cfg.seed.
    """
    # local import: experiment depends on engine
    from .experiment import apply_environment_event

    if log_stride < 1:
        raise ValueError("log_stride must be >= 1")
    if rng is None:
        rng = Random(cfg.seed)

    env = schedule.initial
    events = list(schedule.events)
    ei = 0

    pop = init_population(cfg, env, rng)
    epochs: list[list[int | None]] = [[0, None]]
    if _best(pop) == 0:
        epochs[0][1] = 0

    step = generational_step if cfg.model is Model.GENERATIONAL else steady_state_step
    log: list[GenerationRecord] = []

    for g in range(cfg.n_gen):
        while ei < len(events) and events[ei].at_generation == g:
            env = apply_environment_event(env, events[ei])
            ei += 1
            pop = [Individual(ind.genome, fitness(ind.genome, env)) for ind in pop]
            epochs.append([g, g if _best(pop) == 0 else None])
        pop = step(pop, env, cfg, rng)
        completed = g + 1
        if epochs[-1][1] is None and _best(pop) == 0:
            epochs[-1][1] = completed
        if completed % log_stride == 0 or completed == cfg.n_gen:
            log.append(population_record(completed, pop))

    if log:
        cls = classify(log, classify_window)
    else:
        # n_gen=0: no records were produced; classify the initial state
        cls = classify([population_record(0, pop)], classify_window)
    first_opt = next((opt for _, opt in epochs if opt is not None), None)
    cls = replace(cls, generation_of_first_optimum=first_opt)

    return RunOutcome(
        final_population=pop,
        log=log,
        classification=cls,
        env_final=env,
        optimum_by_epoch=tuple((int(s), opt) for s, opt in epochs),
    )

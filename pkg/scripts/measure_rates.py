#!/usr/bin/env python3
"""Measure the statistical behavior of the two population models.

Three studies, each a batch of independent seeded runs:

    generational   how often runs find error 0, and whether the final
                   population is a single repeated genome
    steady-state   how often the trailing window keeps an error-0 member
                   alongside >1 distinct genome (the oscillating regime)
    readapt        after a mid-run target change, how often a run finds the
                   new optimum within the remaining generations

Examples:
    python3 scripts/measure_rates.py generational --runs 20 --gens 100000
    python3 scripts/measure_rates.py steady-state --runs 20 --gens 1000000
    python3 scripts/measure_rates.py readapt --runs 20 --gens 700000 \\
        --event-at 500000 --new-target 60
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from evoexpr.diagnostics import Classification
from evoexpr.engine import EcaConfig, Model
from evoexpr.experiment import (
    EnvironmentEvent,
    EnvironmentSchedule,
    ExperimentConfig,
    run_experiment,
)
from evoexpr.expr import Environment


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("study", choices=["generational", "steady-state", "readapt"])
    parser.add_argument("--runs", type=int, default=20)
    parser.add_argument("--gens", type=int, default=None,
                        help="generations per run (default: study-specific)")
    parser.add_argument("--base-seed", type=int, default=0)
    parser.add_argument("--stride", type=int, default=1000)
    parser.add_argument("--window", type=int, default=100,
                        help="classification window, in records")
    parser.add_argument("--event-at", type=int, default=500_000)
    parser.add_argument("--new-target", type=int, default=60)
    parser.add_argument("--output", type=Path, default=Path("results/measure"))
    args = parser.parse_args(argv)

    env = Environment((10, 20, 30), 100)
    if args.study == "generational":
        gens = args.gens or 100_000
        eca = EcaConfig(model=Model.GENERATIONAL, n_gen=gens)
        schedule = EnvironmentSchedule(env)
    elif args.study == "steady-state":
        gens = args.gens or 1_000_000
        eca = EcaConfig(model=Model.STEADY_STATE, n_gen=gens)
        schedule = EnvironmentSchedule(env)
    else:
        gens = args.gens or 700_000
        eca = EcaConfig(model=Model.STEADY_STATE, n_gen=gens)
        schedule = EnvironmentSchedule(
            env, (EnvironmentEvent(args.event_at, None, args.new_target),)
        )

    cfg = ExperimentConfig(
        eca=eca,
        schedule=schedule,
        n_runs=args.runs,
        base_seed=args.base_seed,
        log_stride=args.stride,
        classify_window=args.window,
        output_dir=args.output / args.study,
    )

    t0 = time.time()
    summary = run_experiment(cfg)
    elapsed = time.time() - t0

    print(f"study={args.study} runs={args.runs} gens={gens} seed_base={args.base_seed}")
    for r, cls in enumerate(summary.classifications):
        print(
            f"  run {r:2d}: {cls.kind.value:11s} first_optimum={cls.generation_of_first_optimum} "
            f"terminal_distinct={cls.terminal_diversity}"
        )
    print(f"fraction_converged={summary.fraction_converged}")
    print(f"fraction_oscillating={summary.fraction_oscillating}")
    print(f"fraction_with_optimum={summary.fraction_with_optimum}")
    print(f"mean_generation_of_first_optimum={summary.mean_generation_of_first_optimum}")

    reached = sum(
        cls.generation_of_first_optimum is not None for cls in summary.classifications
    )
    homogeneous = sum(cls.terminal_diversity == 1 for cls in summary.classifications)
    oscillating = sum(
        cls.kind is Classification.OSCILLATING for cls in summary.classifications
    )
    print(f"reached_optimum={reached}/{args.runs}")
    print(f"terminal_homogeneous={homogeneous}/{args.runs}")
    print(f"oscillating={oscillating}/{args.runs}")

    if args.study == "readapt":
        readapted = 0
        for r in range(args.runs):
            meta = json.loads((cfg.output_dir / f"run_{r}" / "meta").read_text())
            epochs = meta["optimum_by_epoch"]
            if len(epochs) > 1 and epochs[1][1] is not None:
                readapted += 1
        print(f"readapted={readapted}/{args.runs}")

    print(f"elapsed={elapsed:.1f}s  artifacts={cfg.output_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

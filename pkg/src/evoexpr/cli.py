"""Command-line front end.

Subcommands: eval (one genome against an inline environment), run (one
seeded run from a config file), experiment (a batch of seeded runs),
repro-tables (replay the bundled reference programs).

Exit codes: 0 success, 1 domain failure (invalid genome, failed check),
2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .engine import run
from .experiment import ConfigError, load_config, run_experiment, write_run_artifacts
from .expr import Environment, ParseError, evaluate, fitness, parse_genome, render_infix
from .verify import verification_checks


def _inputs_arg(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip() != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("at least one input operand is required")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoexpr",
        description="Evolve variable-length prefix arithmetic programs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one genome against an environment")
    p_eval.add_argument("genome", help="genome text, e.g. '* 10 10'")
    p_eval.add_argument("--inputs", type=_inputs_arg, required=True,
                        help="comma-separated input operands, e.g. 10,20,30")
    p_eval.add_argument("--target", type=int, required=True, help="target output value")

    p_run = sub.add_parser("run", help="execute one seeded run from a config file")
    p_run.add_argument("--config", type=Path, required=True, help="experiment config file")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config's base_seed for this run")
    p_run.add_argument("--output", type=Path, default=None,
                       help="override the config's output directory")

    p_exp = sub.add_parser("experiment", help="execute a batch of independent seeded runs")
    p_exp.add_argument("--config", type=Path, required=True, help="experiment config file")
    p_exp.add_argument("--output", type=Path, default=None,
                       help="override the config's output directory")

    sub.add_parser("repro-tables", help="replay the bundled reference programs")

    return parser


def cmd_eval(args: argparse.Namespace) -> int:
    env = Environment(args.inputs, args.target)
    try:
        genome = parse_genome(args.genome, env)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 1
    result = evaluate(genome, env)
    if not result.is_valid:
        print(f"invalid ({result.error.value}) fitness=INF")
        return 1
    print(
        f"value={result.value} consumed={result.consumed} "
        f"fitness={fitness(genome, env)} infix={render_infix(genome, env)}"
    )
    return 0


def _load(args: argparse.Namespace):
    cfg = load_config(args.config)
    if args.output is not None:
        cfg = replace(cfg, output_dir=args.output)
    return cfg


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = _load(args)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    seed = cfg.base_seed if args.seed is None else args.seed
    outcome = run(
        replace(cfg.eca, seed=seed),
        cfg.schedule,
        log_stride=cfg.log_stride,
        classify_window=cfg.classify_window,
    )
    out_dir = cfg.output_dir / f"run_seed_{seed}"
    write_run_artifacts(outcome, out_dir, seed=seed)
    cls = outcome.classification
    print(f"classification={cls.kind.value}")
    print(f"generation_of_first_optimum={cls.generation_of_first_optimum}")
    print(f"terminal_distinct_genomes={cls.terminal_diversity}")
    print(f"artifacts={out_dir}")
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    try:
        cfg = _load(args)
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    summary = run_experiment(cfg)
    print(f"runs={summary.n_runs}")
    print(f"fraction_converged={summary.fraction_converged}")
    print(f"fraction_oscillating={summary.fraction_oscillating}")
    print(f"fraction_with_optimum={summary.fraction_with_optimum}")
    print(f"mean_generation_of_first_optimum={summary.mean_generation_of_first_optimum}")
    print(f"classifications={','.join(c.kind.value for c in summary.classifications)}")
    print(f"artifacts={cfg.output_dir}")
    return 0


def cmd_repro_tables() -> int:
    checks = verification_checks()
    n_pass = 0
    for check in checks:
        if check.passed:
            n_pass += 1
            print(f"PASS  {check.label} -> {check.actual}")
        else:
            print(f"FAIL  {check.label} -> {check.actual} (expected {check.expected})")
    print(f"{n_pass}/{len(checks)} checks passed")
    return 0 if n_pass == len(checks) else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 0
    if args.command == "eval":
        return cmd_eval(args)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "experiment":
        return cmd_experiment(args)
    return cmd_repro_tables()


if __name__ == "__main__":
    sys.exit(main())

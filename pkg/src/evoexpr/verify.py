"""Bundled reference programs with known error values.

Eleven zero-setup checks for the evaluator pipeline: a population of ten
programs over the standard environment (inputs 10, 20, 30; target 100)
whose error values are known exactly, plus the optimal three-token program
and its infix form. The `repro-tables` CLI subcommand replays them all.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import Environment, evaluate, fitness, parse_genome, render_infix

STANDARD_ENV = Environment(inputs=(10, 20, 30), target=100)

#: (program text, expected error against STANDARD_ENV)
REFERENCE_PROGRAMS: tuple[tuple[str, int], ...] = (
    ("+ / 20 30 / * - 30 20 10 / * 20 30 10", 99),
    ("+ / * 30 30 10 - 30 20", 0),
    ("+ / * 30 20 10 / * 20 20 10", 0),
    ("+ / 20 30 / * * 10 20 10 20", 0),
    ("+ / / * 30 30 10 / 10 10 10", 0),
    ("+ / / * 30 30 10 / + 20 30 / * 30 10 10 - 30 20", 0),
    ("+ / * 30 30 10 - 30 20 30 10 10", 0),
    ("+ / / 30 10 10 / * * 10 20 10 20", 0),
    ("+ / / * 30 30 10 / + 20 30 30 10", 0),
    ("+ / / 30 10 10 / * * 10 10 30 30", 0),
)

OPTIMAL_PROGRAM = "* 10 10"
OPTIMAL_VALUE = 100
OPTIMAL_INFIX = "10*10"


@dataclass(frozen=True)
class CheckResult:
    label: str
    passed: bool
    expected: str
    actual: str


def verification_checks() -> list[CheckResult]:
    """Evaluate every reference program and the optimal-program identity."""
    checks: list[CheckResult] = []
    for i, (text, expected) in enumerate(REFERENCE_PROGRAMS, start=1):
        genome = parse_genome(text, STANDARD_ENV)
        actual = fitness(genome, STANDARD_ENV)
        checks.append(
            CheckResult(
                label=f"program {i}: {text}",
                passed=actual == expected,
                expected=f"fitness {expected}",
                actual=f"fitness {actual}",
            )
        )
    genome = parse_genome(OPTIMAL_PROGRAM, STANDARD_ENV)
    result = evaluate(genome, STANDARD_ENV)
    infix = render_infix(genome, STANDARD_ENV) if result.is_valid else "<invalid>"
    ok = (
        result.is_valid
        and result.value == OPTIMAL_VALUE
        and fitness(genome, STANDARD_ENV) == 0
        and infix == OPTIMAL_INFIX
    )
    checks.append(
        CheckResult(
            label=f"optimal program: {OPTIMAL_PROGRAM}",
            passed=ok,
            expected=f"value {OPTIMAL_VALUE}, fitness 0, infix {OPTIMAL_INFIX}",
            actual=f"value {result.value}, fitness {fitness(genome, STANDARD_ENV)}, infix {infix}",
        )
    )
    return checks

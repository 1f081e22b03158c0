"""Variable-length prefix arithmetic programs over a shared operand vector.

A genome is a non-empty tuple of integer-coded tokens. Codes 0..3 are the
four binary operators ``+ - * /``; code ``OPERAND_BASE + k`` reads entry
``k`` of the environment's input vector. Keeping operands as *references*
(not literal values) means a genome automatically rebinds when the inputs
change mid-run.

Evaluation is prefix: an operator is followed by its two argument
subexpressions. Division is integer division truncating toward zero.
Tokens after the first complete expression are ignored; running out of
tokens, dividing by zero, or referencing a missing input makes the genome
invalid, which maps to the worst possible fitness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from random import Random

ADD, SUB, MUL, DIV = 0, 1, 2, 3
N_OPS = 4
OPERAND_BASE = 4

_OP_CHARS = ("+", "-", "*", "/")
_OP_CODES = {c: i for i, c in enumerate(_OP_CHARS)}

Token = int
Genome = tuple[int, ...]

#: Fitness of an invalid genome. Finite fitnesses are non-negative integer
#: errors; ``math.inf`` sorts after every finite error and equals only itself,
#: which is exactly the ordering the selection rules need.
WORST: float = math.inf


class EvalError(Enum):
    INCOMPLETE = "incomplete"
    DIVISION_BY_ZERO = "division by zero"
    BAD_OPERAND_INDEX = "bad operand index"


class ParseError(ValueError):
    """Genome text that does not parse against the environment."""


@dataclass(frozen=True)
class Environment:
    """Input operand vector and the target output the population must hit."""

    inputs: tuple[int, ...]
    target: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if len(self.inputs) < 1:
            raise ValueError("environment needs at least one input operand")


@dataclass(frozen=True)
class EvalResult:
    value: int | None
    consumed: int
    error: EvalError | None

    @property
    def is_valid(self) -> bool:
        return self.error is None


def operand(index: int) -> Token:
    return OPERAND_BASE + index


def is_operator(token: Token) -> bool:
    return token < OPERAND_BASE


def operand_index(token: Token) -> int:
    return token - OPERAND_BASE


def _find_consumed(tokens: Genome) -> int | None:
    """Length of the leading complete expression, or None if tokens run out.

    Structural scan only: each operator opens two argument slots, each
    operand closes one.
    """
    needed = 1
    for i, tok in enumerate(tokens):
        if tok < OPERAND_BASE:
            needed += 1
        else:
            needed -= 1
        if needed == 0:
            return i + 1
    return None


def _eval_complete(tokens: Genome, consumed: int, inputs: tuple[int, ...]):
    """Evaluate a structurally complete prefix expression left to right.

    Returns (value, None) or (None, EvalError). Iterative with an explicit
    operator stack so deep genomes cannot hit the recursion limit; value
    errors surface in the same depth-first left-to-right order a recursive
    tree evaluation would produce.
    """
    n_inputs = len(inputs)
    ops: list[int] = []
    lefts: list[int | None] = []
    for i in range(consumed):
        tok = tokens[i]
        if tok < OPERAND_BASE:
            ops.append(tok)
            lefts.append(None)
            continue
        idx = tok - OPERAND_BASE
        if idx >= n_inputs:
            return None, EvalError.BAD_OPERAND_INDEX
        v = inputs[idx]
        while ops:
            if lefts[-1] is None:
                lefts[-1] = v
                break
            op = ops.pop()
            a = lefts.pop()
            if op == ADD:
                v = a + v
            elif op == SUB:
                v = a - v
            elif op == MUL:
                v = a * v
            else:
                if v == 0:
                    return None, EvalError.DIVISION_BY_ZERO
                # // floors; negate-and-flip gives truncation toward zero
                v = -((-a) // v) if (a < 0) != (v < 0) else a // v
        else:
            return v, None
    raise AssertionError("complete expression did not reduce to a value")


def evaluate(genome: Genome, env: Environment) -> EvalResult:
    """Evaluate the leading prefix expression of ``genome`` against ``env``."""
    if not genome:
        raise ValueError("genome must be non-empty")
    consumed = _find_consumed(genome)
    if consumed is None:
        return EvalResult(None, 0, EvalError.INCOMPLETE)
    value, err = _eval_complete(genome, consumed, env.inputs)
    if err is not None:
        return EvalResult(None, 0, err)
    return EvalResult(value, consumed, None)


def fitness(genome: Genome, env: Environment) -> int | float:
    """Absolute error |target - value|, or WORST for invalid genomes."""
    consumed = _find_consumed(genome)
    if consumed is None:
        return WORST
    value, err = _eval_complete(genome, consumed, env.inputs)
    if err is not None:
        return WORST
    return abs(env.target - value)


def parse_genome(text: str, env: Environment) -> Genome:
    """Parse whitespace-separated genome text.

    Operator characters map to operator tokens; an integer literal maps to
    the first position in ``env.inputs`` holding that value.
    """
    parts = text.split()
    if not parts:
        raise ParseError("empty genome text")
    tokens: list[int] = []
    for pos, part in enumerate(parts, start=1):
        code = _OP_CODES.get(part)
        if code is not None:
            tokens.append(code)
            continue
        try:
            value = int(part)
        except ValueError:
            raise ParseError(f"unknown token {part!r} at position {pos}") from None
        try:
            idx = env.inputs.index(value)
        except ValueError:
            raise ParseError(
                f"operand {value} at position {pos} is not among the inputs {env.inputs}"
            ) from None
        tokens.append(OPERAND_BASE + idx)
    return tuple(tokens)


def render_prefix(genome: Genome, env: Environment, *, strict: bool = True) -> str:
    """Render as space-separated tokens, operands shown by their bound value.

    With ``strict=False`` an out-of-range operand index k renders as ``@k``
    instead of raising, so populations that outlived an input-vector change
    can still be dumped.
    """
    n_inputs = len(env.inputs)
    parts: list[str] = []
    for tok in genome:
        if tok < OPERAND_BASE:
            parts.append(_OP_CHARS[tok])
        else:
            idx = tok - OPERAND_BASE
            if idx < n_inputs:
                parts.append(str(env.inputs[idx]))
            elif strict:
                raise ValueError(
                    f"operand index {idx} out of range for {n_inputs} inputs"
                )
            else:
                parts.append(f"@{idx}")
    return " ".join(parts)


def render_infix(genome: Genome, env: Environment) -> str:
    """Fully parenthesized infix form of the consumed expression.

    Outermost parentheses are elided; trailing tokens are omitted. Only
    valid genomes can be rendered.
    """
    result = evaluate(genome, env)
    if not result.is_valid:
        raise ValueError(f"cannot render invalid genome ({result.error.value})")

    def build(i: int) -> tuple[str, int]:
        tok = genome[i]
        if tok >= OPERAND_BASE:
            return str(env.inputs[tok - OPERAND_BASE]), i + 1
        left, j = build(i + 1)
        right, k = build(j)
        return f"({left}{_OP_CHARS[tok]}{right})", k

    text, _ = build(0)
    if text.startswith("("):
        text = text[1:-1]
    return text


def random_token(rng: Random, n_inputs: int) -> Token:
    """Fresh random token: operator or operand with probability 1/2 each."""
    if rng.random() < 0.5:
        return rng.randrange(N_OPS)
    return OPERAND_BASE + rng.randrange(n_inputs)


def random_genome(rng: Random, env: Environment, d_init: int) -> Genome:
    """Random genome with length uniform on [1, d_init].

    Validity is not enforced: structurally broken genomes are legal
    population members and simply score WORST.
    """
    if d_init < 1:
        raise ValueError("d_init must be >= 1")
    length = rng.randint(1, d_init)
    n_inputs = len(env.inputs)
    return tuple(random_token(rng, n_inputs) for _ in range(length))

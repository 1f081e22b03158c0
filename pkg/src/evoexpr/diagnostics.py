"""Population-diversity metrics and end-of-run behavior classification.

A run either settles on a single optimal genome (converged), keeps an
optimal member around while the population stays heterogeneous
(oscillating — the open-ended regime), or does neither (failed). The
classifier looks only at a trailing window of per-generation records, so
it separates those terminal behaviors mechanically.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .expr import WORST, Genome

if TYPE_CHECKING:
    from .engine import Population

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


@dataclass(frozen=True, slots=True)
class GenerationRecord:
    generation: int
    best_fitness: int | float
    mean_finite_fitness: float | None
    distinct_genomes: int
    mean_pairwise_distance: float | None
    worst_count: int


class Classification(str, Enum):
    CONVERGED = "converged"
    OSCILLATING = "oscillating"
    FAILED = "failed"


@dataclass(frozen=True)
class RunClassification:
    kind: Classification
    generation_of_first_optimum: int | None
    terminal_diversity: int


def distinct_genomes(pop: "Population") -> int:
    """Number of distinct token sequences in the population."""
    return len({ind.genome for ind in pop})


if _HAVE_NUMBA:

    @njit(cache=True)
    def _lev_kernel(a, b):  # pragma: no cover - exercised via levenshtein_tokens
        n = a.shape[0]
        m = b.shape[0]
        prev = np.empty(m + 1, dtype=np.int64)
        cur = np.empty(m + 1, dtype=np.int64)
        for j in range(m + 1):
            prev[j] = j
        for i in range(1, n + 1):
            cur[0] = i
            ai = a[i - 1]
            for j in range(1, m + 1):
                best = prev[j - 1] if b[j - 1] == ai else prev[j - 1] + 1
                if prev[j] + 1 < best:
                    best = prev[j] + 1
                if cur[j - 1] + 1 < best:
                    best = cur[j - 1] + 1
                cur[j] = best
            prev, cur = cur, prev
        return prev[m]


def _lev_python(a: Sequence[int], b: Sequence[int]) -> int:
    prev = list(range(len(b) + 1))
    for i, ai in enumerate(a, start=1):
        cur = [i]
        for j, bj in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + (ai != bj)))
        prev = cur
    return prev[-1]


def levenshtein_tokens(a: Sequence[int], b: Sequence[int]) -> int:
    """Token-level edit distance (insert/delete/substitute, unit costs)."""
    if _HAVE_NUMBA:
        return int(
            _lev_kernel(
                np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
            )
        )
    return _lev_python(a, b)


def mean_pairwise_distance(pop: "Population") -> float | None:
    """Mean over unordered pairs of edit distance / longer genome length.

    Always in [0, 1]; 0 exactly when the population is homogeneous. Absent
    (None) for populations of fewer than two members.
    """
    n = len(pop)
    if n < 2:
        return None
    if _HAVE_NUMBA:
        seqs = [np.asarray(ind.genome, dtype=np.int64) for ind in pop]
        total = 0.0
        for x, y in combinations(seqs, 2):
            total += _lev_kernel(x, y) / max(x.shape[0], y.shape[0])
    else:
        genomes = [ind.genome for ind in pop]
        total = 0.0
        for x, y in combinations(genomes, 2):
            total += _lev_python(x, y) / max(len(x), len(y))
    return total / (n * (n - 1) / 2)


def population_record(generation: int, pop: "Population") -> GenerationRecord:
    fits = [ind.fitness for ind in pop]
    finite = [f for f in fits if f != WORST]
    return GenerationRecord(
        generation=generation,
        best_fitness=min(fits),
        mean_finite_fitness=sum(finite) / len(finite) if finite else None,
        distinct_genomes=distinct_genomes(pop),
        mean_pairwise_distance=mean_pairwise_distance(pop),
        worst_count=len(fits) - len(finite),
    )


def classify(log: Sequence[GenerationRecord], window: int = 1000) -> RunClassification:
    """Classify terminal behavior from the final ``window`` records.

    Converged: every windowed record has best fitness 0 and a single
    distinct genome. Oscillating: every windowed record has best fitness 0
    and at least half of them hold more than one distinct genome. Anything
    else is failed. A window larger than the log uses the whole log.
    """
    if not log:
        raise ValueError("classify requires a non-empty log")
    if window < 1:
        raise ValueError("window must be >= 1")
    recs = log[-window:]
    optimum_throughout = all(r.best_fitness == 0 for r in recs)
    if optimum_throughout and all(r.distinct_genomes == 1 for r in recs):
        kind = Classification.CONVERGED
    elif optimum_throughout and 2 * sum(r.distinct_genomes > 1 for r in recs) >= len(recs):
        kind = Classification.OSCILLATING
    else:
        kind = Classification.FAILED
    first_opt = next((r.generation for r in log if r.best_fitness == 0), None)
    return RunClassification(
        kind=kind,
        generation_of_first_optimum=first_opt,
        terminal_diversity=log[-1].distinct_genomes,
    )

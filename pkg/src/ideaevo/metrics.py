"""Outcome measures on a final idea population."""

import math
from collections import Counter
from dataclasses import dataclass

from .landscape import eval_utility


@dataclass(frozen=True)
class OutcomeMetrics:
    most_supported: int
    decision_true_utility: float
    entropy_bits: float
    convergence: float
    distinct_types: int
    population_size: int


def _encodings(pop):
    enc = pop.encodings if hasattr(pop, "encodings") else list(pop)
    if not enc:
        raise ValueError("metrics are undefined for an empty population")
    return enc


def entropy(pop):
    """Shannon entropy (bits) of the idea-type distribution."""
    enc = _encodings(pop)
    total = len(enc)
    h = 0.0
    for c in Counter(enc).values():
        p = c / total
        h -= p * math.log2(p)
    # a single type gives -1*log2(1) = -0.0
    return h + 0.0


def convergence(pop, M):
    return (M - entropy(pop)) / M


def most_supported(pop):
    """Encoding with the most copies; ties go to the smallest encoding."""
    counts = Counter(_encodings(pop))
    return min(counts, key=lambda e: (-counts[e], e))


def decision_quality(pop, true_L):
    return eval_utility(true_L, most_supported(pop))


def outcome_metrics(pop, true_L):
    enc = _encodings(pop)
    h = entropy(enc)
    M = true_L.M
    assert h <= M + 1e-12, "entropy cannot exceed the number of aspects"
    best = most_supported(enc)
    return OutcomeMetrics(
        most_supported=best,
        decision_true_utility=eval_utility(true_L, best),
        entropy_bits=h,
        convergence=(M - h) / M,
        distinct_types=len(set(enc)),
        population_size=len(enc),
    )

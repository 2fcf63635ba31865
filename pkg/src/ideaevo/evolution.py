"""Idea population and the six evolutionary operators.

Operators act on single idea instances, never on every copy of an idea.
Each operator mutates the population in place and returns an
:class:`Outcome` describing what happened, which the simulation turns
into a logged event.
"""

import enum
from dataclasses import dataclass, field


class OperatorKind(enum.Enum):
    REPLICATION = "Replication"
    RANDOM_POINT_MUTATION = "RandomPointMutation"
    INTELLIGENT_POINT_MUTATION = "IntelligentPointMutation"
    RECOMBINATION = "Recombination"
    SUBTRACTIVE_SELECTION = "SubtractiveSelection"
    RANDOM_GENERATION = "RandomGeneration"


OPERATORS = tuple(OperatorKind)


@dataclass(frozen=True)
class OperatorParams:
    r_p: int = 5
    p_m: float = 0.1
    r_m: int = 5
    p_s: float = 0.5

    def __post_init__(self):
        if self.r_p < 1:
            raise ValueError(f"r_p must be >= 1, got {self.r_p}")
        if self.r_m < 1:
            raise ValueError(f"r_m must be >= 1, got {self.r_m}")
        if not 0.0 <= self.p_m <= 1.0:
            raise ValueError(f"p_m must be in [0, 1], got {self.p_m}")
        if not 0.0 <= self.p_s <= 1.0:
            raise ValueError(f"p_s must be in [0, 1], got {self.p_s}")


class Population:
    """Multiset of idea instances.

    Instances live in two parallel lists (ids, encodings).  Ids are handed
    out from a counter and never reused.
    """

    def __init__(self, M, encodings=(), next_id=0):
        self.M = M
        self.ids = []
        self.encodings = []
        self._next_id = next_id
        for e in encodings:
            self.add(e)

    def __len__(self):
        return len(self.ids)

    def add(self, encoding):
        if not 0 <= encoding < (1 << self.M):
            raise ValueError(f"encoding {encoding} outside [0, 2^{self.M})")
        iid = self._next_id
        self._next_id += 1
        self.ids.append(iid)
        self.encodings.append(int(encoding))
        return iid

    def remove_at(self, pos):
        iid = self.ids.pop(pos)
        self.encodings.pop(pos)
        return iid

    def copy(self):
        new = Population(self.M, next_id=self._next_id)
        new.ids = list(self.ids)
        new.encodings = list(self.encodings)
        return new

    def items(self):
        return list(zip(self.ids, self.encodings))


@dataclass
class Outcome:
    operator: OperatorKind
    parents: list = field(default_factory=list)
    child: int = None
    child_encoding: int = None
    removed: int = None
    skipped: bool = False

    @property
    def degenerate(self):
        return self.operator is OperatorKind.RECOMBINATION and len(self.parents) == 1


def _argbest(scores, rng, worst=False):
    target = min(scores) if worst else max(scores)
    tied = [i for i, s in enumerate(scores) if s == target]
    if len(tied) == 1:
        return tied[0]
    return tied[int(rng.integers(len(tied)))]


def preferential_pick(pop, u, r_p, direction, rng, exclude=None):
    """Position of the best (or worst) of ``r_p`` instances sampled without replacement.

    ``exclude`` is a position that may not be sampled.  Ties among the
    sampled instances are broken uniformly at random.
    """
    if direction not in ("best", "worst"):
        raise ValueError(f"direction must be 'best' or 'worst', got {direction!r}")
    size = len(pop)
    pool = size - (exclude is not None)
    if pool < 1:
        raise ValueError("preferential pick from an empty population")
    m = min(r_p, pool)
    picks = rng.choice(pool, size=m, replace=False)
    positions = [int(p) + (exclude is not None and p >= exclude) for p in picks]
    scores = [u(pop.encodings[p]) for p in positions]
    return positions[_argbest(scores, rng, worst=direction == "worst")]


def point_mutation(encoding, M, p_m, rng):
    if p_m <= 0.0:
        return encoding
    if p_m >= 1.0:
        return encoding ^ ((1 << M) - 1)
    mask = 0
    for i, hit in enumerate(rng.random(M) < p_m):
        if hit:
            mask |= 1 << i
    return encoding ^ mask


def crossover(a, b, M, p_s, rng):
    """Uniform crossover: each aspect swaps between the parents with probability ``p_s``."""
    if p_s <= 0.0:
        swap = 0
    elif p_s >= 1.0:
        swap = (1 << M) - 1
    else:
        swap = 0
        for i, hit in enumerate(rng.random(M) < p_s):
            if hit:
                swap |= 1 << i
    diff = (a ^ b) & swap
    return a ^ diff, b ^ diff


def _append_child(pop, op, parent_ids, encoding):
    child = pop.add(encoding)
    return Outcome(op, list(parent_ids), child=child, child_encoding=encoding)


def op_replicate(pop, u, params, rng):
    pos = preferential_pick(pop, u, params.r_p, "best", rng)
    return _append_child(pop, OperatorKind.REPLICATION, [pop.ids[pos]], pop.encodings[pos])


def op_mutate_random(pop, u, params, rng):
    pos = preferential_pick(pop, u, params.r_p, "best", rng)
    child = point_mutation(pop.encodings[pos], pop.M, params.p_m, rng)
    return _append_child(pop, OperatorKind.RANDOM_POINT_MUTATION, [pop.ids[pos]], child)


def op_mutate_intelligent(pop, u, params, rng):
    # the parent itself is not a candidate
    pos = preferential_pick(pop, u, params.r_p, "best", rng)
    parent = pop.encodings[pos]
    cands = [point_mutation(parent, pop.M, params.p_m, rng) for _ in range(params.r_m)]
    best = cands[_argbest([u(c) for c in cands], rng)]
    return _append_child(pop, OperatorKind.INTELLIGENT_POINT_MUTATION, [pop.ids[pos]], best)


def op_recombine(pop, u, params, rng):
    """Cross a random instance with a preferred one and keep the better offspring.

    A single-instance population cannot recombine; the sole idea is
    replicated instead and the outcome carries one parent.
    """
    if len(pop) < 2:
        return _append_child(pop, OperatorKind.RECOMBINATION, [pop.ids[0]], pop.encodings[0])
    p1 = int(rng.integers(len(pop)))
    p2 = preferential_pick(pop, u, params.r_p, "best", rng, exclude=p1)
    o1, o2 = crossover(pop.encodings[p1], pop.encodings[p2], pop.M, params.p_s, rng)
    child = (o1, o2)[_argbest([u(o1), u(o2)], rng)]
    return _append_child(pop, OperatorKind.RECOMBINATION, [pop.ids[p1], pop.ids[p2]], child)


def op_subtract(pop, u, params, rng):
    if len(pop) < 2:
        return Outcome(OperatorKind.SUBTRACTIVE_SELECTION, skipped=True)
    pos = preferential_pick(pop, u, params.r_p, "worst", rng)
    return Outcome(OperatorKind.SUBTRACTIVE_SELECTION, removed=pop.remove_at(pos))


def op_generate_random(pop, params, rng, M=None):
    M = pop.M if M is None else M
    return _append_child(pop, OperatorKind.RANDOM_GENERATION, [], int(rng.integers(0, 1 << M)))


def apply_operator(kind, pop, u, params, rng):
    if kind is OperatorKind.RANDOM_GENERATION:
        return op_generate_random(pop, params, rng)
    return _DISPATCH[kind](pop, u, params, rng)


_DISPATCH = {
    OperatorKind.REPLICATION: op_replicate,
    OperatorKind.RANDOM_POINT_MUTATION: op_mutate_random,
    OperatorKind.INTELLIGENT_POINT_MUTATION: op_mutate_intelligent,
    OperatorKind.RECOMBINATION: op_recombine,
    OperatorKind.SUBTRACTIVE_SELECTION: op_subtract,
}

"""Utility landscapes over the M-bit idea space.

A landscape is defined by ``n`` representative ideas (anchors) with
utility values.  Every other idea gets the inverse-squared-Hamming-distance
weighted average of the anchor values, so the surface is smooth and always
stays inside the range of the anchor values.

Three kinds of landscape appear in a simulation:

* the *true* landscape, used only to score the final decision,
* the *master* landscape, the group's shared (possibly biased) view,
* one *individual* view per agent, the master plus bounded noise.
"""

from dataclasses import dataclass, field

import numpy as np

from .seeding import keyed_uniform

MAX_ASPECTS = 62
ENUMERATION_CAP = 20


class LandscapeError(ValueError):
    pass


def hamming(a, b):
    return (a ^ b).bit_count()


def idea_bits(encoding, M):
    """Bit string of an idea, aspect 0 first."""
    return "".join("1" if (encoding >> i) & 1 else "0" for i in range(M))


@dataclass(frozen=True)
class UtilityLandscape:
    """Interpolated utility function defined by anchor ideas.

    ``encodings`` and ``values`` are parallel tuples; anchors are pairwise
    distinct.  Instances are immutable; an evaluation memo is kept
    privately and never changes a result.
    """

    M: int
    encodings: tuple
    values: tuple
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.M <= MAX_ASPECTS:
            raise LandscapeError(f"M must be in [1, {MAX_ASPECTS}], got {self.M}")
        if len(self.encodings) != len(self.values):
            raise LandscapeError("encodings and values differ in length")
        if len(set(self.encodings)) != len(self.encodings):
            raise LandscapeError("representative ideas must be distinct")
        for e in self.encodings:
            if not 0 <= e < (1 << self.M):
                raise LandscapeError(f"encoding {e} outside [0, 2^{self.M})")
        # anchor lookup for the exact-match branch
        object.__setattr__(self, "_anchor", dict(zip(self.encodings, self.values)))

    @property
    def n(self):
        return len(self.encodings)

    def __call__(self, v):
        return eval_utility(self, v)

    def values_array(self, encodings):
        """Vectorized evaluation for an integer array of encodings."""
        v = np.asarray(encodings, dtype=np.int64)
        anchors = np.asarray(self.encodings, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.float64)
        dist = np.bitwise_count(v[:, None] ^ anchors[None, :]).astype(np.float64)
        exact = dist == 0
        with np.errstate(divide="ignore"):
            w = np.where(exact, 0.0, 1.0 / np.where(exact, 1.0, dist) ** 2)
        out = (w @ vals) / w.sum(axis=1)
        hit = exact.any(axis=1)
        if hit.any():
            out[hit] = vals[exact[hit].argmax(axis=1)]
        return out


def eval_utility(L, v):
    """Utility of idea ``v`` (an integer encoding) on landscape ``L``.

    Anchors return their stored value exactly; any other idea gets the
    weighted average of anchor values with weights ``D**-2``.
    """
    if not 0 <= v < (1 << L.M):
        raise LandscapeError(f"idea {v} outside [0, 2^{L.M})")
    hit = L._memo.get(v)
    if hit is not None:
        return hit
    if v in L._anchor:
        u = L._anchor[v]
    else:
        num = 0.0
        den = 0.0
        for e, val in zip(L.encodings, L.values):
            w = 1.0 / hamming(e, v) ** 2
            num += val * w
            den += w
        u = num / den
    L._memo[v] = u
    return u


def _sample_distinct(rng, M, n):
    out = []
    seen = set()
    while len(out) < n:
        e = int(rng.integers(0, 1 << M))
        if e not in seen:
            seen.add(e)
            out.append(e)
    return out


def generate_true_landscape(M, n, rng):
    """Random landscape with ``n`` distinct anchors.

    The first anchor gets utility 1.0, the second 0.0, and the remaining
    ``n - 2`` are uniform in (0, 1).
    """
    if not 1 <= M <= MAX_ASPECTS:
        raise LandscapeError(f"M must be in [1, {MAX_ASPECTS}], got {M}")
    if n < 2:
        raise LandscapeError(f"n must be >= 2 to anchor both extremes, got {n}")
    if n > (1 << M):
        raise LandscapeError(f"n={n} exceeds 2^M={1 << M} distinct ideas")
    encodings = _sample_distinct(rng, M, n)
    values = [1.0, 0.0]
    while len(values) < n:
        x = float(rng.random())
        if x > 0.0:
            values.append(x)
    return UtilityLandscape(M, tuple(encodings), tuple(values))


def _rescale(values):
    lo = min(values)
    hi = max(values)
    if hi == lo:
        return [0.5] * len(values)
    span = hi - lo
    out = [(x - lo) / span for x in values]
    # pin the extremes exactly despite rounding
    out[values.index(lo)] = 0.0
    out[values.index(hi)] = 1.0
    return out


def apply_bias(true_L, beta, rng):
    """Master landscape derived from ``true_L`` with group-level bias ``beta``.

    Each anchor's bits flip independently with probability
    ``min(0.25 * beta, 1)``; a flipped anchor that lands on an already
    placed one is redrawn.  Anchor values get uniform noise in
    ``[-beta, beta]`` and are min-max rescaled to [0, 1].
    """
    if beta < 0:
        raise LandscapeError(f"beta must be >= 0, got {beta}")
    M = true_L.M
    p_flip = min(0.25 * beta, 1.0)
    placed = []
    taken = set()
    for e in true_L.encodings:
        while True:
            mask = 0
            if p_flip > 0:
                flips = rng.random(M) < p_flip
                for i in np.flatnonzero(flips):
                    mask |= 1 << int(i)
            cand = e ^ mask
            if cand not in taken:
                break
        taken.add(cand)
        placed.append(cand)
    if beta > 0:
        noisy = [v + float(rng.uniform(-beta, beta)) for v in true_L.values]
        values = _rescale(noisy)
    else:
        values = list(true_L.values)
    return UtilityLandscape(M, tuple(placed), tuple(values))


@dataclass(frozen=True)
class IndividualUtility:
    """One agent's noisy view of the master landscape.

    The value of idea ``v`` is uniform on
    ``[max(U(v) - nu, 0), min(U(v) + nu, 1)]``, drawn by a keyed hash of
    ``(agent_seed, v)``.  Nothing is tabulated, so M may exceed what could
    be enumerated, and the same idea always gets the same value.
    """

    base: UtilityLandscape
    nu: float
    agent_seed: int
    _memo: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __call__(self, v):
        hit = self._memo.get(v)
        if hit is not None:
            return hit
        u = eval_utility(self.base, v)
        if self.nu > 0:
            lo = max(u - self.nu, 0.0)
            hi = min(u + self.nu, 1.0)
            u = lo + (hi - lo) * keyed_uniform(self.agent_seed, v)
        self._memo[v] = u
        return u


def make_individual_utility(master, nu, agent_seed):
    if nu < 0:
        raise LandscapeError(f"nu must be >= 0, got {nu}")
    return IndividualUtility(master, float(nu), int(agent_seed))


@dataclass(frozen=True)
class Enumeration:
    encodings: np.ndarray
    values: np.ndarray
    argmax: int
    argmin: int


def enumerate_landscape(L, cap=ENUMERATION_CAP):
    """All ``2**M`` ideas with their utilities plus the global extremes.

    Ties for argmax/argmin go to the smallest encoding.
    """
    if L.M > cap:
        raise LandscapeError(f"M={L.M} exceeds enumeration cap {cap}")
    enc = np.arange(1 << L.M, dtype=np.int64)
    vals = np.empty(enc.size)
    for start in range(0, enc.size, 1 << 14):
        vals[start:start + (1 << 14)] = L.values_array(enc[start:start + (1 << 14)])
    # np.argmax/argmin return the first occurrence
    return Enumeration(enc, vals, int(np.argmax(vals)), int(np.argmin(vals)))


def dump_landscape(L):
    """Plain-text serialization: ``M=<int> n=<int>`` then one anchor per line."""
    lines = [f"M={L.M} n={L.n}"]
    lines += [f"{e} {v:.17g}" for e, v in zip(L.encodings, L.values)]
    return "\n".join(lines) + "\n"


def load_landscape(text):
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows:
        raise LandscapeError("empty landscape file")
    head = dict(tok.split("=", 1) for tok in rows[0].split())
    try:
        M = int(head["M"])
        n = int(head["n"])
    except (KeyError, ValueError) as exc:
        raise LandscapeError(f"bad header line {rows[0]!r}") from exc
    encodings = []
    values = []
    for ln in rows[1:]:
        e, v = ln.split()
        encodings.append(int(e))
        values.append(float(v))
    if len(encodings) != n:
        raise LandscapeError(f"header says n={n} but found {len(encodings)} anchors")
    return UtilityLandscape(M, tuple(encodings), tuple(values))

"""Replicated experiments: the heterogeneity x bias sweep and the group-preset comparison.

Replicate ``r`` of every cell uses the same run seed,
``derive_seed(master_seed, "replicate", r)``, so cells differ only in the
parameter being varied (common random numbers).  Seeds are fixed before
any work is dispatched, which makes serial and pooled execution produce
identical bytes.
"""

import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import rankdata

from .seeding import derive_seed
from .simulation import GROUP_LABELS, SimulationConfig, run

RAW_FIELDS = (
    "nu", "beta", "group", "replicate", "seed", "decision_true_utility", "convergence",
    "entropy_bits", "distinct_types", "population_size", "events", "skipped_events",
)
SUMMARY_FIELDS = (
    "nu", "beta", "group", "R", "mean_utility", "std_utility",
    "mean_convergence", "std_convergence",
)
DEFAULT_GRID = tuple(round(0.2 * i, 10) for i in range(7))
N_PERMUTATIONS = 10_000


class HarnessError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    nu_values: tuple = DEFAULT_GRID
    beta_values: tuple = DEFAULT_GRID
    R: int = 50
    base: SimulationConfig = field(default_factory=SimulationConfig)
    master_seed: int = 0

    def __post_init__(self):
        if self.R < 1:
            raise ValueError(f"R must be >= 1, got {self.R}")
        if any(v < 0 for v in (*self.nu_values, *self.beta_values)):
            raise ValueError("nu and beta values must be >= 0")


@dataclass(frozen=True)
class CellSummary:
    nu: float
    beta: float
    group: str
    R: int
    mean_utility: float
    std_utility: float
    mean_convergence: float
    std_convergence: float


def replicate_seed(master_seed, r):
    return derive_seed(master_seed, "replicate", r)


def _run_task(task):
    tag, cfg = task
    try:
        res = run(cfg)
    except Exception as exc:
        raise HarnessError(f"{tag}: {exc}") from exc
    m = res.metrics
    skipped = sum(ev.skipped for ev in res.event_log)
    return {
        "nu": cfg.nu, "beta": cfg.beta, "group": cfg.group, "replicate": tag[-1],
        "seed": cfg.seed, "decision_true_utility": m.decision_true_utility,
        "convergence": m.convergence, "entropy_bits": m.entropy_bits,
        "distinct_types": m.distinct_types, "population_size": m.population_size,
        "events": len(res.event_log), "skipped_events": skipped,
    }


def _execute(tasks, jobs):
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _std(x):
    return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0


def summarize(rows, key):
    """Per-cell mean and sample standard deviation, cells in first-seen order."""
    cells = {}
    for row in rows:
        cells.setdefault(key(row), []).append(row)
    out = []
    for group_rows in cells.values():
        u = [r["decision_true_utility"] for r in group_rows]
        c = [r["convergence"] for r in group_rows]
        first = group_rows[0]
        out.append(CellSummary(first["nu"], first["beta"], first["group"], len(group_rows),
                               float(np.mean(u)), _std(u), float(np.mean(c)), _std(c)))
    return out


def run_sweep(spec, jobs=1):
    """All (nu, beta) cells with the balanced G0 profile; returns (summaries, raw rows)."""
    base = replace(spec.base, group="G0")
    tasks = []
    for nu in spec.nu_values:
        for beta in spec.beta_values:
            for r in range(spec.R):
                cfg = replace(base, nu=float(nu), beta=float(beta),
                              seed=replicate_seed(spec.master_seed, r))
                tasks.append((("nu", nu, "beta", beta, "replicate", r), cfg))
    rows = _execute(tasks, jobs)
    return summarize(rows, lambda r: (r["nu"], r["beta"])), rows


def run_group_comparison(groups=GROUP_LABELS, R=100, base=None, master_seed=0, nu=0.0, jobs=1):
    """``R`` runs per group preset, heterogeneity forced to ``nu`` (0 unless overridden)."""
    base = base or SimulationConfig()
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    tasks = []
    for g in groups:
        for r in range(R):
            cfg = replace(base, group=g, nu=float(nu), seed=replicate_seed(master_seed, r))
            tasks.append((("group", g, "replicate", r), cfg))
    rows = _execute(tasks, jobs)
    return summarize(rows, lambda r: r["group"]), rows


def spearman_permutation(x, y, n_permutations=N_PERMUTATIONS, seed=0):
    """Spearman rank correlation with a two-sided permutation p-value.

    Returns ``(rho, p)``.  If either variable is constant the correlation
    is undefined and ``(0.0, 1.0)`` is reported.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ValueError("x and y differ in length")
    if np.unique(x).size < 2 or np.unique(y).size < 2:
        return 0.0, 1.0
    rx = rankdata(x)
    ry = rankdata(y)
    rx = (rx - rx.mean()) / np.linalg.norm(rx - rx.mean())
    ry = (ry - ry.mean()) / np.linalg.norm(ry - ry.mean())
    rho = float(rx @ ry)
    rng = np.random.default_rng(seed)
    perm = rng.permuted(np.broadcast_to(ry, (n_permutations, ry.size)), axis=1)
    null = perm @ rx
    extreme = np.count_nonzero(np.abs(null) >= abs(rho) - 1e-12)
    return rho, (1 + extreme) / (1 + n_permutations)


def mean_difference_permutation(a, b, n_permutations=N_PERMUTATIONS, seed=0):
    """Two-sided permutation p-value for a difference in means; returns (diff, p)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pooled = np.concatenate([a, b])
    diff = float(a.mean() - b.mean())
    rng = np.random.default_rng(seed)
    perm = rng.permuted(np.broadcast_to(pooled, (n_permutations, pooled.size)), axis=1)
    null = perm[:, :a.size].mean(axis=1) - perm[:, a.size:].mean(axis=1)
    extreme = np.count_nonzero(np.abs(null) >= abs(diff) - 1e-12)
    return diff, (1 + extreme) / (1 + n_permutations)


TREND_TESTS = (
    ("nu->utility|beta=0", "nu", "beta", "decision_true_utility"),
    ("beta->utility|nu=0", "beta", "nu", "decision_true_utility"),
    ("nu->convergence|beta=0", "nu", "beta", "convergence"),
    ("beta->convergence|nu=0", "beta", "nu", "convergence"),
)


def trend_tests(rows, n_permutations=N_PERMUTATIONS, seed=0):
    """Rank-correlation trend tests along the two edges of the sweep grid.

    Returns ``{name: (rho, p)}``.
    """
    out = {}
    for i, (name, xkey, fixed, ykey) in enumerate(TREND_TESTS):
        sel = [r for r in rows if r[fixed] == 0.0]
        xs = [r[xkey] for r in sel]
        if len(set(xs)) < 2:
            raise HarnessError(f"{name}: need at least 2 distinct {xkey} values with {fixed}=0")
        out[name] = spearman_permutation(xs, [r[ykey] for r in sel], n_permutations, seed + i)
    return out


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _csv(fieldnames, records, provenance):
    buf = io.StringIO()
    for p in provenance:
        buf.write(f"# {p}\n")
    buf.write(",".join(fieldnames) + "\n")
    for rec in records:
        buf.write(",".join(_fmt(rec[f]) for f in fieldnames) + "\n")
    return buf.getvalue()


def raw_csv(rows, provenance=()):
    return _csv(RAW_FIELDS, rows, provenance)


def summary_csv(summaries, provenance=()):
    return _csv(SUMMARY_FIELDS, [s.__dict__ for s in summaries], provenance)


def trend_report(results):
    lines = ["test,rho,p_value"]
    lines += [f"{name},{rho:.17g},{p:.17g}" for name, (rho, p) in results.items()]
    return "\n".join(lines) + "\n"


def group_report(rows, reference="G0", n_permutations=N_PERMUTATIONS, seed=0):
    """Each group's mean utility compared against ``reference`` by permutation test."""
    by_group = {}
    for r in rows:
        by_group.setdefault(r["group"], []).append(r["decision_true_utility"])
    lines = ["group,mean_utility,stderr_utility,diff_vs_" + reference + ",p_value"]
    ref = by_group.get(reference)
    for i, (g, u) in enumerate(by_group.items()):
        se = _std(u) / np.sqrt(len(u))
        if ref is None or g == reference:
            diff, p = 0.0, 1.0
        else:
            diff, p = mean_difference_permutation(u, ref, n_permutations, seed + i)
        lines.append(f"{g},{np.mean(u):.17g},{se:.17g},{diff:.17g},{p:.17g}")
    return "\n".join(lines) + "\n"

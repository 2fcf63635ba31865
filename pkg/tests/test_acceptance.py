"""Exit criteria for the simulator and harness, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time
from collections import Counter

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, table_utility
from ideaevo import harness
from ideaevo.cli import main
from ideaevo.evolution import OperatorParams, Population, op_mutate_intelligent, point_mutation, preferential_pick
from ideaevo.genealogy import build_genealogy, format_log
from ideaevo.landscape import eval_utility, generate_true_landscape
from ideaevo.metrics import convergence, entropy
from ideaevo.simulation import GROUP_LABELS, SimulationConfig, run
from oracles import brute_force_entropy, brute_force_utility, hypergeometric_inclusion

SEED = 0


def record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    summaries, rows = harness.run_sweep(harness.SweepSpec(R=50, master_seed=SEED))
    return summaries, rows, time.perf_counter() - t0


def test_1_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(SEED)
    for M in range(3, 7):
        for _ in range(10):
            n = int(rng.integers(2, 2**M + 1))
            L = generate_true_landscape(M, n, rng)
            anchors = list(zip(L.encodings, L.values))
            for v in range(2**M):
                worst = max(worst, abs(eval_utility(L, v) - brute_force_utility(M, anchors, v)))
    elapsed = time.perf_counter() - t0
    record(1, "oracle equivalence", worst <= 1e-12 and elapsed < 5.0,
           f"max |diff| = {worst:.2e} (tol 1e-12), {elapsed:.2f}s (limit 5s)")


def test_2_entropy_convergence():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(1000):
        size = int(rng.integers(1, 200))
        enc = rng.integers(0, int(rng.integers(1, 64)) + 1, size=size).tolist()
        worst = max(worst, abs(entropy(enc) - brute_force_entropy(enc)))
    full = Population(4, range(16))
    h, c = entropy(full), convergence(full, 4)
    record(2, "entropy/convergence", worst <= 1e-12 and h == 4.0 and c == 0.0,
           f"max |diff| = {worst:.2e}; full-coverage M=4: H = {h}, convergence = {c}")


def test_3_sweep_trends(sweep):
    summaries, rows, elapsed = sweep
    res = harness.trend_tests(rows, seed=SEED)
    rho_nu_u, p_nu_u = res["nu->utility|beta=0"]
    rho_b_u, p_b_u = res["beta->utility|nu=0"]
    rho_nu_c, p_nu_c = res["nu->convergence|beta=0"]
    rho_b_c, p_b_c = res["beta->convergence|nu=0"]
    checks = [
        rho_nu_u < 0 and p_nu_u < 0.05,
        rho_b_u < 0 and p_b_u < 0.05,
        rho_nu_c < 0 and p_nu_c < 0.05,
        not (rho_b_c < 0 and p_b_c < 0.05),
        len(summaries) == 49,
        elapsed < 300.0,
    ]
    detail = (f"nu->U rho={rho_nu_u:.3f} p={p_nu_u:.4f}; beta->U rho={rho_b_u:.3f} p={p_b_u:.4f}; "
              f"nu->C rho={rho_nu_c:.3f} p={p_nu_c:.4f}; beta->C rho={rho_b_c:.3f} p={p_b_c:.4f} "
              f"(must not be significantly negative); sweep {elapsed:.1f}s (limit 300s)")
    record(3, "heterogeneity/bias trends", all(checks), detail)


def test_4_heterogeneity_collapse():
    spec = harness.SweepSpec((0.0, 1.2), (0.0,), R=100, master_seed=SEED)
    summaries, _ = harness.run_sweep(spec)
    by_nu = {s.nu: s.mean_utility for s in summaries}
    drop = by_nu[0.0] - by_nu[1.2]
    ok = drop >= 0.10 and 0.40 <= by_nu[1.2] <= 0.70
    record(4, "heterogeneity collapse", ok,
           f"mean U: nu=0 {by_nu[0.0]:.4f}, nu=1.2 {by_nu[1.2]:.4f} (need [0.40, 0.70]); "
           f"drop {drop:.4f} (need >= 0.10)")


def test_5_group_ordering():
    summaries, rows = harness.run_group_comparison(GROUP_LABELS, R=100, master_seed=SEED)
    mean = {s.group: s.mean_utility for s in summaries}
    se = {s.group: s.std_utility / np.sqrt(s.R) for s in summaries}
    top = max(mean, key=mean.get)
    g0_top = mean["G0"] >= mean[top] - max(se["G0"], se[top])
    util = {}
    for r in rows:
        util.setdefault(r["group"], []).append(r["decision_true_utility"])
    diff, p = harness.mean_difference_permutation(util["G7"], util["G0"], seed=SEED)
    g7_below = diff < 0 and p < 0.05
    ranking = ", ".join(f"{g}={mean[g]:.3f}" for g in sorted(mean, key=mean.get, reverse=True))
    record(5, "group preset ordering", g0_top and g7_below,
           f"G0 within 1 SE of max: {g0_top} (max {top}={mean[top]:.4f}, G0={mean['G0']:.4f}, "
           f"SE {max(se['G0'], se[top]):.4f}); G7 < G0: {g7_below} (diff {diff:.4f}, p={p:.4f}); "
           f"ranking {ranking}")


def test_6_determinism_and_accounting(tmp_path):
    ok = True
    notes = []
    for name in ("a", "b"):
        assert main(["run", "--seed", "7", "--nu", "0.4", "--beta", "0.2", "--out", str(tmp_path / name)]) == 0
        assert main(["sweep", "--R", "3", "--T", "20", "--seed", "7", "--nu-values", "0,0.6,1.2",
                     "--beta-values", "0,1.2", "--out", str(tmp_path / f"s{name}")]) == 0
    for sub, files in (("", ("metrics.csv", "events.log", "config.txt")),
                       ("s", ("raw.csv", "summary.csv", "trends.csv"))):
        for f in files:
            same = (tmp_path / f"{sub}a" / f).read_bytes() == (tmp_path / f"{sub}b" / f).read_bytes()
            ok &= same
    notes.append(f"repeat runs byte-identical: {ok}")
    acct = True
    for seed in range(30):
        cfg = SimulationConfig(seed=seed, group=GROUP_LABELS[seed % 8], N=1 + seed % 5, T=seed * 3)
        res = run(cfg)
        adds = sum(ev.child is not None for ev in res.event_log)
        dels = sum(ev.removed is not None for ev in res.event_log)
        acct &= len(res.event_log) == cfg.N * cfg.T
        acct &= len(res.final_population) == cfg.k + adds - dels
    notes.append(f"N*T events and k+adds-deletes on 30 runs: {acct}")
    jobs_same = True
    for jobs in ("1", "8"):
        assert main(["groups", "--R", "4", "--T", "15", "--jobs", jobs, "--out", str(tmp_path / f"j{jobs}")]) == 0
        assert main(["sweep", "--R", "2", "--T", "15", "--jobs", jobs, "--nu-values", "0,0.8",
                     "--beta-values", "0,0.4", "--out", str(tmp_path / f"k{jobs}")]) == 0
    for prefix in ("j", "k"):
        for f in (tmp_path / f"{prefix}1").iterdir():
            jobs_same &= f.read_bytes() == (tmp_path / f"{prefix}8" / f.name).read_bytes()
    notes.append(f"--jobs 1 vs 8 byte-identical: {jobs_same}")
    record(6, "determinism & accounting", ok and acct and jobs_same, "; ".join(notes))


def test_7_genealogy_integrity():
    rng = np.random.default_rng(SEED)
    failures = 0
    for i in range(100):
        cfg = SimulationConfig(
            seed=int(rng.integers(2**31)), group=GROUP_LABELS[i % 8],
            nu=float(rng.choice(harness.DEFAULT_GRID)), beta=float(rng.choice(harness.DEFAULT_GRID)),
            N=int(rng.integers(1, 6)), T=int(rng.integers(0, 80)),
        )
        res = run(cfg)
        dag = build_genealogy(res.event_log, res.initial_population)
        order = dag.topological_order()
        good = len(order) == len(dag.nodes)
        good &= all(dag.birth[p] < dag.birth[c] for p, c in dag.edges)
        good &= all(dag.death.get(p, float("inf")) > dag.birth[c] for p, c in dag.edges)
        good &= len(dag.nodes) == cfg.k + sum(ev.child is not None for ev in res.event_log)
        good &= len(dag.edges) == sum(len(ev.parents) for ev in res.event_log)
        failures += not good
    record(7, "genealogy integrity", failures == 0, f"{100 - failures}/100 run logs valid")


def test_8_operator_micro_properties():
    rng = np.random.default_rng(SEED)
    pop = Population(7, [1] + [0] * 99)
    u = table_utility({1: 1.0, 0: 0.0})
    trials = 100_000
    hits = sum(preferential_pick(pop, u, 5, "best", rng) == 0 for _ in range(trials))
    expected = hypergeometric_inclusion(100, 1, 5)
    inc_ok = abs(hits / trials - expected) <= 0.005

    disp = np.mean([point_mutation(0, 10, 0.1, rng).bit_count() for _ in range(trials)])
    disp_ok = abs(disp - 1.0) <= 0.02

    L = generate_true_landscape(4, 6, np.random.default_rng(SEED))
    means = {}
    for r_m in (1, 5):
        total = 0.0
        for _ in range(10_000):
            p = Population(4, [0b0110])
            out = op_mutate_intelligent(p, L, OperatorParams(r_m=r_m, p_m=0.25), rng)
            total += eval_utility(L, out.child_encoding)
        means[r_m] = total / 10_000
    im_ok = means[5] >= means[1]
    record(8, "operator micro-properties", inc_ok and disp_ok and im_ok,
           f"inclusion {hits / trials:.4f} vs {expected:.4f} (+-0.005); "
           f"mean displacement {disp:.4f} vs 1.0 (+-0.02); "
           f"intelligent r_m=5 {means[5]:.4f} >= r_m=1 {means[1]:.4f}")

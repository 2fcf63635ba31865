"""Heterogeneity x bias sweep with the balanced group profile.

    python scripts/sweep_heterogeneity_bias.py --R 50 --jobs 4 --out results/sweep
"""

import argparse
from pathlib import Path

from ideaevo import harness
from ideaevo.simulation import SimulationConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--R", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/sweep"))
    args = ap.parse_args()

    spec = harness.SweepSpec(R=args.R, base=SimulationConfig(seed=args.seed), master_seed=args.seed)
    summaries, rows = harness.run_sweep(spec, jobs=args.jobs)
    prov = spec.base.to_lines() + [f"R={args.R}"]
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "raw.csv").write_text(harness.raw_csv(rows, prov))
    (args.out / "summary.csv").write_text(harness.summary_csv(summaries, prov))
    trends = harness.trend_tests(rows, seed=args.seed)
    (args.out / "trends.csv").write_text(harness.trend_report(trends))

    print(f"{'nu':>5} {'beta':>5} {'utility':>8} {'converg':>8}")
    for s in summaries:
        print(f"{s.nu:5.1f} {s.beta:5.1f} {s.mean_utility:8.3f} {s.mean_convergence:8.3f}")
    for name, (rho, p) in trends.items():
        print(f"{name:26s} rho={rho:+.3f} p={p:.4f}")


if __name__ == "__main__":
    main()

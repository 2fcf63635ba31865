"""Behavioral preset comparison (G0..G7) at zero heterogeneity.

    python scripts/compare_groups.py --R 100 --out results/groups
"""

import argparse
from pathlib import Path

import numpy as np

from ideaevo import harness
from ideaevo.simulation import GROUP_LABELS, SimulationConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--R", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--beta", type=float, default=0.0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/groups"))
    args = ap.parse_args()

    base = SimulationConfig(beta=args.beta, seed=args.seed)
    summaries, rows = harness.run_group_comparison(GROUP_LABELS, args.R, base, args.seed, jobs=args.jobs)
    prov = base.to_lines() + [f"R={args.R}"]
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "raw.csv").write_text(harness.raw_csv(rows, prov))
    (args.out / "summary.csv").write_text(harness.summary_csv(summaries, prov))
    (args.out / "groups_report.csv").write_text(harness.group_report(rows, seed=args.seed))

    print(f"{'group':>5} {'utility':>8} {'se':>6} {'converg':>8}")
    for s in sorted(summaries, key=lambda s: -s.mean_utility):
        print(f"{s.group:>5} {s.mean_utility:8.3f} {s.std_utility / np.sqrt(s.R):6.3f} {s.mean_convergence:8.3f}")


if __name__ == "__main__":
    main()

"""Command-line interface.

Subcommands: ``run``, ``sweep``, ``groups``, ``oracle``, ``genealogy``.
Exit status is 0 on success, 1 on a usage or configuration error and
2 on a runtime or I/O failure.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .genealogy import MalformedLogError, build_genealogy, export_dot, format_log, genealogy_stats, parse_log
from .landscape import ENUMERATION_CAP, LandscapeError, dump_landscape, enumerate_landscape, idea_bits
from .simulation import GROUP_LABELS, ConfigError, SimulationConfig, init_simulation, parse_config_text, run

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

# flag -> config field; flag names follow the model's symbols
SIM_FLAGS = {
    "M": int, "n": int, "N": int, "k": int, "T": int,
    "nu": float, "beta": float, "rp": int, "pm": float, "rm": int, "ps": float,
}
HARNESS_KEYS = ("R", "nu_values", "beta_values", "groups")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_sim_flags(p):
    p.add_argument("--config", type=Path, help="key=value configuration file")
    for name, kind in SIM_FLAGS.items():
        p.add_argument(f"--{name}", type=kind, default=None)
    p.add_argument("--group", default=None, choices=GROUP_LABELS)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=Path, default=Path("out"))


def _resolve(args):
    """Merge config file and flags; flags win.

    Returns ``(config, harness_overrides, explicit_keys)``.
    """
    raw = {}
    if args.config is not None:
        try:
            raw = parse_config_text(args.config.read_text())
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from None
    extra = {k: raw.pop(k) for k in HARNESS_KEYS if k in raw}
    for name in SIM_FLAGS:
        value = getattr(args, name)
        if value is not None:
            raw[name] = value
    if args.group is not None:
        raw["group"] = args.group
    if args.seed is not None:
        raw["seed"] = args.seed
    return SimulationConfig.from_mapping(raw), extra, set(raw)


def _int(text, key):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None


def _values(text, key):
    try:
        vals = tuple(float(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise ConfigError(key, f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise ConfigError(key, "empty value list")
    return vals


def _write(out, name, text):
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def cmd_run(args):
    cfg, _, _ = _resolve(args)
    res = run(cfg)
    prov = cfg.to_lines()
    m = res.metrics
    row = {
        "nu": cfg.nu, "beta": cfg.beta, "group": cfg.group, "replicate": 0, "seed": cfg.seed,
        "decision_true_utility": m.decision_true_utility, "convergence": m.convergence,
        "entropy_bits": m.entropy_bits, "distinct_types": m.distinct_types,
        "population_size": m.population_size, "events": len(res.event_log),
        "skipped_events": sum(ev.skipped for ev in res.event_log),
    }
    _write(args.out, "metrics.csv", harness.raw_csv([row], prov))
    _write(args.out, "events.log", format_log(res.event_log, res.initial_population, prov))
    _write(args.out, "config.txt", "\n".join(prov) + "\n")


def cmd_sweep(args):
    cfg, extra, _ = _resolve(args)
    R = args.R if args.R is not None else _int(extra.get("R", 50), "R")
    nus = args.nu_values or extra.get("nu_values")
    nus = _values(nus, "nu_values") if nus is not None else harness.DEFAULT_GRID
    betas = args.beta_values or extra.get("beta_values")
    betas = _values(betas, "beta_values") if betas is not None else harness.DEFAULT_GRID
    try:
        spec = harness.SweepSpec(nus, betas, R, replace(cfg, group="G0"), cfg.seed)
    except ValueError as exc:
        raise ConfigError("sweep", str(exc)) from None
    prov = replace(cfg, group="G0").to_lines() + [
        f"R={R}",
        "nu_values=" + ",".join(f"{v:.17g}" for v in nus),
        "beta_values=" + ",".join(f"{v:.17g}" for v in betas),
    ]
    summaries, rows = harness.run_sweep(spec, jobs=args.jobs)
    _write(args.out, "raw.csv", harness.raw_csv(rows, prov))
    _write(args.out, "summary.csv", harness.summary_csv(summaries, prov))
    try:
        report = harness.trend_report(harness.trend_tests(rows, seed=cfg.seed))
    except harness.HarnessError as exc:
        report = f"# trend tests unavailable: {exc}\n"
    _write(args.out, "trends.csv", "".join(f"# {p}\n" for p in prov) + report)


def cmd_groups(args):
    cfg, extra, explicit = _resolve(args)
    R = args.R if args.R is not None else _int(extra.get("R", 100), "R")
    if R < 1:
        raise ConfigError("R", f"must be >= 1, got {R}")
    spec = args.groups or extra.get("groups") or ",".join(GROUP_LABELS)
    groups = tuple(g.strip() for g in spec.split(",") if g.strip())
    for g in groups:
        if g not in GROUP_LABELS:
            raise ConfigError("groups", f"unknown group preset {g!r}")
    # heterogeneity is 0 for this experiment unless set explicitly
    nu = cfg.nu if "nu" in explicit else 0.0
    cfg = replace(cfg, nu=nu)
    prov = cfg.to_lines() + [f"R={R}", "groups=" + ",".join(groups)]
    summaries, rows = harness.run_group_comparison(groups, R, cfg, cfg.seed, nu=nu, jobs=args.jobs)
    _write(args.out, "raw.csv", harness.raw_csv(rows, prov))
    _write(args.out, "summary.csv", harness.summary_csv(summaries, prov))
    _write(args.out, "groups_report.csv",
           "".join(f"# {p}\n" for p in prov) + harness.group_report(rows, reference=groups[0], seed=cfg.seed))


def cmd_oracle(args):
    cfg, _, _ = _resolve(args)
    if cfg.M > args.cap:
        raise LandscapeError(f"M={cfg.M} exceeds enumeration cap {args.cap}")
    st = init_simulation(replace(cfg, T=0))
    L = st.true_landscape if args.landscape == "true" else st.master_landscape
    en = enumerate_landscape(L, cap=args.cap)
    prov = cfg.to_lines() + [f"landscape={args.landscape}"]
    head = "".join(f"# {p}\n" for p in prov)
    _write(args.out, "landscape.txt", head + dump_landscape(L))
    lines = ["encoding,bits,value"]
    lines += [f"{e},{idea_bits(int(e), L.M)},{v:.17g}" for e, v in zip(en.encodings, en.values)]
    _write(args.out, "enumeration.csv", head + "\n".join(lines) + "\n")
    report = [
        f"argmax={en.argmax}", f"argmax_bits={idea_bits(en.argmax, L.M)}",
        f"max_value={en.values[en.argmax]:.17g}",
        f"argmin={en.argmin}", f"argmin_bits={idea_bits(en.argmin, L.M)}",
        f"min_value={en.values[en.argmin]:.17g}",
    ]
    _write(args.out, "optimum.txt", head + "\n".join(report) + "\n")


def cmd_genealogy(args):
    try:
        text = args.log.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {args.log}: {exc}") from None
    events, initial, prov = parse_log(text)
    dag = build_genealogy(events, initial)
    stats = genealogy_stats(dag)
    head = "".join(f"# {p}\n" for p in prov)
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "genealogy.dot", "w") as fh:
        fh.write("".join(f"// {p}\n" for p in prov))
        export_dot(dag, fh)
    body = "\n".join(f"{k}={v:.17g}" if isinstance(v, float) else f"{k}={v}" for k, v in stats.items())
    _write(args.out, "stats.txt", head + body + "\n")


def build_parser():
    parser = _Parser(prog="ideaevo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="one simulation: metrics, event log, resolved config")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="heterogeneity x bias grid with the balanced profile")
    _add_sim_flags(p)
    p.add_argument("--R", type=int, default=None, help="replicates per cell (default 50)")
    p.add_argument("--nu-values", dest="nu_values", default=None)
    p.add_argument("--beta-values", dest="beta_values", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("groups", help="behavioral preset comparison G0..G7")
    _add_sim_flags(p)
    p.add_argument("--R", type=int, default=None, help="replicates per group (default 100)")
    p.add_argument("--groups", default=None, help="comma-separated labels (default all)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_groups)

    p = sub.add_parser("oracle", help="enumerate a landscape and report its optimum")
    _add_sim_flags(p)
    p.add_argument("--landscape", choices=("true", "master"), default="true")
    p.add_argument("--cap", type=int, default=ENUMERATION_CAP)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("genealogy", help="genealogy DAG and stats from an event log")
    p.add_argument("log", type=Path)
    p.add_argument("--out", type=Path, default=Path("out"))
    p.set_defaults(func=cmd_genealogy)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
            raise ConfigError("jobs", "must be >= 1")
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LandscapeError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedLogError as exc:
        print(f"malformed log: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, harness.HarnessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

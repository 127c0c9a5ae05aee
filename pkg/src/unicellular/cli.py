"""Command line entry point: ``unicellular {theory,sample,experiment,selftest}``."""
from __future__ import annotations

import argparse
import datetime as dt
import json
import sys

import numpy as np

from .cperm import SamplerBudgetExceeded
from .cycle_census import count_short_cycles
from .decorated_map import graph_degree_histogram, underlying_graph
from .harness import ConfigError, ExperimentConfig, report_json, run_experiment, sample_decorated_tree, write_csv
from .selftest import run_selftest
from .theory import build_theory

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


def _cmd_theory(args) -> int:
    try:
        table = build_theory(args.theta, args.kmax, args.degree_cutoff)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(json.dumps(table.to_dict(), indent=1))
    return EXIT_OK


def _cmd_sample(args) -> int:
    cfg = ExperimentConfig(n=args.n, theta=args.theta, seed=args.seed, k_max=args.kmax)
    d = sample_decorated_tree(cfg.n, cfg.g, np.random.default_rng(cfg.seed))
    g = underlying_graph(d)
    census = count_short_cycles(g, cfg.k_max)
    summary = {
        "n": cfg.n,
        "g": cfg.g,
        "m": cfg.m,
        "census": census.to_dict(),
        "degree_histogram": {str(k): c for k, c in graph_degree_histogram(g).items()},
    }
    if args.dump_graph:
        dump = {"tree": d.tree.to_dict(), "perm": d.perm.to_dict(), "graph": g.to_dict(), **summary}
        with open(args.dump_graph, "w") as fh:
            json.dump(dump, fh)
    print(json.dumps(summary, indent=1))
    bad = g.v_count != cfg.m or g.e_count != cfg.n or int(g.degrees().sum()) != 2 * cfg.n
    return EXIT_INVARIANT if bad else EXIT_OK


def _cmd_experiment(args) -> int:
    if args.workers < 1:
        raise ConfigError("workers must be >= 1")
    cfg = ExperimentConfig(
        n=args.n, theta=args.theta, replicates=args.replicates, seed=args.seed, k_max=args.kmax,
        degree_cutoff=args.degree_cutoff,
    )
    report = run_experiment(cfg, workers=args.workers)
    report["generated_at"] = dt.datetime.now(dt.timezone.utc).isoformat()
    text = report_json(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text)
    if args.csv:
        write_csv(report, args.csv)
    for name, ok in report["checks"].items():
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    if report["invariant_violations"]:
        for v in report["invariant_violations"]:
            print(f"invariant violation: {v}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _cmd_selftest(args) -> int:
    results = run_selftest()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unicellular", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("theory", help="print the limit-law constants as JSON")
    t.add_argument("--theta", type=float, required=True)
    t.add_argument("--kmax", type=int, default=6)
    t.add_argument("--degree-cutoff", type=int, default=None)
    t.set_defaults(func=_cmd_theory)

    s = sub.add_parser("sample", help="sample one decorated tree and summarise its graph")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--kmax", type=int, default=6)
    s.add_argument("--dump-graph", metavar="PATH")
    s.set_defaults(func=_cmd_sample)

    e = sub.add_parser("experiment", help="run R replicates and compare with the limit laws")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--theta", type=float, required=True)
    e.add_argument("--replicates", type=int, default=100)
    e.add_argument("--kmax", type=int, default=4)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--degree-cutoff", type=int, default=20)
    e.add_argument("--out", metavar="PATH")
    e.add_argument("--csv", metavar="PATH")
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=_cmd_experiment)

    st = sub.add_parser("selftest", help="oracle-equivalence and identity suites")
    st.set_defaults(func=_cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SamplerBudgetExceeded as exc:
        print(f"sampler budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())

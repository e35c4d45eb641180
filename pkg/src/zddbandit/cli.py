"""Command-line entry point.

Exit codes: 0 success, 1 usage, 2 validation/parse failure, 3 runtime failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import dp
from .builder import (GraphError, GridSpec, bfs_edge_order, brute_force_st_paths, build_grid, build_st_paths,
                      read_graph, reduce_from_family)
from .combwm import init
from .harness import ConfigError, load_config, run_experiment
from .zdd import ZddError, count, enumerate_family, max_cardinality, read_zdd, validate, write_zdd

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2, 3

RUN_HELP = """Run a bandit experiment from a 'key = value' config file.

Keys: problem (osp|dst|cg|custom-zdd), grid_rows, grid_cols, graph_file,
zdd_file, alpha (2|3), horizon, trials, seed, reset_prob, kappa, players,
output, adversary (reset-bernoulli|zero), workers.

The reset-Bernoulli adversary keeps a mean vector mu (redrawn uniformly with
probability reset_prob each round after the first), draws one sign per arm,
h_i ~ Ber(mu_i), and emits +1/d for h_i = 1 and -1/d otherwise.
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_zdd(path):
    with open(path) as fh:
        return read_zdd(fh)


def cmd_build_paths(args) -> int:
    with open(args.graph) as fh:
        graph = read_graph(fh)
    s = graph.start if args.start is None else args.start
    t = graph.goal if args.goal is None else args.goal
    if s is None or t is None:
        raise GraphError("start/goal missing: add 'start'/'goal' lines or pass --start/--goal")
    order = bfs_edge_order(graph, s) if args.order == "bfs" else None
    zdd = build_st_paths(graph, s, t, edge_order=order)
    with open(args.out, "w") as fh:
        write_zdd(zdd, fh)
    print(f"count {count(zdd)}")
    print(f"vertices {zdd.n_vertices}")
    return EXIT_OK


def cmd_count(args) -> int:
    zdd = _load_zdd(args.zdd)
    print(f"count {count(zdd)}")
    if zdd.root != 0:
        print(f"max_cardinality {max_cardinality(zdd)}")
    return EXIT_OK


def cmd_stats(args) -> int:
    zdd = _load_zdd(args.zdd)
    state = init(zdd, 3)
    print(f"d {zdd.d}")
    print(f"vertices {zdd.n_vertices}")
    print(f"count {state.K}")
    print(f"L {state.L!r}")
    print(f"L2 {state.L2}")
    print(f"lambda {state.lam!r}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    for p in run_experiment(cfg):
        print(p)
    return EXIT_OK


def oracle_check(size: int, seed: int = 0) -> list[tuple[str, bool]]:
    """Brute-force cross-checks on the 3 x ``size`` grid."""
    graph = build_grid(GridSpec(3, size))
    zdd = build_st_paths(graph, graph.start, graph.goal)
    fam = enumerate_family(zdd)
    brute = brute_force_st_paths(graph, graph.start, graph.goal)
    checks = [
        ("zdd is ordered and reduced", not validate(zdd)),
        ("paths match depth-first enumeration", set(fam) == brute),
        ("count matches enumeration", count(zdd) == len(brute)),
        ("reduction round-trip is identical", reduce_from_family(fam, zdd.d) == zdd),
        ("max cardinality matches", max_cardinality(zdd) == max(len(x) for x in brute)),
    ]
    rng = np.random.default_rng(seed)
    log_w = rng.normal(size=zdd.d)
    ind = np.zeros((len(fam), zdd.d))
    for r, x in enumerate(fam):
        ind[r, [i - 1 for i in x]] = 1
    logp = ind @ log_w
    p = np.exp(logp - logp.max())
    p /= p.sum()
    P_brute = (ind * p[:, None]).T @ ind
    P = dp.cpm_from_weights(zdd, log_w)
    checks.append(("co-occurrence matrix matches brute force", np.abs(P - P_brute).max() < 1e-10))
    return checks


def cmd_oracle_check(args) -> int:
    checks = oracle_check(args.size)
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zddbandit", description="Combinatorial bandits on ZDD decision sets.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("build-paths", help="graph edge list -> ZDD of all simple start-goal paths")
    p.add_argument("graph")
    p.add_argument("out")
    p.add_argument("--start", type=int)
    p.add_argument("--goal", type=int)
    p.add_argument("--order", choices=("file", "bfs"), default="file",
                   help="variable order; 'bfs' renumbers arms in breadth-first edge order")
    p.set_defaults(func=cmd_build_paths)

    p = sub.add_parser("count", help="family size and largest member size of a ZDD")
    p.add_argument("zdd")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("stats", help="d, |V|, |S|, L and lambda of a ZDD")
    p.add_argument("zdd")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("run", help="run an experiment config", description=RUN_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("oracle-check", help="brute-force equivalence checks on a small grid")
    p.add_argument("--size", type=int, default=4, help="grid is 3 x SIZE (default 4)")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ZddError, GraphError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

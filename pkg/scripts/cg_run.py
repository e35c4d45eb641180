"""Congestion game: several COMBWM players routing over the same network.

Prints each player's mean regret and the two paths it picked most often.
"""
import argparse
import collections
import os

import numpy as np

from zddbandit.harness import ExperimentConfig
from zddbandit.harness.experiment import build_problem, run_trials, write_results


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graph", help="edge-list file with start/goal lines; default is a grid")
    ap.add_argument("--rows", type=int, default=3)
    ap.add_argument("--cols", type=int, default=3)
    ap.add_argument("--players", type=int, default=2)
    ap.add_argument("--kappa", type=float, default=10.0)
    ap.add_argument("--alpha", type=int, choices=(2, 3), default=3)
    ap.add_argument("--horizon", type=int, default=10**4)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/cg.csv")
    args = ap.parse_args()

    cfg = ExperimentConfig(problem="cg", graph_file=args.graph, grid_rows=args.rows, grid_cols=args.cols,
                           players=args.players, kappa=args.kappa, alpha=args.alpha, horizon=args.horizon,
                           trials=args.trials, seed=args.seed, workers=args.workers, output=args.out).validate()
    results = run_trials(cfg, build_problem(cfg))
    for p in write_results(cfg, results):
        print("wrote", p)
    for k in range(args.players):
        mean = np.array([r[k].regret for r in results]).mean(axis=0)
        top = collections.Counter(a for r in results for a in r[k].arms).most_common(2)
        print(f"player {k + 1}: final mean regret {mean[-1]:.1f}, R_T/T {mean[-1] / args.horizon:.4g}")
        for arms, n in top:
            print(f"    {n / (args.horizon * args.trials):.3f}  {arms}")


if __name__ == "__main__":
    main()

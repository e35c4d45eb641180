"""Online shortest path on a grid against the reset-Bernoulli adversary.

Writes the per-round and aggregate CSVs and prints the mean regret at a few
checkpoints next to the regret-bound leading terms.
"""
import argparse
import os

import numpy as np

from zddbandit.combwm import bound_expected, bound_highprob, init
from zddbandit.harness import ExperimentConfig
from zddbandit.harness.experiment import build_problem, run_trials, write_results


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=3)
    ap.add_argument("--cols", type=int, default=3)
    ap.add_argument("--alpha", type=int, choices=(2, 3), default=3)
    ap.add_argument("--horizon", type=int, default=10**5)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results/osp.csv")
    args = ap.parse_args()

    cfg = ExperimentConfig(problem="osp", grid_rows=args.rows, grid_cols=args.cols, alpha=args.alpha,
                           horizon=args.horizon, trials=args.trials, seed=args.seed, workers=args.workers,
                           output=args.out).validate()
    problem = build_problem(cfg)
    results = run_trials(cfg, problem)
    for p in write_results(cfg, results):
        print("wrote", p)

    s = init(problem.zdd, args.alpha)
    logged = results[0][0].logged
    mean = np.array([r[0].regret for r in results]).mean(axis=0)
    print(f"d={s.d} K={s.K} L^2={s.L2} lambda={s.lam:.6g}")
    print("t          mean_regret   R_t/t       bound")
    for t in sorted({int(x) for x in (10, 100, 1000, 10**4, 10**5, args.horizon)} & set(logged.tolist())):
        j = int(np.flatnonzero(logged == t)[0])
        b = (bound_expected(s.d, s.lam, s.L, s.K, t) if args.alpha == 2
             else bound_highprob(s.d, s.lam, s.L, s.K, 0.05, t))
        print(f"{t:<10} {mean[j]:<13.2f} {mean[j] / t:<11.4g} {b:.4g}")


if __name__ == "__main__":
    main()

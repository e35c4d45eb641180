"""Multi-trial experiment runner with deterministic CSV output."""
from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..builder import GridSpec, brute_force_steiner_trees, build_grid, build_st_paths, read_graph, reduce_from_family
from ..combwm import CombWM, log_checkpoints
from ..zdd import SuperArm, Zdd, min_additive_cost, read_zdd
from .config import ConfigError, ExperimentConfig
from .environments import CongestionEnv, ResetBernoulliAdversary, ZeroAdversary

log = logging.getLogger(__name__)

HEADER = ["trial", "player", "t", "chosen_cost", "cum_cost", "best_fixed_cost", "regret"]
AGG_HEADER = ["t", "mean_regret", "std_regret"]


@dataclass
class Problem:
    zdd: Zdd
    beta: np.ndarray | None = None


@dataclass
class PlayerTrace:
    arms: list[SuperArm]
    costs: np.ndarray
    cum_costs: np.ndarray
    logged: np.ndarray
    best_fixed: np.ndarray
    regret: np.ndarray
    losses: np.ndarray | None = None


def build_problem(cfg: ExperimentConfig) -> Problem:
    """Decision set (and edge lengths for the congestion game) from a config."""
    if cfg.problem == "custom-zdd":
        with open(cfg.zdd_file) as fh:
            return Problem(read_zdd(fh))
    if cfg.graph_file is not None:
        with open(cfg.graph_file) as fh:
            graph = read_graph(fh)
    else:
        graph = build_grid(GridSpec(cfg.grid_rows, cfg.grid_cols))
    if cfg.problem == "dst":
        if cfg.zdd_file is not None:
            with open(cfg.zdd_file) as fh:
                return Problem(read_zdd(fh))
        if not graph.terminals:
            raise ConfigError("dst needs terminal nodes")
        return Problem(reduce_from_family(brute_force_steiner_trees(graph, graph.terminals), graph.d))
    if graph.start is None or graph.goal is None:
        raise ConfigError("graph file needs 'start' and 'goal' lines")
    zdd = build_st_paths(graph, graph.start, graph.goal)
    beta = np.asarray(graph.beta) if cfg.problem == "cg" else None
    return Problem(zdd, beta)


def trial_streams(seed: int, trial: int, players: int) -> tuple[np.random.Generator, list[np.random.Generator]]:
    """Independent streams for the adversary and each player, keyed on ``seed + trial``."""
    ss = np.random.SeedSequence(seed + trial).spawn(1 + players)
    gens = [np.random.default_rng(s) for s in ss]
    return gens[0], gens[1:]


def play(zdd: Zdd, alpha: float, n_players: int, losses_for: Callable[[list[SuperArm]], list[np.ndarray]],
         horizon: int, policy_rngs: Sequence[np.random.Generator], checkpoints: np.ndarray | None = None,
         keep_losses: bool = False) -> list[PlayerTrace]:
    """Run ``n_players`` independent policies for ``horizon`` rounds.

    ``losses_for(choices)`` returns each player's full loss vector for the
    round; a policy only ever sees its own scalar cost.
    """
    players = [CombWM(zdd, alpha, policy_rngs[k]) for k in range(n_players)]
    logged = log_checkpoints(horizon) if checkpoints is None else np.asarray(checkpoints)
    log_set = set(int(x) for x in logged)
    d = zdd.d
    arms = [[] for _ in range(n_players)]
    costs = np.empty((n_players, horizon))
    cum_loss = np.zeros((n_players, d))
    best = [[] for _ in range(n_players)]
    hist = np.empty((n_players, horizon, d)) if keep_losses else None
    for t in range(1, horizon + 1):
        choices = [p.act() for p in players]
        ells = losses_for(choices)
        for k, p in enumerate(players):
            ell = ells[k]
            c = float(ell[[i - 1 for i in choices[k]]].sum())
            p.feedback(c)
            arms[k].append(choices[k])
            costs[k, t - 1] = c
            cum_loss[k] += ell
            if hist is not None:
                hist[k, t - 1] = ell
            if t in log_set:
                best[k].append(min_additive_cost(zdd, cum_loss[k])[0])
    traces = []
    for k in range(n_players):
        cum = np.cumsum(costs[k])
        b = np.array(best[k])
        traces.append(PlayerTrace(arms[k], costs[k], cum, logged, b, cum[logged - 1] - b,
                                  None if hist is None else hist[k]))
    return traces


def run_trial(cfg: ExperimentConfig, problem: Problem, trial: int, keep_losses: bool = False) -> list[PlayerTrace]:
    zdd = problem.zdd
    if cfg.problem == "cg":
        adv_rng, pol_rngs = trial_streams(cfg.seed, trial, cfg.players)
        env = CongestionEnv(problem.beta, cfg.kappa, cfg.players)
        return play(zdd, cfg.alpha, cfg.players, env.losses, cfg.horizon, pol_rngs, keep_losses=keep_losses)
    adv_rng, pol_rngs = trial_streams(cfg.seed, trial, 1)
    if cfg.adversary == "zero":
        adv = ZeroAdversary(zdd.d)
    else:
        adv = ResetBernoulliAdversary(zdd.d, adv_rng, cfg.reset_prob)
    return play(zdd, cfg.alpha, 1, lambda choices: [adv.step()], cfg.horizon, pol_rngs,
                keep_losses=keep_losses)


def _trial_job(args):
    cfg, problem, trial = args
    return run_trial(cfg, problem, trial)


def run_trials(cfg: ExperimentConfig, problem: Problem | None = None) -> list[list[PlayerTrace]]:
    """All trials, in trial order whatever the worker count."""
    problem = build_problem(cfg) if problem is None else problem
    jobs = [(cfg, problem, k) for k in range(cfg.trials)]
    if cfg.workers > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            return list(pool.map(_trial_job, jobs))
    return [_trial_job(j) for j in jobs]


def _fmt(x: float) -> str:
    return repr(float(x))


def aggregate_paths(output: str | Path, n_players: int) -> list[Path]:
    out = Path(output)
    stem = out.with_suffix("")
    if n_players == 1:
        return [Path(f"{stem}_agg.csv")]
    return [Path(f"{stem}_agg_p{k + 1}.csv") for k in range(n_players)]


def write_results(cfg: ExperimentConfig, results: list[list[PlayerTrace]]) -> list[Path]:
    out = Path(cfg.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for trial, traces in enumerate(results):
            for k, tr in enumerate(traces):
                for j, t in enumerate(tr.logged):
                    w.writerow([trial, k + 1, int(t), _fmt(tr.costs[t - 1]), _fmt(tr.cum_costs[t - 1]),
                                _fmt(tr.best_fixed[j]), _fmt(tr.regret[j])])
    n_players = len(results[0])
    paths = [out]
    for k, agg in enumerate(aggregate_paths(out, n_players)):
        reg = np.array([traces[k].regret for traces in results])
        logged = results[0][k].logged
        with open(agg, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(AGG_HEADER)
            for j, t in enumerate(logged):
                w.writerow([int(t), _fmt(reg[:, j].mean()), _fmt(reg[:, j].std())])
        paths.append(agg)
    return paths


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    """Run every trial and write the per-round and aggregate CSV files."""
    cfg.validate()
    results = run_trials(cfg)
    return write_results(cfg, results)

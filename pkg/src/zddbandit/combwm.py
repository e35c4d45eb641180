"""ComBand with weight modification, run directly on a ZDD decision set.

The policy keeps per-arm log-weights.  Each round it samples from a mixture of
the weight-induced distribution and the uniform distribution over the family,
observes only the scalar cost, forms an unbiased loss estimate through the
pseudo-inverse of the mixture's co-occurrence matrix, and rescales the
exponent of its weights to follow a decreasing learning-rate schedule.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import dp
from .linalg import DEFAULT_REL_TOL, WarmPinv, smallest_nonzero_eigenvalue
from .zdd import EmptyFamilyError, SuperArm, Zdd, count, max_cardinality, min_additive_cost

log = logging.getLogger(__name__)


@dataclass
class BanditState:
    zdd: Zdd
    alpha: float
    t: int
    log_w: np.ndarray
    L2: int
    lam: float
    K: int
    uniform_cpm: np.ndarray = field(repr=False)
    uniform_B: np.ndarray = field(repr=False)
    # fixed-rate ComBand when set: (gamma, eta) used every round, plain update
    fixed: tuple[float, float] | None = None

    @property
    def uniform_log_w(self) -> np.ndarray:
        return np.zeros(self.zdd.d)

    @property
    def L(self) -> float:
        return math.sqrt(self.L2)

    @property
    def d(self) -> int:
        return self.zdd.d

    def rates(self, t: int | None = None) -> tuple[float, float]:
        t = self.t if t is None else t
        if self.fixed is not None:
            return self.fixed
        return schedule(t, self.alpha, self.lam, self.L)


def schedule(t: int, alpha: float, lam: float, L: float) -> tuple[float, float]:
    """``gamma_t = t^(-1/alpha) / 2`` and ``eta_t = lam * t^(-1/alpha) / (2 L^2)``."""
    if t < 1:
        raise ValueError("rounds start at t = 1")
    base = t ** (-1.0 / alpha)
    return base / 2.0, lam * base / (2.0 * L * L)


def init(zdd: Zdd, alpha: float = 3, rel_tol: float = DEFAULT_REL_TOL,
         fixed: tuple[float, float] | None = None) -> BanditState:
    """Unit weights, plus the family constants ``L^2`` and ``lambda``."""
    if zdd.root == 0:
        raise EmptyFamilyError("bandit needs a nonempty decision set")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    L2 = max_cardinality(zdd)
    if L2 == 0:
        raise EmptyFamilyError("decision set {{}} has no arms to play")
    zeros = np.zeros(zdd.d)
    U = dp.cpm_from_weights(zdd, zeros)
    lam = smallest_nonzero_eigenvalue(U, rel_tol)
    if lam <= 0:
        raise ValueError("uniform co-occurrence matrix has no positive eigenvalue")
    return BanditState(zdd, alpha, 1, zeros, L2, lam, count(zdd), U,
                       dp.backward_weights(zdd, zeros), fixed)


def sample_action(state: BanditState, rng: np.random.Generator, gamma: float | None = None,
                  B: np.ndarray | None = None) -> SuperArm:
    """Draw from ``(1 - gamma) p(.; w) + gamma * uniform`` by picking a component first."""
    if gamma is None:
        gamma = state.rates()[0]
    zdd = state.zdd
    if rng.random() < gamma:
        return dp.draw_trusted(zdd, state.uniform_log_w, state.uniform_B, rng)
    if B is None:
        B = dp.backward_trusted(zdd, state.log_w)
    return dp.draw_trusted(zdd, state.log_w, B, rng)


def mixture_cpm(state: BanditState, gamma: float | None = None, B: np.ndarray | None = None) -> np.ndarray:
    if gamma is None:
        gamma = state.rates()[0]
    zdd, lw = state.zdd, state.log_w
    if B is None:
        B = dp.backward_trusted(zdd, lw)
    return dp.mixture_cpm_trusted(zdd, lw, B, gamma, state.uniform_cpm)


def estimate_loss(P_pinv: np.ndarray, cost: float, arms: SuperArm) -> np.ndarray:
    """``cost * P^+ 1_X``."""
    d = P_pinv.shape[0]
    if P_pinv.shape != (d, d):
        raise ValueError("pseudo-inverse must be square")
    idx = np.fromiter(arms, dtype=np.int64, count=len(arms)) - 1
    if idx.size and (idx.min() < 0 or idx.max() >= d):
        raise ValueError(f"super arm {arms} does not fit dimension {d}")
    if abs(cost) > 1:
        log.warning("cost %.6g violates |c_t| <= 1; estimates may be large", cost)
    return cost * P_pinv[:, idx].sum(axis=1)


def update_weights(state: BanditState, loss_estimate: np.ndarray) -> BanditState:
    """Advance one round: rescale the weight exponent and apply the loss estimate."""
    t = state.t
    loss_estimate = np.asarray(loss_estimate, dtype=np.float64)
    if loss_estimate.shape != (state.d,):
        raise ValueError("loss estimate has the wrong dimension")
    if state.fixed is not None:
        eta = state.fixed[1]
        log_w = state.log_w - eta * loss_estimate
    else:
        eta_t = state.rates(t)[1]
        eta_next = state.rates(t + 1)[1]
        log_w = (eta_next / eta_t) * state.log_w - eta_next * loss_estimate
    return replace(state, t=t + 1, log_w=log_w)


@dataclass
class RoundInfo:
    arms: SuperArm
    gamma: float
    eta: float
    P: np.ndarray
    P_pinv: np.ndarray
    loss_estimate: np.ndarray


class CombWM:
    """Stateful player: ``act`` picks a super arm, ``feedback`` takes its cost.

    The true loss vector never reaches this object.
    """

    def __init__(self, zdd: Zdd, alpha: float = 3, rng: np.random.Generator | None = None,
                 rel_tol: float = DEFAULT_REL_TOL, fixed: tuple[float, float] | None = None):
        self.state = init(zdd, alpha, rel_tol, fixed)
        self.rng = rng if rng is not None else np.random.default_rng()
        self.rel_tol = rel_tol
        self._pending: tuple[SuperArm, np.ndarray] | None = None
        self._pinv = WarmPinv(zdd.d, rel_tol)
        self._warned = False
        self.last: RoundInfo | None = None

    def act(self) -> SuperArm:
        B = dp.backward_trusted(self.state.zdd, self.state.log_w)
        arms = sample_action(self.state, self.rng, B=B)
        self._pending = (arms, B)
        return arms

    def feedback(self, cost: float) -> None:
        if self._pending is None:
            raise RuntimeError("feedback() without a preceding act()")
        arms, B = self._pending
        self._pending = None
        st = self.state
        gamma, eta = st.rates()
        P = mixture_cpm(st, gamma, B)
        P_pinv = self._pinv(P)
        if abs(cost) > 1:
            # once per player; congestion costs exceed 1 on most rounds
            level = logging.DEBUG if self._warned else logging.WARNING
            log.log(level, "round %d: cost %.6g violates |c_t| <= 1; estimates may be large", st.t, cost)
            self._warned = True
        est = cost * P_pinv[:, [i - 1 for i in arms]].sum(axis=1)
        self.last = RoundInfo(arms, gamma, eta, P, P_pinv, est)
        # same arithmetic as update_weights, in place on the policy's own state
        if st.fixed is not None:
            st.log_w = st.log_w - eta * est
        else:
            eta_next = st.rates(st.t + 1)[1]
            st.log_w = (eta_next / eta) * st.log_w - eta_next * est
        st.t += 1


@dataclass
class RegretTrace:
    """Per-round record; ``best_fixed`` and ``regret`` are filled at ``logged`` rounds."""

    arms: list[SuperArm]
    costs: np.ndarray
    cum_costs: np.ndarray
    logged: np.ndarray
    best_fixed: np.ndarray
    regret: np.ndarray
    losses: np.ndarray | None = None


def log_checkpoints(horizon: int, every_round_up_to: int = 10**4, per_decade: int = 10) -> np.ndarray:
    """Every round for short horizons; otherwise ``10^(k/per_decade)`` rounded, plus the horizon."""
    if horizon <= every_round_up_to:
        return np.arange(1, horizon + 1)
    top = math.log10(horizon)
    pts = {int(round(10 ** (k / per_decade))) for k in range(int(top * per_decade) + 1)}
    pts.add(horizon)
    return np.array(sorted(p for p in pts if 1 <= p <= horizon))


def run(zdd: Zdd, alpha: float, environment: Callable[[int], np.ndarray], horizon: int,
        rng: np.random.Generator, keep_losses: bool = False,
        checkpoints: np.ndarray | None = None) -> RegretTrace:
    """Play ``horizon`` rounds against ``environment(t) -> loss vector``.

    Regret at a logged round is the cumulative cost minus the best fixed
    member's cumulative loss, computed from the running loss sum.
    """
    player = CombWM(zdd, alpha, rng)
    logged = log_checkpoints(horizon) if checkpoints is None else np.asarray(checkpoints)
    log_set = set(int(x) for x in logged)
    arms_hist: list[SuperArm] = []
    costs = np.empty(horizon)
    cum_loss = np.zeros(zdd.d)
    best = []
    losses = np.empty((horizon, zdd.d)) if keep_losses else None
    for t in range(1, horizon + 1):
        arms = player.act()
        ell = np.asarray(environment(t), dtype=np.float64)
        c = float(ell[[i - 1 for i in arms]].sum())
        player.feedback(c)
        arms_hist.append(arms)
        costs[t - 1] = c
        cum_loss += ell
        if losses is not None:
            losses[t - 1] = ell
        if t in log_set:
            best.append(min_additive_cost(zdd, cum_loss)[0])
    cum_costs = np.cumsum(costs)
    best_arr = np.array(best)
    return RegretTrace(arms_hist, costs, cum_costs, logged, best_arr,
                       cum_costs[logged - 1] - best_arr, losses)


def bound_highprob(d: int, lam: float, L: float, K: int, delta: float, T: float) -> float:
    """Leading ``T^(2/3)`` term of the high-probability regret bound (alpha = 3)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if d <= 0 or lam <= 0 or L <= 0 or K < 1 or T <= 0:
        raise ValueError("d, lambda, L, T must be positive and K >= 1")
    coef = 3 * d * (math.e - 2) * lam / (4 * L * L) + 1.5 + L * math.sqrt(7 / lam * math.log((K + 2) / delta))
    return coef * T ** (2.0 / 3.0)


def bound_expected(d: int, lam: float, L: float, K: int, T: float) -> float:
    """Leading ``sqrt(T)`` term of the expected regret bound (alpha = 2)."""
    if d <= 0 or lam <= 0 or L <= 0 or K < 1 or T <= 0:
        raise ValueError("d, lambda, L, T must be positive and K >= 1")
    coef = 2 * L * L * math.log(K) / lam + (math.e - 2) * d * lam / (L * L) + 2
    return coef * math.sqrt(T)

"""Loss generators: the reset-Bernoulli adversary and the congestion game."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..zdd import SuperArm, Zdd, contains


class ResetBernoulliAdversary:
    """Per-arm losses of exactly ``+1/d`` or ``-1/d``.

    Arm ``i`` is positive with probability ``mu[i]``.  ``mu`` starts uniform on
    ``[0, 1]^d`` and, from round 2 on, is redrawn with probability
    ``reset_prob`` before the round's losses are emitted.  The sign draw is
    per arm (``h_i ~ Ber(mu_i)``).
    """

    def __init__(self, d: int, rng: np.random.Generator, reset_prob: float = 0.1):
        if not 0 <= reset_prob <= 1:
            raise ValueError("reset_prob must lie in [0, 1]")
        self.d = d
        self.rng = rng
        self.reset_prob = reset_prob
        self.mu = rng.random(d)
        self.t = 0

    def step(self) -> np.ndarray:
        self.t += 1
        if self.t > 1 and self.rng.random() < self.reset_prob:
            self.mu = self.rng.random(self.d)
        h = self.rng.random(self.d) < self.mu
        return np.where(h, 1.0 / self.d, -1.0 / self.d)

    def __call__(self, t: int) -> np.ndarray:
        return self.step()


class ZeroAdversary:
    def __init__(self, d: int):
        self.d = d

    def step(self) -> np.ndarray:
        return np.zeros(self.d)

    def __call__(self, t: int) -> np.ndarray:
        return self.step()


def cg_losses(choices: Sequence[SuperArm], beta: Sequence[float], kappa: float,
              zdd: Zdd | None = None) -> list[np.ndarray]:
    """Per-player loss vectors ``beta_i * kappa ** (other players on edge i)``."""
    beta = np.asarray(beta, dtype=np.float64)
    d = beta.shape[0]
    if zdd is not None:
        for k, arms in enumerate(choices):
            if not contains(zdd, arms):
                raise ValueError(f"player {k + 1} chose {arms}, not in the decision set")
    use = np.zeros((len(choices), d), dtype=np.int64)
    for k, arms in enumerate(choices):
        use[k, [i - 1 for i in arms]] = 1
    total = use.sum(axis=0)
    return [beta * float(kappa) ** (total - use[k]) for k in range(len(choices))]


@dataclass
class CongestionEnv:
    beta: np.ndarray
    kappa: float = 10.0
    m: int = 2
    zdd: Zdd | None = None

    def losses(self, choices: Sequence[SuperArm]) -> list[np.ndarray]:
        if len(choices) != self.m:
            raise ValueError(f"expected {self.m} choices, got {len(choices)}")
        return cg_losses(choices, self.beta, self.kappa, self.zdd)

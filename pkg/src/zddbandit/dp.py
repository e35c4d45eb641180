"""Weighted dynamic programs over a ZDD, all in the log domain.

``log_w[i-1]`` is the log-weight of arm ``i``; ``-inf`` is a weight of zero.
The constrained distribution puts mass ``prod_{i in X} w_i / Z`` on each
member ``X``.

Per-vertex tables:

* forward ``F[v]``: log of the total weight of root-to-``v`` routes,
* backward ``B[v]``: log of the total weight of ``v``-to-1 routes,
* ``C[v, j]``: log of the total weight of ``v``-to-1 routes that use arm ``j+1``.

The hot path stores ``C`` relative to ``B`` as plain probabilities in [0, 1],
which keeps the d-wide inner loop free of transcendental calls without
giving up range.
"""
from __future__ import annotations

import math

import numba
import numpy as np

from .zdd import EmptyFamilyError, SuperArm, Zdd

NEG_INF = -np.inf


class ZeroWeightError(EmptyFamilyError):
    pass


@numba.njit(cache=True, inline="always")
def _lae(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@numba.njit(cache=True)
def _forward(label, lo, hi, root, log_w):
    F = np.full(label.shape[0], -np.inf)
    F[root] = 0.0
    for v in range(root, 1, -1):
        f = F[v]
        if f == -np.inf:
            continue
        F[lo[v]] = _lae(F[lo[v]], f)
        F[hi[v]] = _lae(F[hi[v]], f + log_w[label[v] - 1])
    return F


@numba.njit(cache=True)
def _backward(label, lo, hi, root, log_w):
    B = np.full(label.shape[0], -np.inf)
    B[1] = 0.0
    for v in range(2, root + 1):
        B[v] = _lae(B[lo[v]], log_w[label[v] - 1] + B[hi[v]])
    return B


@numba.njit(cache=True)
def _bwc(label, lo, hi, root, log_w, B):
    n = label.shape[0]
    d = log_w.shape[0]
    C = np.full((n, d), -np.inf)
    for v in range(2, root + 1):
        i = label[v] - 1
        lw = log_w[i]
        C[v, i] = lw + B[hi[v]]
        for j in range(i + 1, d):
            C[v, j] = _lae(C[lo[v], j], lw + C[hi[v], j])
    return C


@numba.njit(cache=True)
def _cpm(label, hi, root, log_w, F, B, C):
    d = log_w.shape[0]
    P = np.zeros((d, d))
    log_z = B[root]
    for v in range(2, root + 1):
        if F[v] == -np.inf:
            continue
        i = label[v] - 1
        base = F[v] + log_w[i] - log_z
        P[i, i] += math.exp(base + B[hi[v]])
        for j in range(i + 1, d):
            c = C[hi[v], j]
            if c != -np.inf:
                P[i, j] += math.exp(base + c)
    for i in range(d):
        for j in range(i + 1, d):
            P[j, i] = P[i, j]
    return P


@numba.njit(cache=True)
def _branch_probs(label, lo, hi, root, log_w, B):
    # chance that a route drawn from v takes the hi / lo arc
    n = label.shape[0]
    p_hi = np.zeros(n)
    p_lo = np.zeros(n)
    for v in range(2, root + 1):
        if B[v] != -np.inf:
            p_hi[v] = math.exp(log_w[label[v] - 1] + B[hi[v]] - B[v])
            p_lo[v] = math.exp(B[lo[v]] - B[v])
    return p_hi, p_lo


@numba.njit(cache=True)
def _cond_marginals(label, lo, hi, root, p_hi, p_lo, d):
    # R[v, j] = exp(C[v, j] - B[v]), the chance that arm j+1 lies on a route drawn
    # from v. Each row mixes its children's rows, so entries stay in [0, 1].
    R = np.zeros((label.shape[0], d))
    for v in range(2, root + 1):
        i = label[v] - 1
        a = p_lo[v]
        b = p_hi[v]
        R[v, i] = b
        rl = R[lo[v]]
        rh = R[hi[v]]
        for j in range(i + 1, d):
            R[v, j] = a * rl[j] + b * rh[j]
    return R


@numba.njit(cache=True)
def _cpm_scaled(label, lo, hi, root, log_w, B):
    # same matrix as _cpm with every table kept as a probability, so the
    # d-wide inner loops need no exp or log
    d = log_w.shape[0]
    p_hi, p_lo = _branch_probs(label, lo, hi, root, log_w, B)
    R = _cond_marginals(label, lo, hi, root, p_hi, p_lo, d)
    reach = np.zeros(label.shape[0])
    reach[root] = 1.0
    P = np.zeros((d, d))
    for v in range(root, 1, -1):
        r = reach[v]
        if r == 0.0:
            continue
        q = r * p_hi[v]
        reach[lo[v]] += r * p_lo[v]
        reach[hi[v]] += q
        i = label[v] - 1
        P[i, i] += q
        rh = R[hi[v]]
        for j in range(i + 1, d):
            P[i, j] += q * rh[j]
    for i in range(d):
        for j in range(i + 1, d):
            P[j, i] = P[i, j]
    return P


@numba.njit(cache=True)
def _draw_many(label, lo, hi, root, log_w, B, uniforms):
    n, d = uniforms.shape
    out = np.zeros((n, d), dtype=np.bool_)
    for k in range(n):
        v = root
        step = 0
        while v > 1:
            i = label[v] - 1
            theta = math.exp(log_w[i] + B[hi[v]] - B[v])
            if uniforms[k, step] < theta:
                out[k, i] = True
                v = hi[v]
            else:
                v = lo[v]
            step += 1
    return out


@numba.njit(cache=True)
def _draw_one(label, lo, hi, root, log_w, B, uniforms):
    arms = np.empty(uniforms.shape[0], dtype=np.int64)
    n = 0
    v = root
    step = 0
    while v > 1:
        theta = math.exp(log_w[label[v] - 1] + B[hi[v]] - B[v])
        if uniforms[step] < theta:
            arms[n] = label[v]
            n += 1
            v = hi[v]
        else:
            v = lo[v]
        step += 1
    return arms[:n]


@numba.njit(cache=True)
def _mixture_cpm(label, lo, hi, root, log_w, B, gamma, U):
    return (1.0 - gamma) * _cpm_scaled(label, lo, hi, root, log_w, B) + gamma * U


def _log_weights(zdd: Zdd, log_w) -> np.ndarray:
    log_w = np.ascontiguousarray(log_w, dtype=np.float64)
    if log_w.shape != (zdd.d,):
        raise ValueError(f"log-weight vector has shape {log_w.shape}, expected ({zdd.d},)")
    if np.any(np.isnan(log_w)) or np.any(log_w == np.inf):
        raise ValueError("log-weights must be finite or -inf")
    return log_w


def forward_weights(zdd: Zdd, log_w) -> np.ndarray:
    return _forward(zdd.label, zdd.lo, zdd.hi, zdd.root, _log_weights(zdd, log_w))


def backward_weights(zdd: Zdd, log_w) -> np.ndarray:
    return _backward(zdd.label, zdd.lo, zdd.hi, zdd.root, _log_weights(zdd, log_w))


def partition(zdd: Zdd, log_w) -> float:
    """``log Z``; ``-inf`` for an empty or zero-weight family."""
    return float(backward_weights(zdd, log_w)[zdd.root])


def bwc(zdd: Zdd, log_w, B: np.ndarray) -> np.ndarray:
    """Backward weighted co-occurrence table, shape ``(n_vertices, d)``."""
    return _bwc(zdd.label, zdd.lo, zdd.hi, zdd.root, _log_weights(zdd, log_w), B)


def _check_mass(zdd: Zdd, B: np.ndarray) -> None:
    if zdd.root == 0 or B[zdd.root] == NEG_INF:
        raise ZeroWeightError("family is empty or has zero total weight")


def cpm(zdd: Zdd, log_w, F: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Co-occurrence probability matrix: ``P[i-1, j-1] = p(i in X and j in X)``."""
    _check_mass(zdd, B)
    return _cpm(zdd.label, zdd.hi, zdd.root, _log_weights(zdd, log_w), F, B, C)


def cpm_from_weights(zdd: Zdd, log_w) -> np.ndarray:
    """Backward pass plus co-occurrence pass, returning the CPM."""
    log_w = _log_weights(zdd, log_w)
    B = backward_weights(zdd, log_w)
    _check_mass(zdd, B)
    return _cpm_scaled(zdd.label, zdd.lo, zdd.hi, zdd.root, log_w, B)


def draw_many(zdd: Zdd, log_w, B: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` independent exact samples as an ``(n, d)`` boolean indicator matrix."""
    _check_mass(zdd, B)
    uniforms = rng.random((n, zdd.d))
    return _draw_many(zdd.label, zdd.lo, zdd.hi, zdd.root, _log_weights(zdd, log_w), B, uniforms)


def draw(zdd: Zdd, log_w, B: np.ndarray, rng: np.random.Generator) -> SuperArm:
    """One sample by top-down descent, flipping a biased coin at each vertex.

    Consumes ``d`` uniforms from ``rng``, the same as one row of :func:`draw_many`.
    """
    _check_mass(zdd, B)
    return draw_trusted(zdd, _log_weights(zdd, log_w), B, rng)


def draw_trusted(zdd: Zdd, log_w: np.ndarray, B: np.ndarray, rng: np.random.Generator) -> SuperArm:
    return tuple(_draw_one(zdd.label, zdd.lo, zdd.hi, zdd.root, log_w, B, rng.random(zdd.d)).tolist())


def mixture_cpm_trusted(zdd: Zdd, log_w: np.ndarray, B: np.ndarray, gamma: float, U: np.ndarray) -> np.ndarray:
    """``(1 - gamma) * CPM(log_w) + gamma * U`` without input checks (hot loop)."""
    return _mixture_cpm(zdd.label, zdd.lo, zdd.hi, zdd.root, log_w, B, gamma, U)


def backward_trusted(zdd: Zdd, log_w: np.ndarray) -> np.ndarray:
    return _backward(zdd.label, zdd.lo, zdd.hi, zdd.root, log_w)

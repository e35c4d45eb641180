"""Symmetric eigensolver, pseudo-inverse and smallest nonzero eigenvalue.

The eigensolver is a cyclic Jacobi iteration, adequate (and accurate) for the
dense PSD matrices of dimension up to a few hundred that the bandit needs.
"""
from __future__ import annotations

import math

import numba
import numpy as np

DEFAULT_REL_TOL = 1e-9


class NotSymmetricError(ValueError):
    pass


@numba.njit(cache=True)
def _jacobi(a, max_sweeps):
    return _jacobi_from(a, np.eye(a.shape[0]), max_sweeps)


@numba.njit(cache=True)
def _jacobi_from(a, V0, max_sweeps):
    # rotations start from the basis V0, so a good guess converges in a sweep or two
    n = a.shape[0]
    V = V0.copy()
    A = V.T @ a @ V
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += A[i, j] * A[i, j]
    if scale == 0.0:
        return np.zeros(n), V
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += A[i, j] * A[i, j]
        if off <= 1e-32 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
    w = np.empty(n)
    for i in range(n):
        w[i] = A[i, i]
    return w, V


@numba.njit(cache=True)
def _pinv_kernel(M, rel_tol, max_sweeps):
    return _pinv_from(M, np.eye(M.shape[0]), rel_tol, max_sweeps)[0]


@numba.njit(cache=True)
def _pinv_from(M, V0, rel_tol, max_sweeps):
    w, V = _jacobi_from(M, V0, max_sweeps)
    top = 0.0
    for x in w:
        if x > top:
            top = x
    n = w.shape[0]
    inv = np.zeros(n)
    for i in range(n):
        if top > 0.0 and w[i] > rel_tol * top:
            inv[i] = 1.0 / w[i]
    out = (V * inv) @ V.T
    return 0.5 * (out + out.T), V


def _as_symmetric(M) -> np.ndarray:
    M = np.ascontiguousarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetricError(f"expected a square matrix, got shape {M.shape}")
    if np.abs(M - M.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(M).max(initial=0.0)):
        raise NotSymmetricError("matrix is not symmetric")
    return M


def eigh(M, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns)."""
    M = _as_symmetric(M)
    w, V = _jacobi(M, max_sweeps)
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def _kept(w: np.ndarray, rel_tol: float) -> np.ndarray:
    top = w.max(initial=0.0)
    return w > rel_tol * top if top > 0 else np.zeros(w.shape, dtype=bool)


def pinv_symmetric(M, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric PSD matrix.

    Eigenvalues at or below ``rel_tol * max_eigenvalue`` are treated as zero.
    """
    return _pinv_kernel(_as_symmetric(M), rel_tol, 100)


def pinv_trusted(M: np.ndarray, rel_tol: float = DEFAULT_REL_TOL) -> np.ndarray:
    """:func:`pinv_symmetric` without the symmetry check, for matrices built symmetric."""
    return _pinv_kernel(M, rel_tol, 100)


def smallest_nonzero_eigenvalue(M, rel_tol: float = DEFAULT_REL_TOL) -> float:
    w, _ = eigh(M)
    keep = _kept(w, rel_tol)
    if not keep.any():
        raise ValueError("matrix has no eigenvalue above the rank threshold")
    return float(w[keep].min())


class WarmPinv:
    """Pseudo-inverse for a slowly drifting sequence of symmetric matrices.

    Each call starts the Jacobi rotations from the previous eigenbasis.
    """

    def __init__(self, d: int, rel_tol: float = DEFAULT_REL_TOL):
        self.V = np.eye(d)
        self.rel_tol = rel_tol

    def __call__(self, M: np.ndarray) -> np.ndarray:
        out, V = _pinv_from(M, self.V, self.rel_tol, 100)
        self.V = V
        return out

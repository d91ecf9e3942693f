"""Trace post-processing: log-log rate fits, triangular condition estimates
and singular-value decay of basis-value matrices."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .errors import NumericalError


def fit_rate(xs, ys, window: tuple[float, float] | None = None) -> float:
    """Least-squares slope of log(ys) against log(xs).

    `window` is an inclusive (lo, hi) range on the xs values; the default is
    the second half of the trace, which skips the pre-asymptotic steps.
    Non-finite ys are dropped; nonpositive ys inside the window are an error.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-d arrays of equal length")
    if window is None:
        window = (xs[-1] / 2.0, xs[-1])
    lo, hi = window
    mask = (xs >= lo) & (xs <= hi) & np.isfinite(ys)
    if np.any(ys[mask] <= 0.0):
        raise ValueError("rate fit needs positive values inside the window")
    if mask.sum() < 5:
        raise ValueError("rate window must contain at least 5 samples")
    return float(np.polyfit(np.log(xs[mask]), np.log(ys[mask]), 1)[0])


def _hager_inverse_norm1(tri: np.ndarray, max_iter: int = 5) -> float:
    """Deterministic Hager estimate of ||C^{-1}||_1 via triangular solves."""
    n = tri.shape[0]
    x = np.full(n, 1.0 / n)
    best = 0.0
    for _ in range(max_iter):
        y = solve_triangular(tri, x, lower=True)
        best = max(best, float(np.abs(y).sum()))
        xi = np.where(y >= 0.0, 1.0, -1.0)
        z = solve_triangular(tri, xi, lower=True, trans="T")
        j = int(np.argmax(np.abs(z)))
        if abs(z[j]) <= float(z @ x):
            break
        x = np.zeros(n)
        x[j] = 1.0
    return best


def condition_estimate(tri) -> float:
    """1-norm condition estimate ||C||_1 * est(||C^{-1}||_1) of a
    lower-triangular matrix; the inverse norm comes from Hager-style probe
    iterations, never from an explicit inverse."""
    tri = np.asarray(tri, dtype=float)
    if tri.ndim != 2 or tri.shape[0] != tri.shape[1]:
        raise ValueError("condition_estimate needs a square matrix")
    n = tri.shape[0]
    if n == 0:
        return 1.0
    if np.any(np.diag(tri) == 0.0):
        raise NumericalError("triangular matrix is singular (zero diagonal)")
    norm1 = float(np.abs(tri).sum(axis=0).max())
    return norm1 * _hager_inverse_norm1(tri)


def _jacobi_eigenvalues(G: np.ndarray, tol: float = 1e-10,
                        max_sweeps: int = 60) -> np.ndarray:
    """Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls
    under tol times the matrix norm."""
    A = G.copy()
    n = A.shape[0]
    if n < 2:
        return np.diag(A).copy()
    scale = float(np.linalg.norm(A)) or 1.0
    skip = tol * scale / (10.0 * n)
    for _ in range(max_sweeps):
        off = float(np.sqrt(np.sum(A**2) - np.sum(np.diag(A) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= skip:
                    continue
                theta = 0.5 * np.arctan2(2.0 * apq, A[q, q] - A[p, p])
                c, s = np.cos(theta), np.sin(theta)
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
    return np.diag(A).copy()


def singular_values(matrix) -> np.ndarray:
    """Descending singular values, via a cyclic Jacobi eigen-solve of the
    smaller Gram of the matrix."""
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2:
        raise ValueError("singular_values needs a 2-d matrix")
    if min(M.shape) == 0:
        return np.zeros(0)
    G = M @ M.T if M.shape[0] <= M.shape[1] else M.T @ M
    eig = _jacobi_eigenvalues(G)
    return np.sort(np.sqrt(np.clip(eig, 0.0, None)))[::-1]

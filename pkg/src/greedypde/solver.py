"""Basis evaluation, Newton-coefficient transforms and projection solving.

The orthonormal basis functions are v_{mu_k}(x) = sum_j C[k,j] v_{lam_j}(x)
over the Riesz representers of the selected functionals; the projection of u
onto their span is sum_k mu_k(u) v_{mu_k} with coefficients obtained from the
raw data by the triangular transform.  A dense symmetric-collocation solve is
provided as the independent oracle for the whole pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .engine import GreedyState
from .errors import NumericalError
from .functionals import FunctionalSet, gram, riesz_value
from .kernels import KernelSpec, kernel_value
from .parallel import map_blocks


@dataclass
class BasisEvaluation:
    """Values of the orthonormal basis on a point set; row k is basis k."""

    points: np.ndarray
    values: np.ndarray


@dataclass
class ProjectionSolution:
    """Raw data on the selected functionals and its orthonormal coefficients."""

    data: np.ndarray
    newton_coefficients: np.ndarray


def evaluate_basis(state: GreedyState, fset: FunctionalSet | None = None,
                   spec: KernelSpec | None = None, points=None,
                   workers: int = 1) -> BasisEvaluation:
    """All basis functions on the points, as the C-weighted combination of
    raw representer values."""
    fset = fset if fset is not None else state.fset
    spec = spec if spec is not None else state.spec
    pts = np.atleast_2d(np.asarray(points, dtype=float))

    def raw_row(f):
        return map_blocks(lambda lo, hi: riesz_value(f, pts[lo:hi], spec),
                          len(pts), workers)

    raw = np.array([raw_row(fset.entries[i]) for i in state.selected])
    if len(state.selected) == 0:
        return BasisEvaluation(points=pts, values=np.zeros((0, len(pts))))
    values = state.c_matrix() @ raw
    return BasisEvaluation(points=pts, values=values)


def power_on_deltas(state: GreedyState, basis_eval: BasisEvaluation,
                    spec: KernelSpec | None = None) -> np.ndarray:
    """P^2(delta_x) = K(x,x) - sum_k v_{mu_k}(x)^2 per point, clamped at 0."""
    spec = spec if spec is not None else state.spec
    kxx = kernel_value(spec, np.zeros(spec.d), np.zeros(spec.d))
    p2 = kxx - (basis_eval.values**2).sum(axis=0)
    return np.maximum(p2, 0.0)


def data_to_newton(state: GreedyState, data) -> np.ndarray:
    """Orthonormal coefficients mu_k(u) from raw data lam_k(u) through the
    triangular system."""
    data = np.asarray(data, dtype=float)
    n = state.n
    if data.shape != (n,):
        raise ValueError(f"expected data of length {n}, got shape {data.shape}")
    ctri = state._c
    return np.array([ctri[k, : k + 1] @ data[: k + 1] for k in range(n)])


def project(state: GreedyState, data) -> ProjectionSolution:
    data = np.asarray(data, dtype=float)
    return ProjectionSolution(data=data, newton_coefficients=data_to_newton(state, data))


def approximate(newton_coefficients, basis_eval: BasisEvaluation) -> np.ndarray:
    """u~(x) = sum_k mu_k(u) v_{mu_k}(x) on the evaluation points; a prefix
    of the coefficients projects onto the corresponding prefix basis."""
    mu = np.asarray(newton_coefficients, dtype=float)
    if mu.size > basis_eval.values.shape[0]:
        raise ValueError("more coefficients than basis functions")
    return mu @ basis_eval.values[: mu.size]


def direct_collocation_solve(fset: FunctionalSet, selected, data,
                             spec: KernelSpec, points) -> np.ndarray:
    """Dense symmetric-collocation oracle: solve the selected Gram system and
    evaluate the representer combination on the points.

    Raises NumericalError when the Gram cannot be factorized, which is the
    expected failure mode for large selections; intended for modest N.
    """
    selected = list(selected)
    entries = [fset.entries[i] for i in selected]
    A = gram(entries, spec)
    data = np.asarray(data, dtype=float)
    try:
        factor = cho_factor(A)
    except LinAlgError as exc:
        raise NumericalError(f"collocation Gram is not factorable: {exc}") from exc
    # pivots are square roots of Schur complements; a 1e-7 relative pivot
    # means the Gram condition is past ~1e14 and the solve is garbage
    pivots = np.abs(np.diag(factor[0]))
    if pivots.min() <= 1e-7 * pivots.max():
        raise NumericalError("collocation Gram is numerically singular")
    alpha = cho_solve(factor, data)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    raw = np.array([riesz_value(f, pts, spec) for f in entries])
    return alpha @ raw

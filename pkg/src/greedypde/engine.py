"""Greedy selection loop with incremental orthonormalization.

After N steps the state holds the selected indices, the lower-triangular
coefficient matrix C expressing the orthonormal functionals in terms of the
selected ones (mu_k = sum_{j<=k} C[k,j] lam_{sel_j}), one "Newton column"
(lam, mu_k) per step over the whole candidate set, and the residual powers
P^2(lam) = (lam,lam) - sum_k (lam,mu_k)^2 that drive selection.  Bulk storage
is (N+2)|Lambda| floats plus the C triangle; each step costs O(N |Lambda|)
plus |Lambda| kernel evaluations.

The standard rule picks the residual-power argmax over the whole set; the
extended rule prefers the strongest boundary delta whenever the delta power
over an evaluation point set peaks on the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .errors import Converged, InvalidSelectionError, NumericalError
from .functionals import (
    FunctionalSet,
    dual_inner_column,
    riesz_value,
    self_inner_column,
)
from .geometry import EvalGrid, fill_distance
from .kernels import KernelSpec, kernel_value
from .parallel import map_blocks

# Power drop factor under which a second orthogonalization pass runs
# (twice-is-enough Gram-Schmidt).
REORTH_THRESHOLD = 1e-6

# Relative residual floor: anything below -1e-6 * diag signals a broken Gram.
_NEGATIVE_FLOOR = 1e-6


class GreedyState:
    """Mutable selection state over a fixed functional set."""

    def __init__(self, fset: FunctionalSet, spec: KernelSpec):
        self.fset = fset
        self.spec = spec
        self.diag = self_inner_column(fset, spec)
        self.residual_power = self.diag.copy()
        self.selected: list[int] = []
        n = len(fset)
        self._cap = 16
        self._columns = np.zeros((self._cap, n))
        self._c = np.zeros((self._cap, self._cap))

    @property
    def n(self) -> int:
        return len(self.selected)

    @property
    def newton_columns(self) -> np.ndarray:
        """(N, |Lambda|) matrix; row k holds (lam, mu_k) over the set."""
        return self._columns[: self.n]

    def c_matrix(self) -> np.ndarray:
        """Dense lower-triangular copy of the coefficient matrix."""
        return np.tril(self._c[: self.n, : self.n])

    def sigma(self) -> float:
        """Current sup of the power function over the candidate set."""
        return math.sqrt(max(float(self.residual_power.max()), 0.0))

    def bulk_float_count(self) -> int:
        """Floats allocated in the bulk arrays (storage-contract counter)."""
        return self._columns.size + self._c.size + self.diag.size + self.residual_power.size

    def _grow(self) -> None:
        n = len(self.fset)
        cap = self._cap * 2
        cols = np.zeros((cap, n))
        cols[: self.n] = self._columns[: self.n]
        c = np.zeros((cap, cap))
        c[: self.n, : self.n] = self._c[: self.n, : self.n]
        self._cap, self._columns, self._c = cap, cols, c


def init(fset: FunctionalSet, spec: KernelSpec) -> GreedyState:
    """Fresh state: residual power equals the squared dual norm everywhere."""
    return GreedyState(fset, spec)


def restore_state(fset: FunctionalSet, c_matrix, spec: KernelSpec) -> GreedyState:
    """State stub for solving with a stored basis: the whole set is the
    selection, in order, with the given coefficient matrix.

    Newton columns and residual powers are not reconstructed; the result
    supports the solver operations (basis evaluation, data transforms) but
    not further greedy steps.
    """
    c_matrix = np.atleast_2d(np.asarray(c_matrix, dtype=float))
    n = len(fset)
    if c_matrix.shape != (n, n):
        raise ValueError(f"coefficient matrix shape {c_matrix.shape} != ({n}, {n})")
    state = GreedyState(fset, spec)
    while state._cap < n:
        state._grow()
    state._c[:n, :n] = np.tril(c_matrix)
    state.selected = list(range(n))
    return state


def _threshold(state: GreedyState, stop_tol: float) -> float:
    return stop_tol * float(state.diag.max())


def select_standard(state: GreedyState, stop_tol: float = 0.0) -> int:
    """Index of the largest residual power; the lowest index wins ties.

    Raises Converged when the maximum is at or below stop_tol * max(diag).
    """
    i = int(np.argmax(state.residual_power))
    if state.residual_power[i] <= _threshold(state, stop_tol):
        raise Converged(f"residual power exhausted after {state.n} steps")
    return i


def select_extended(state: GreedyState, delta_power_max: float,
                    delta_power_argmax_is_boundary: bool,
                    stop_tol: float = 0.0) -> int:
    """Prefer the strongest boundary delta when the delta power over the
    evaluation set peaks on the boundary; otherwise fall back to the
    standard rule."""
    if delta_power_argmax_is_boundary:
        bidx = state.fset.boundary_indices
        if bidx.size:
            j = int(bidx[np.argmax(state.residual_power[bidx])])
            if state.residual_power[j] > _threshold(state, stop_tol):
                return j
    return select_standard(state, stop_tol)


def extend(state: GreedyState, chosen: int, fset: FunctionalSet | None = None,
           spec: KernelSpec | None = None, workers: int = 1) -> GreedyState:
    """Add the chosen functional: new C row, new Newton column over the whole
    set, deflated residual powers.

    The raw cross column (lam, lam_chosen) is overwritten in place by
    (lam, mu_new); a second orthogonalization pass runs when the power drop
    factor residual/diag falls below REORTH_THRESHOLD.
    """
    fset = fset if fset is not None else state.fset
    spec = spec if spec is not None else state.spec
    r = float(state.residual_power[chosen])
    if r <= 0.0 or chosen in state.selected:
        raise InvalidSelectionError(
            f"functional {chosen} has no residual power left (P^2 = {r!r})"
        )
    N = state.n
    if N == state._cap:
        state._grow()
    cols = state._columns[:N]
    ctri = state._c[:N, :N]

    w = dual_inner_column(fset.entries[chosen], fset, spec, workers=workers)
    proj = cols[:, chosen].copy()
    if N:
        w -= proj @ cols
    brow = np.zeros(N + 1)
    brow[N] = 1.0
    if N:
        brow[:N] = -(proj @ ctri)

    p2 = r
    if N and r < REORTH_THRESHOLD * float(state.diag[chosen]):
        sel = np.asarray(state.selected, dtype=int)
        s = ctri @ w[sel]
        w -= s @ cols
        brow[:N] -= s @ ctri
        p2 = float(brow[:N] @ w[sel] + w[chosen])
        if p2 <= 0.0:
            raise NumericalError("reorthogonalization lost positivity")

    c = 1.0 / math.sqrt(p2)
    w *= c
    state._columns[N] = w
    state._c[N, : N + 1] = c * brow
    state.selected.append(int(chosen))

    res = state.residual_power - w**2
    if float((res / state.diag).min()) < -_NEGATIVE_FLOOR:
        raise NumericalError("residual power went negative beyond roundoff")
    np.maximum(res, 0.0, out=res)
    state.residual_power = res
    return state


@dataclass
class RunTrace:
    """Per-step record of the run; arrays are aligned with `steps`.

    `rho` is NaN at steps where the evaluation grid was not synced.
    `boundary_power_max` (max residual power over the boundary deltas) and
    `ratio_rho_sigma` are in-memory diagnostics, not part of the CSV schema.
    """

    steps: np.ndarray
    sigma: np.ndarray
    rho: np.ndarray
    kind: list[str]
    h_domain: np.ndarray
    h_boundary: np.ndarray
    cond_c: np.ndarray
    boundary_power_max: np.ndarray | None = field(default=None, repr=False)

    def boundary_count(self) -> int:
        return sum(1 for k in self.kind if k == "B")


class _GridTracker:
    """Incremental basis values and residual delta powers on a point grid.

    Rows are brought up to date lazily: row k only needs the C row of step k
    and the raw representer rows of steps <= k, so deferred syncing produces
    bit-identical values.
    """

    def __init__(self, grid: EvalGrid, spec: KernelSpec, workers: int = 1):
        self.grid = grid
        self.spec = spec
        self.workers = workers
        p = len(grid)
        self.kxx = kernel_value(spec, np.zeros(spec.d), np.zeros(spec.d))
        self.residual = np.full(p, self.kxx)
        self._cap = 16
        self._raw = np.zeros((self._cap, p))
        self._rows = np.zeros((self._cap, p))
        self.n_raw = 0
        self.n_done = 0

    def append_selected(self, f) -> None:
        if self.n_raw == self._cap:
            cap = self._cap * 2
            for name in ("_raw", "_rows"):
                arr = np.zeros((cap, len(self.grid)))
                arr[: self.n_raw] = getattr(self, name)[: self.n_raw]
                setattr(self, name, arr)
            self._cap = cap
        pts = self.grid.points

        def block(lo, hi):
            return riesz_value(f, pts[lo:hi], self.spec)

        self._raw[self.n_raw] = map_blocks(block, len(pts), self.workers)
        self.n_raw += 1

    def sync(self, state: GreedyState) -> None:
        """Compute pending basis rows and deflate the grid residual."""
        upto = min(state.n, self.n_raw)
        for k in range(self.n_done, upto):
            row = state._c[k, : k + 1] @ self._raw[: k + 1]
            self._rows[k] = row
            np.maximum(self.residual - row**2, 0.0, out=self.residual)
        self.n_done = max(self.n_done, upto)

    def rho(self) -> float:
        return math.sqrt(float(self.residual.max()))

    def interior_max(self, y_indices: np.ndarray) -> float:
        return float(self.residual[y_indices].max())


def run(fset: FunctionalSet, spec: KernelSpec, mode: str = "standard",
        n_max: int | None = None, stop_tol: float = 1e-12,
        eval_grid: EvalGrid | None = None, rho_every: int = 1,
        y_indices=None, workers: int = 1) -> tuple[GreedyState, RunTrace]:
    """Execute the selection loop and record the per-step trace.

    Stops at n_max or when the residual power drops to stop_tol * max(diag).
    `eval_grid` enables the rho column (recorded every rho_every steps and at
    step n_max) and is required in extended mode, where `y_indices` restricts
    the interior evaluation points considered for selection (default: all of
    them).
    """
    if mode not in ("standard", "extended"):
        raise ValueError(f"unknown mode {mode!r}")
    if rho_every < 1:
        raise ValueError("rho_every must be >= 1")
    n_max = len(fset) if n_max is None else n_max
    if n_max > len(fset):
        raise ValueError(f"n_max={n_max} exceeds the candidate count {len(fset)}")
    if mode == "extended" and eval_grid is None:
        raise ValueError("extended mode needs an evaluation grid")

    state = init(fset, spec)
    tracker = _GridTracker(eval_grid, spec, workers) if eval_grid is not None else None
    if tracker is not None:
        y_indices = (np.arange(eval_grid.n_interior) if y_indices is None
                     else np.asarray(y_indices, dtype=int))

    bnd_idx = fset.boundary_indices
    dom_ref = fset.points[fset.domain_mask]
    bnd_ref = fset.points[~fset.domain_mask]
    dmin_dom = None
    dmin_bnd = None
    h_dom = fill_distance([], dom_ref) if len(dom_ref) else math.nan
    h_bnd = fill_distance([], bnd_ref) if len(bnd_ref) else math.nan

    rows = {k: [] for k in ("sigma", "rho", "kind", "h_domain", "h_boundary",
                            "cond_c", "bmax")}
    for step in range(1, n_max + 1):
        try:
            if mode == "extended":
                tracker.sync(state)
                y_max = tracker.interior_max(y_indices)
                z_max = float(state.residual_power[bnd_idx].max()) if bnd_idx.size else -np.inf
                on_boundary = z_max >= y_max
                chosen = select_extended(state, max(y_max, z_max), on_boundary, stop_tol)
            else:
                chosen = select_standard(state, stop_tol)
        except Converged:
            break

        is_boundary = not fset.domain_mask[chosen]
        extend(state, chosen, fset, spec, workers=workers)
        if tracker is not None:
            tracker.append_selected(fset.entries[chosen])

        p = fset.points[chosen]
        if is_boundary:
            d = np.linalg.norm(bnd_ref - p, axis=1)
            dmin_bnd = d if dmin_bnd is None else np.minimum(dmin_bnd, d)
            h_bnd = float(dmin_bnd.max())
        else:
            d = np.linalg.norm(dom_ref - p, axis=1)
            dmin_dom = d if dmin_dom is None else np.minimum(dmin_dom, d)
            h_dom = float(dmin_dom.max())

        record_rho = tracker is not None and (
            mode == "extended" or step % rho_every == 0 or step == n_max
        )
        if record_rho:
            tracker.sync(state)
            rows["rho"].append(tracker.rho())
        else:
            rows["rho"].append(math.nan)

        rows["sigma"].append(state.sigma())
        rows["kind"].append("B" if is_boundary else "D")
        rows["h_domain"].append(h_dom)
        rows["h_boundary"].append(h_bnd)
        rows["cond_c"].append(analysis.condition_estimate(state.c_matrix()))
        rows["bmax"].append(float(state.residual_power[bnd_idx].max()) if bnd_idx.size
                            else math.nan)

    n_steps = len(rows["sigma"])
    trace = RunTrace(
        steps=np.arange(1, n_steps + 1),
        sigma=np.array(rows["sigma"]),
        rho=np.array(rows["rho"]),
        kind=rows["kind"],
        h_domain=np.array(rows["h_domain"]),
        h_boundary=np.array(rows["h_boundary"]),
        cond_c=np.array(rows["cond_c"]),
        boundary_power_max=np.array(rows["bmax"]),
    )
    return state, trace

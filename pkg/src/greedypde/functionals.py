"""Dual-space functionals: boundary deltas and operator deltas.

A functional is a point evaluation delta_z (kind "B", placed on the boundary)
or a point evaluation composed with the Laplacian, delta_x . Delta (kind "D",
placed anywhere in the closed domain).  Inner products in the dual space are
computed by applying each functional to one argument of the kernel,
(lam, mu) = lam^x mu^y K(x, y), which reduces to the kernel value, the single
Laplacian or the double Laplacian depending on the kind pair.

Functionals optionally carry a weight multiplier (default 1) that scales the
functional and its Riesz representer alike.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .kernels import KernelSpec, bilaplacian, kernel_value, laplacian_y
from .parallel import map_blocks

BOUNDARY_DELTA = "B"
DOMAIN_OP_DELTA = "D"


@dataclass(frozen=True)
class Functional:
    kind: str
    point: tuple[float, ...]
    index: int
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in (BOUNDARY_DELTA, DOMAIN_OP_DELTA):
            raise ValueError(f"unknown functional kind {self.kind!r}")


def boundary_delta(point, index: int, weight: float = 1.0) -> Functional:
    return Functional(BOUNDARY_DELTA, tuple(float(c) for c in point), index, weight)


def domain_op_delta(point, index: int, weight: float = 1.0) -> Functional:
    return Functional(DOMAIN_OP_DELTA, tuple(float(c) for c in point), index, weight)


@dataclass
class FunctionalSet:
    """A finite, fixed candidate set with packed coordinate arrays.

    Entries must be indexed contiguously from 0 in list order.
    """

    entries: list[Functional]
    points: np.ndarray = field(init=False, repr=False)
    domain_mask: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.entries:
            raise ValueError("functional set must be nonempty")
        for i, f in enumerate(self.entries):
            if f.index != i:
                raise ValueError(f"entry {i} carries index {f.index}; must be contiguous")
        self.points = np.array([f.point for f in self.entries], dtype=float)
        self.domain_mask = np.array(
            [f.kind == DOMAIN_OP_DELTA for f in self.entries], dtype=bool
        )
        self.weights = np.array([f.weight for f in self.entries], dtype=float)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def counts(self) -> tuple[int, int]:
        """(number of operator deltas, number of boundary deltas)."""
        nd = int(self.domain_mask.sum())
        return nd, len(self.entries) - nd

    @property
    def boundary_indices(self) -> np.ndarray:
        return np.nonzero(~self.domain_mask)[0]


def disk_functional_set(geometry, domain_weight=1.0, boundary_weight=1.0) -> FunctionalSet:
    """Operator deltas on all domain candidates, then boundary deltas on the
    boundary candidates, indexed contiguously in that order."""
    entries = []
    for p in geometry.domain_points:
        entries.append(domain_op_delta(p, len(entries), domain_weight))
    for p in geometry.boundary_points:
        entries.append(boundary_delta(p, len(entries), boundary_weight))
    return FunctionalSet(entries)


def dual_inner(a: Functional, b: Functional, spec: KernelSpec) -> float:
    """(a, b) in the dual space; symmetric in its arguments."""
    if a.kind == DOMAIN_OP_DELTA and b.kind == DOMAIN_OP_DELTA:
        base = bilaplacian(spec, a.point, b.point)
    elif a.kind == BOUNDARY_DELTA and b.kind == BOUNDARY_DELTA:
        base = kernel_value(spec, a.point, b.point)
    else:
        base = laplacian_y(spec, a.point, b.point)
    return a.weight * b.weight * base


def dual_inner_column(f: Functional, fset: FunctionalSet, spec: KernelSpec,
                      workers: int = 1) -> np.ndarray:
    """(lam, f) for every lam in the set, as one vector over set order."""
    p = np.asarray(f.point, dtype=float)

    def block(lo, hi):
        pts = fset.points[lo:hi]
        dm = fset.domain_mask[lo:hi]
        out = np.empty(hi - lo)
        if f.kind == DOMAIN_OP_DELTA:
            if dm.any():
                out[dm] = bilaplacian(spec, pts[dm], p)
            if (~dm).any():
                out[~dm] = laplacian_y(spec, pts[~dm], p)
        else:
            if dm.any():
                out[dm] = laplacian_y(spec, pts[dm], p)
            if (~dm).any():
                out[~dm] = kernel_value(spec, pts[~dm], p)
        out *= f.weight * fset.weights[lo:hi]
        return out

    return map_blocks(block, len(fset), workers)


def self_inner_column(fset: FunctionalSet, spec: KernelSpec) -> np.ndarray:
    """(lam, lam) for every lam in the set; constant per kind since the
    kernel is translation invariant."""
    origin = np.zeros(spec.d)
    dd = bilaplacian(spec, origin, origin)
    bb = kernel_value(spec, origin, origin)
    return np.where(fset.domain_mask, dd, bb) * fset.weights**2


def gram(functionals: Sequence[Functional], spec: KernelSpec) -> np.ndarray:
    """Dense symmetric Gram matrix of dual inner products."""
    pts = np.array([f.point for f in functionals], dtype=float)
    dm = np.array([f.kind == DOMAIN_OP_DELTA for f in functionals], dtype=bool)
    w = np.array([f.weight for f in functionals], dtype=float)
    k = len(functionals)
    G = np.empty((k, k))
    di = np.nonzero(dm)[0]
    bi = np.nonzero(~dm)[0]
    if di.size:
        G[np.ix_(di, di)] = bilaplacian(spec, pts[di][:, None, :], pts[di][None, :, :])
    if bi.size:
        G[np.ix_(bi, bi)] = kernel_value(spec, pts[bi][:, None, :], pts[bi][None, :, :])
    if di.size and bi.size:
        cross = laplacian_y(spec, pts[di][:, None, :], pts[bi][None, :, :])
        G[np.ix_(di, bi)] = cross
        G[np.ix_(bi, di)] = cross.T
    return G * np.outer(w, w)


def riesz_value(f: Functional, x, spec: KernelSpec):
    """Riesz representer v_f evaluated at x; broadcasts over point arrays."""
    p = np.asarray(f.point, dtype=float)
    if f.kind == BOUNDARY_DELTA:
        return f.weight * kernel_value(spec, p, x)
    return f.weight * laplacian_y(spec, np.asarray(x, dtype=float), p)


# ---------------------------------------------------------------------------
# analytic test solutions


@dataclass(frozen=True)
class GaussianBump:
    """u(x) = exp(-shape * ||x - center||^2), smooth everywhere."""

    center: tuple[float, ...]
    shape: float = 1.0

    def value(self, x):
        r2 = _sq_dist(x, self.center)
        return np.exp(-self.shape * r2)

    def laplacian(self, x):
        c = self.shape
        d = len(self.center)
        r2 = _sq_dist(x, self.center)
        return (4.0 * c * c * r2 - 2.0 * d * c) * np.exp(-c * r2)


@dataclass(frozen=True)
class PowerCusp:
    """u(x) = ||x - center||^exponent, with a derivative singularity at the
    center; the Laplacian is exponent*(exponent+d-2) r^(exponent-2)."""

    center: tuple[float, ...]
    exponent: float = 2.5

    def value(self, x):
        return np.sqrt(_sq_dist(x, self.center)) ** self.exponent

    def laplacian(self, x):
        b = self.exponent
        d = len(self.center)
        r = np.sqrt(_sq_dist(x, self.center))
        if b < 2.0 and np.any(r == 0.0):
            raise ValueError("cusp Laplacian is singular at the center for exponent < 2")
        if b == 2.0:
            return np.full_like(r, 2.0 * d)
        return b * (b + d - 2.0) * r ** (b - 2.0)


def _sq_dist(x, center):
    diff = np.asarray(x, dtype=float) - np.asarray(center, dtype=float)
    return (diff**2).sum(axis=-1)


def apply_to_solution(f: Functional, solution) -> float:
    """lam(u): the solution value for boundary deltas, its Laplacian for
    operator deltas, times the functional weight."""
    x = np.asarray(f.point, dtype=float)
    v = solution.value(x) if f.kind == BOUNDARY_DELTA else solution.laplacian(x)
    return f.weight * float(v)


def data_vector(fset: FunctionalSet, indices, solution) -> np.ndarray:
    """lam_j(u) for the given functional indices, vectorized."""
    idx = np.asarray(indices, dtype=int)
    pts = fset.points[idx]
    dm = fset.domain_mask[idx]
    out = np.empty(len(idx))
    if dm.any():
        out[dm] = solution.laplacian(pts[dm])
    if (~dm).any():
        out[~dm] = solution.value(pts[~dm])
    return out * fset.weights[idx]


# ---------------------------------------------------------------------------
# text serialization: one record per line, kind tag then coordinates


def write_functionals(path, entries: Sequence[Functional]) -> None:
    """Dump functionals as 'B|D x1 ... xd' lines.  Weights are not part of
    the format; reloaded sets carry the default weight 1."""
    with open(path, "w") as fh:
        for f in entries:
            coords = " ".join(format(c, ".17g") for c in f.point)
            fh.write(f"{f.kind} {coords}\n")


def read_functionals(path) -> list[Functional]:
    entries = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            kind, coords = parts[0], tuple(float(c) for c in parts[1:])
            entries.append(Functional(kind, coords, len(entries)))
    return entries

"""Whittle-Matern kernel layer.

The reproducing kernel of the Sobolev space W_2^m(R^d) is, up to norm
equivalence,

    K(x, y) = phi_nu(||x - y|| / scale),   phi_mu(r) = r^mu K_mu(r),

with nu = m - d/2 and K_mu the modified Bessel function of the second kind.
Everything in this module reduces to the phi stack: from the derivative
identity d/dr(r^mu K_mu(r)) = -r^mu K_{mu-1}(r) one gets closed forms for the
Laplacian applied to one or both kernel arguments,

    Delta_y K          = (t^2 phi_{nu-2}(t) - d phi_{nu-1}(t)) / scale^2,
    Delta_x Delta_y K  = (t^4 phi_{nu-4}(t) - 2(d+2) t^2 phi_{nu-3}(t)
                          + d(d+2) phi_{nu-2}(t)) / scale^4,

with t = ||x - y|| / scale.  Negative orders use K_{-mu} = K_mu; the terms
with a t^2 or t^4 prefactor stay finite at t = 0 for every valid smoothness
(nu > 2).  All evaluators broadcast over trailing point axes and are pure
functions, so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import kv

# Below this scaled radius r^mu K_mu(r) is replaced by its analytic limit:
# the removable singularity is the only regime where the product cancels.
_LIMIT_RADIUS = 1e-8


@dataclass(frozen=True)
class KernelSpec:
    """Smoothness m, space dimension d and length scale of the kernel.

    Continuity of the operator functionals delta_x . Delta requires
    m > 2 + d/2, which keeps the derived order nu = m - d/2 above 2.
    """

    m: int
    d: int
    scale: float = 1.0

    def __post_init__(self):
        if int(self.m) != self.m:
            raise ValueError(f"smoothness m must be an integer, got {self.m!r}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension d must be a positive integer, got {self.d!r}")
        if not self.m > 2 + self.d / 2:
            raise ValueError(
                f"need smoothness m > 2 + d/2 = {2 + self.d / 2:g}, got m={self.m}"
            )
        if not self.scale > 0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")

    @property
    def nu(self) -> float:
        return self.m - self.d / 2


@dataclass(frozen=True)
class RadialStack:
    """phi values at a single scaled radius for orders nu, nu-1, ..., nu-4.

    Entries with order <= 0 diverge at radius 0; they carry a singular flag
    and are only meaningful under an r^2 or r^4 prefactor, which is how the
    Laplacian formulas consume them (the prefactor vanishes at 0).
    """

    radius: float
    orders: tuple[float, ...]
    values: np.ndarray
    singular: np.ndarray


def bessel_k(order: float, r):
    """Modified Bessel function of the second kind, K_order(r).

    Requires order >= 0 (map negative orders through K_{-mu} = K_mu first)
    and strictly positive r, since K diverges at the origin; limits of
    r^mu K_mu products are taken in radial_stack, not here.
    """
    if order < 0:
        raise ValueError("bessel_k needs order >= 0; use K_{-mu} = K_mu first")
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("bessel_k needs r > 0")
    out = kv(order, arr)
    return float(out) if np.ndim(r) == 0 else out


def _phi_limit(mu: float) -> float:
    # lim_{r -> 0} r^mu K_mu(r) for mu > 0
    return 2.0 ** (mu - 1.0) * math.gamma(mu)


def _phi(mu: float, t: np.ndarray) -> np.ndarray:
    """phi_mu(t) = t^mu K_|mu|(t) elementwise; analytic limit below the
    crossover radius for mu > 0, +inf there for mu <= 0."""
    out = np.empty_like(t)
    small = t < _LIMIT_RADIUS
    out[small] = _phi_limit(mu) if mu > 0 else np.inf
    big = ~small
    tt = t[big]
    out[big] = tt**mu * kv(abs(mu), tt)
    return out


def _phi_prefactored(power: int, mu: float, t: np.ndarray) -> np.ndarray:
    """t^power * phi_mu(t), which tends to 0 at t = 0 whenever
    power + 2*min(mu, 0) > 0; every Laplacian term satisfies that."""
    if power + 2 * min(mu, 0.0) <= 0:
        raise ValueError("prefactor too weak to cancel the K_mu singularity")
    out = np.zeros_like(t)
    big = t >= _LIMIT_RADIUS
    tt = t[big]
    out[big] = tt ** (power + mu) * kv(abs(mu), tt)
    return out


def _scaled_distance(spec: KernelSpec, x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != spec.d or y.shape[-1] != spec.d:
        raise ValueError(f"points must have {spec.d} coordinates")
    return np.linalg.norm(x - y, axis=-1) / spec.scale


def radial_stack(spec: KernelSpec, r: float) -> RadialStack:
    """phi_mu(r/scale) for mu = nu, nu-1, ..., nu-4, with K_{-mu} = K_mu.

    Total on r >= 0: at radius 0 the positive orders take their analytic
    limit 2^(mu-1) Gamma(mu) and the rest are flagged singular.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    t = float(r) / spec.scale
    orders = tuple(spec.nu - k for k in range(5))
    tarr = np.array([t])
    values = np.array([_phi(mu, tarr)[0] for mu in orders])
    singular = np.array([t < _LIMIT_RADIUS and mu <= 0 for mu in orders])
    return RadialStack(radius=t, orders=orders, values=values, singular=singular)


def kernel_value(spec: KernelSpec, x, y):
    """K(x, y) = phi_nu(||x - y|| / scale); symmetric, broadcasts over points."""
    t = _scaled_distance(spec, x, y)
    v = _phi(spec.nu, np.atleast_1d(t))
    return float(v[0]) if t.ndim == 0 else v


def laplacian_y(spec: KernelSpec, x, y):
    """Delta_y K(x, y); equals Delta_x K(x, y) by radial symmetry."""
    t = _scaled_distance(spec, x, y)
    t1 = np.atleast_1d(t)
    nu, d = spec.nu, spec.d
    v = (_phi_prefactored(2, nu - 2, t1) - d * _phi(nu - 1, t1)) / spec.scale**2
    return float(v[0]) if t.ndim == 0 else v


def bilaplacian(spec: KernelSpec, x, y):
    """Delta_x Delta_y K(x, y): the radial Laplacian reduction applied twice.

    Finite at x = y for every valid spec, where it equals
    d(d+2) phi_{nu-2}(0) / scale^4.
    """
    t = _scaled_distance(spec, x, y)
    t1 = np.atleast_1d(t)
    nu, d = spec.nu, spec.d
    v = (
        _phi_prefactored(4, nu - 4, t1)
        - 2.0 * (d + 2) * _phi_prefactored(2, nu - 3, t1)
        + d * (d + 2) * _phi(nu - 2, t1)
    ) / spec.scale**4
    return float(v[0]) if t.ndim == 0 else v

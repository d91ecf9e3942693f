import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg.lapack import dpstrf

from greedypde.kernels import (
    KernelSpec,
    bessel_k,
    bilaplacian,
    kernel_value,
    laplacian_y,
    radial_stack,
)

SPEC42 = KernelSpec(m=4, d=2, scale=1.0)


# ---------------------------------------------------------------------------
# finite-difference oracles (4th-order central stencils)


def fd_laplacian(f, x, h):
    total = 0.0
    for i in range(len(x)):
        e = np.zeros(len(x))
        e[i] = h
        total += (
            -f(x + 2 * e) + 16 * f(x + e) - 30 * f(x) + 16 * f(x - e) - f(x - 2 * e)
        ) / (12 * h * h)
    return total


def fd_bilaplacian(spec, x, y, h):
    def inner(xx):
        return fd_laplacian(lambda yy: kernel_value(spec, xx, yy), y, h)

    return fd_laplacian(inner, x, h)


def random_pairs(rng, n, lo=0.05, hi=2.0):
    x = rng.uniform(-1, 1, size=(n, 2))
    theta = rng.uniform(0, 2 * math.pi, size=n)
    r = rng.uniform(lo, hi, size=n)
    y = x + r[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    return x, y


# ---------------------------------------------------------------------------
# bessel_k


def test_bessel_half_integer_closed_form():
    # K_{1/2}(r) = sqrt(pi/(2 r)) exp(-r)
    assert bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-13)
    for r in (0.1, 2.3, 7.0):
        assert bessel_k(0.5, r) == pytest.approx(
            math.sqrt(math.pi / (2 * r)) * math.exp(-r), rel=1e-13
        )


def test_bessel_frozen_values():
    # high-precision mpmath values, frozen
    assert bessel_k(0.0, 1.0) == pytest.approx(0.42102443824070834, rel=1e-12)
    assert bessel_k(1.0, 1.0) == pytest.approx(0.60190723019723458, rel=1e-12)
    assert bessel_k(3.0, 2.0) == pytest.approx(0.64738539094863415, rel=1e-12)


def test_bessel_three_term_recurrence_spot():
    # K_3(2) = K_1(2) + (2*2/2) K_2(2)
    lhs = bessel_k(3, 2.0)
    rhs = bessel_k(1, 2.0) + 2.0 * bessel_k(2, 2.0)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_bessel_recurrence_residual_on_log_grid():
    r = np.logspace(-2, math.log10(20.0), 60)
    for mu in (1.0, 2.0, 3.5, 5.0):
        lhs = bessel_k(mu + 1, r)
        rhs = bessel_k(mu - 1, r) + (2 * mu / r) * bessel_k(mu, r)
        assert np.all(np.abs(lhs - rhs) <= 1e-12 * lhs)


def test_bessel_domain_errors():
    with pytest.raises(ValueError):
        bessel_k(1.0, 0.0)
    with pytest.raises(ValueError):
        bessel_k(1.0, -2.0)
    with pytest.raises(ValueError):
        bessel_k(-1.0, 1.0)


# ---------------------------------------------------------------------------
# radial stack


def test_stack_limits_at_zero():
    stack = radial_stack(SPEC42, 0.0)
    assert stack.orders == (3.0, 2.0, 1.0, 0.0, -1.0)
    assert stack.values[0] == pytest.approx(8.0)  # 2^2 Gamma(3)
    assert stack.values[2] == pytest.approx(1.0)  # 2^0 Gamma(1)
    assert list(stack.singular) == [False, False, False, True, True]


def test_stack_finite_and_positive_for_positive_radius():
    for r in (1e-6, 0.01, 0.5, 3.0, 10.0):
        stack = radial_stack(SPEC42, r)
        assert np.all(np.isfinite(stack.values))
        assert np.all(stack.values > 0)
        assert not stack.singular.any()


def test_stack_monotone_decreasing_for_positive_orders():
    radii = np.linspace(0.0, 4.0, 40)
    for mu_pos in range(3):  # orders 3, 2, 1 for m=4, d=2
        vals = [radial_stack(SPEC42, r).values[mu_pos] for r in radii]
        assert np.all(np.diff(vals) < 0)


def test_stack_rejects_negative_radius():
    with pytest.raises(ValueError):
        radial_stack(SPEC42, -0.1)


# ---------------------------------------------------------------------------
# kernel values


def test_kernel_at_coincident_points():
    assert kernel_value(SPEC42, np.zeros(2), np.zeros(2)) == pytest.approx(8.0)


def test_kernel_at_unit_distance_is_k3():
    x = np.array([0.0, 0.0])
    y = np.array([1.0, 0.0])
    assert kernel_value(SPEC42, x, y) == pytest.approx(bessel_k(3.0, 1.0), rel=1e-14)


def test_kernel_symmetry(rng):
    x, y = random_pairs(rng, 50)
    assert np.allclose(kernel_value(SPEC42, x, y), kernel_value(SPEC42, y, x),
                       rtol=0, atol=0)


def test_kernel_positive_definite_sample(rng):
    pts = rng.uniform(-1, 1, size=(10, 2))
    K = kernel_value(SPEC42, pts[:, None, :], pts[None, :, :])
    _, _, rank, _ = dpstrf(K)  # pivoted Cholesky
    assert rank == 10


# ---------------------------------------------------------------------------
# Laplacians vs finite differences


def test_laplacian_at_coincident_points():
    assert laplacian_y(SPEC42, np.zeros(2), np.zeros(2)) == pytest.approx(-4.0)


def test_laplacian_negative_at_center_for_valid_specs():
    for m, d in [(4, 2), (5, 2), (6, 2), (5, 3), (4, 1)]:
        spec = KernelSpec(m=m, d=d)
        assert laplacian_y(spec, np.zeros(d), np.zeros(d)) < 0


def test_laplacian_matches_finite_differences(rng):
    x, y = random_pairs(rng, 100)
    for spec in (SPEC42, KernelSpec(m=6, d=2)):
        vals = laplacian_y(spec, x, y)
        # rel 1e-6 with an absolute floor at the operator's r=0 magnitude:
        # the FD oracle has an absolute truncation floor, so a pure relative
        # comparison is meaningless at the sign changes of the Laplacian
        scale = abs(laplacian_y(spec, np.zeros(2), np.zeros(2)))
        for i in range(len(x)):
            fd = fd_laplacian(lambda yy: kernel_value(spec, x[i], yy), y[i], 1e-3)
            assert abs(vals[i] - fd) <= 1e-6 * max(abs(fd), scale)


def test_bilaplacian_at_coincident_points():
    assert bilaplacian(SPEC42, np.zeros(2), np.zeros(2)) == pytest.approx(8.0)


def test_bilaplacian_matches_nested_finite_differences(rng):
    x, y = random_pairs(rng, 100)
    for spec in (SPEC42, KernelSpec(m=6, d=2)):
        vals = bilaplacian(spec, x, y)
        scale = abs(bilaplacian(spec, np.zeros(2), np.zeros(2)))
        for i in range(len(x)):
            fd = fd_bilaplacian(spec, x[i], y[i], 1e-2)
            assert abs(vals[i] - fd) <= 1e-4 * max(abs(fd), scale)


def test_bilaplacian_symmetry(rng):
    x, y = random_pairs(rng, 30)
    assert np.allclose(bilaplacian(SPEC42, x, y), bilaplacian(SPEC42, y, x),
                       rtol=0, atol=0)


# ---------------------------------------------------------------------------
# scale covariance


@settings(deadline=None, max_examples=30)
@given(st.floats(min_value=0.2, max_value=5.0),
       st.floats(min_value=-1, max_value=1), st.floats(min_value=-1, max_value=1),
       st.floats(min_value=-1, max_value=1), st.floats(min_value=-1, max_value=1))
def test_scale_covariance(s, x0, x1, y0, y1):
    scaled = KernelSpec(m=4, d=2, scale=s)
    x = np.array([x0, x1])
    y = np.array([y0, y1])
    assert kernel_value(scaled, x, y) == pytest.approx(
        kernel_value(SPEC42, x / s, y / s), rel=1e-12)
    assert laplacian_y(scaled, x, y) == pytest.approx(
        laplacian_y(SPEC42, x / s, y / s) / s**2, rel=1e-12)
    assert bilaplacian(scaled, x, y) == pytest.approx(
        bilaplacian(SPEC42, x / s, y / s) / s**4, rel=1e-12)


# ---------------------------------------------------------------------------
# KernelSpec validation


def test_spec_rejects_low_smoothness():
    with pytest.raises(ValueError, match="2 \\+ d/2"):
        KernelSpec(m=3, d=2)


def test_spec_rejects_bad_scale_and_dimension():
    with pytest.raises(ValueError):
        KernelSpec(m=4, d=2, scale=0.0)
    with pytest.raises(ValueError):
        KernelSpec(m=4, d=0)

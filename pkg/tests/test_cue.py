
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetaspacing.cue import (
    KernelSpec,
    bin_probabilities,
    correlation_curve,
    gap_derivatives,
    gap_determinant,
    kernel,
    r2_asymptotic,
    r2_cue_exact,
    r2_truncated,
    spacing_cdf,
    spacing_density,
)
from zetaspacing.errors import ConditioningError, DomainError

GRID6 = np.round(np.arange(0, 601) * 0.01, 10)


def test_kernel_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec(1)
    with pytest.raises(ValueError):
        r2_cue_exact(1, 0.5)
    assert KernelSpec(8).n == 8


def test_kernel_special_values():
    assert kernel(8, 3.3, 3.3) == 1.0
    assert kernel(8, 4.0) == pytest.approx(0.0, abs=1e-15)
    # removable singularity at x - y = m N takes the limit (-1)^(m (N-1))
    assert kernel(8, 8.0) == pytest.approx(-1.0)
    assert kernel(7, 7.0) == pytest.approx(1.0)
    assert kernel(8, 8.0 + 1e-9) == pytest.approx(-1.0, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 64), st.floats(-200, 200))
def test_kernel_symmetric_and_2n_periodic(n, s):
    assert kernel(n, s) == pytest.approx(kernel(n, -s), abs=1e-12)
    assert kernel(n, s, 0.0) == pytest.approx(kernel(n, 0.0, -s), abs=1e-12)
    assert kernel(n, s + 2 * n) == pytest.approx(kernel(n, s), abs=1e-9)


def test_kernel_expansion_order():
    s = np.linspace(0.1, 3, 30)
    k0 = np.sinc(s)
    k1 = np.pi * s / 6 * np.sin(np.pi * s)
    errs = [np.max(np.abs(kernel(n, s) - k0 - k1 / n**2)) for n in (16, 32, 64)]
    slope = -np.polyfit(np.log([16, 32, 64]), np.log(errs), 1)[0]
    assert 3.7 < slope < 4.3


def test_r2_exact_values():
    assert r2_cue_exact(8, 0.0) == 0.0
    assert r2_cue_exact(8, 4.0) == pytest.approx(1.0, abs=1e-15)
    assert r2_asymptotic(0.0) == 0.0


@pytest.mark.parametrize("n", [2, 5, 8, 32])
def test_r2_exact_range(n):
    s = np.linspace(0, n, 2001)
    r = r2_cue_exact(n, s)
    assert r.min() >= -1e-15 and r.max() <= 1 + 1 / n
    integers = np.arange(1, n)
    assert np.allclose(r2_cue_exact(n, integers.astype(float)), 1.0, atol=1e-14)


def test_r2_truncated_integer_points():
    for order in (2, 4):
        assert r2_truncated(16, 1.0, order) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        r2_truncated(16, 1.0, order=3)


def test_r2_truncated_order_two_and_four():
    s = np.linspace(0, 3, 301)
    ns = np.array([16, 32, 64, 128])
    e2 = [np.max(np.abs(r2_cue_exact(n, s) - r2_truncated(n, s, 2))) for n in ns]
    e4 = [np.max(np.abs(r2_cue_exact(n, s) - r2_truncated(n, s, 4))) for n in ns]
    assert 3.8 < -np.polyfit(np.log(ns), np.log(e2), 1)[0] < 4.2
    assert 5.5 < -np.polyfit(np.log(ns), np.log(e4), 1)[0] < 6.5
    # r2_cue_exact(32, 1.5) - truncated(order 4) bounded by the fitted constant
    c = max(e * n**6 for e, n in zip(e4, ns))
    assert abs(r2_cue_exact(32, 1.5) - r2_truncated(32, 1.5, 4)) <= c * 32.0**-6


def test_correlation_curve_origins():
    grid = np.linspace(0, 3, 31)
    exact = correlation_curve(16, grid)
    assert exact.origin == "cue_exact" and exact.values[0] == 0.0
    exp = correlation_curve(16, grid, origin="cue_expansion", order=2)
    assert exp.origin == "cue_expansion"
    with pytest.raises(ValueError):
        correlation_curve(16, grid, origin="bogus")


def test_gap_determinant_endpoints():
    for n in (2, 8, 16, 33):
        assert gap_determinant(n, 0.0) == 1.0
        assert abs(gap_determinant(n, float(n))) <= 1e-10
    with pytest.raises(DomainError):
        gap_determinant(8, 8.5)
    with pytest.raises(DomainError):
        gap_determinant(8, -0.1)


def test_gap_determinant_two_by_two_closed_form():
    s = np.linspace(0, 2, 201)
    closed = (1 - s / 2) ** 2 - np.sin(np.pi * s / 2) ** 2 / np.pi**2
    assert np.allclose(gap_determinant(2, s), closed, atol=1e-14)


def test_gap_determinant_brute_force_det():
    n, s = 9, 2.7
    j = np.arange(n)
    d = np.subtract.outer(j, j)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(d == 0, s / n, np.sin(np.pi * s * d / n) / (np.pi * d))
    assert gap_determinant(n, s) == pytest.approx(np.linalg.det(np.eye(n) - a), rel=1e-12)


@pytest.mark.parametrize("n", [5, 16])
def test_gap_determinant_non_increasing(n):
    s = np.linspace(0, n, int(n / 0.005) + 1)
    e = gap_determinant(n, s)
    # values below ~1e-14 are at the rounding floor of the eigenvalue product
    assert np.all(np.diff(e) <= 1e-14)


def test_density_matches_finite_differences():
    n, h = 16, 1e-3
    s = np.linspace(0.01, 3, 120)
    stencil = [gap_determinant(n, np.clip(s + k * h, 0, n)) for k in (-2, -1, 0, 1, 2)]
    fd = (-stencil[0] + 16 * stencil[1] - 30 * stencil[2] + 16 * stencil[3] - stencil[4]) / (12 * h * h)
    assert np.max(np.abs(spacing_density(n, s).values - fd)) <= 1e-6


def test_first_derivative_matches_finite_differences():
    n, h = 12, 1e-5
    s = np.linspace(0.1, 5, 50)
    _, d1, _ = gap_derivatives(n, s)
    fd = (gap_determinant(n, s + h) - gap_determinant(n, s - h)) / (2 * h)
    assert np.max(np.abs(d1 - fd)) < 1e-8


def test_two_by_two_density_closed_form():
    s = np.linspace(0, 2, 201)
    p = spacing_density(2, s).values
    assert np.allclose(p, np.sin(np.pi * s / 2) ** 2, atol=1e-12)


@pytest.mark.parametrize("n", [10, 16, 20, 64])
def test_density_normalization_and_mean(n):
    curve = spacing_density(n, GRID6[GRID6 <= min(n, 8)])
    assert abs(curve.values[0]) <= 1e-8
    assert curve.values.min() >= -1e-10
    assert curve.integral(0, 6) == pytest.approx(1.0, abs=1e-6)
    if n >= 20:
        assert curve.integral(0, 6, weight=lambda s: s) == pytest.approx(1.0, abs=1e-3)
    assert curve.kind == "p_finite_n" and curve.meta["N"] == n


@pytest.mark.parametrize("n", [3, 5, 8])
def test_small_n_density_full_support(n):
    s = np.linspace(0, n, 1601)
    p = spacing_density(n, s).values
    assert p.min() >= -1e-10
    assert np.trapezoid(p, s) == pytest.approx(1.0, abs=1e-5)
    assert p[-1] == 0.0


def test_density_grid_limits():
    with pytest.raises(DomainError):
        spacing_density(16, np.linspace(0, 9, 10))
    with pytest.raises(DomainError):
        spacing_density(5, np.linspace(0, 5.5, 10))


def test_conditioning_floor_is_reported():
    with pytest.raises(ConditioningError) as info:
        spacing_density(5, np.array([4.9, 4.99]), cond_floor=1e-3)
    assert info.value.s in (4.9, 4.99)


def test_threaded_evaluation_matches_serial():
    s = np.linspace(0, 4, 101)
    a = spacing_density(32, s).values
    b = spacing_density(32, s, workers=3).values
    assert np.allclose(a, b, rtol=0, atol=1e-13)


def test_cdf_and_bin_probabilities():
    n = 8
    edges = np.linspace(0, 10, 201)
    probs = bin_probabilities(n, edges)
    assert probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(probs[edges[1:] > n] == 0.0)
    assert spacing_cdf(n, 0.0) == pytest.approx(0.0, abs=1e-15)
    fine = np.linspace(1.0, 1.5, 2001)
    quad = np.trapezoid(spacing_density(n, fine).values, fine)
    assert spacing_cdf(n, 1.5) - spacing_cdf(n, 1.0) == pytest.approx(quad, abs=1e-8)

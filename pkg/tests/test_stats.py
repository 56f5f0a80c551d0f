import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from heliobubble.stats import FitError, combine_slopes, linear_fit


def test_exact_line_recovered():
    p = np.linspace(0, 24, 10)
    fit = linear_fit(p, 517.51 - 0.06 * p)
    assert fit.intercept == pytest.approx(517.51, abs=1e-10)
    assert fit.slope == pytest.approx(-0.06, abs=1e-10)
    assert fit.dof == 8 and fit.r_squared == pytest.approx(1.0)


def test_matches_polyfit_unweighted():
    rng = np.random.default_rng(1)
    x = rng.uniform(0, 24, 15)
    y = 517.0 - 0.07 * x + rng.normal(0, 0.05, 15)
    fit = linear_fit(x, y)
    b0, b1 = oracles.ols_line(x, y)
    assert fit.intercept == pytest.approx(b0, rel=1e-12)
    assert fit.slope == pytest.approx(b1, rel=1e-10)
    # covariance scaled by chi2/dof, as numpy.polyfit(cov=True) does
    _, cov = np.polyfit(x, y, 1, cov=True)
    assert fit.sigma_slope == pytest.approx(np.sqrt(cov[0, 0]), rel=1e-9)


def test_weighted_covariance_is_absolute():
    x = np.array([0.0, 1.0, 2.0, 3.0])
    sigma = np.array([0.1, 0.2, 0.1, 0.2])
    fit = linear_fit(x, 2 + 3 * x, sigma)
    w = 1 / sigma**2
    A = np.vstack([np.ones_like(x), x]).T
    cov = np.linalg.inv(A.T @ (w[:, None] * A))
    assert fit.sigma_intercept == pytest.approx(np.sqrt(cov[0, 0]), rel=1e-12)
    assert fit.sigma_slope == pytest.approx(np.sqrt(cov[1, 1]), rel=1e-12)
    assert fit.covariance[0][1] == pytest.approx(cov[0, 1], rel=1e-12)
    assert fit.weighted


def test_monte_carlo_slope_uncertainty():
    rng = np.random.default_rng(2024)
    p = np.linspace(0, 24, 20)
    slopes, reported = [], []
    for _ in range(500):
        y = 517.51 - 0.06 * p + rng.normal(0, 0.05, p.size)
        fit = linear_fit(p, y, np.full(p.size, 0.05))
        slopes.append(fit.slope)
        reported.append(fit.sigma_slope)
    slopes = np.array(slopes)
    assert abs(slopes.mean() + 0.06) < reported[0]
    assert slopes.std(ddof=1) == pytest.approx(reported[0], rel=0.2)


def test_fit_errors():
    with pytest.raises(FitError):
        linear_fit([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        linear_fit([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        linear_fit([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [1.0, 0.0, 1.0])


def test_combine_measured_mg_slopes_consistent():
    c = combine_slopes([-0.09, -0.06, -0.06], [0.01, 0.01, 0.01], dofs=[5, 5, 5])
    assert c.mean == pytest.approx(-0.07, abs=1e-12)
    assert c.sigma == pytest.approx(0.01 / np.sqrt(3), rel=1e-12)
    assert c.pairwise_consistent and c.consistent
    assert all(abs(t.t) < t.critical for t in c.pairwise)


def test_combine_identical_and_inconsistent():
    same = combine_slopes([-0.07] * 3, [0.01] * 3)
    assert same.mean == pytest.approx(-0.07) and all(t.t == 0 for t in same.pairwise)
    tight = combine_slopes([-0.09, -0.06, -0.06], [0.001] * 3, dofs=[5, 5, 5])
    assert not tight.consistent


def test_reference_test_drives_verdict():
    c = combine_slopes([-0.0899, -0.0601, -0.0598], [1e-4] * 3, dofs=[5, 5, 5], reference=(-0.08, 0.01))
    assert not c.pairwise_consistent
    assert c.reference_consistent and c.consistent
    far = combine_slopes([-0.2, -0.06, -0.06], [0.01] * 3, reference=(-0.08, 0.01))
    assert not far.consistent


def test_combine_validation():
    with pytest.raises(ValueError):
        combine_slopes([-0.1, -0.2], [0.01, 0.0])
    with pytest.raises(ValueError):
        combine_slopes([-0.1, -0.2], [0.01, 0.01], dofs=[3])


finite = st.floats(-1e3, 1e3)


@given(st.lists(st.floats(0, 25), min_size=3, max_size=12, unique=True), finite, finite,
       st.floats(-100, 100), st.floats(0.1, 10))
def test_linear_fit_affine_equivariance(x, b0, b1, shift, k):
    x = np.array(x)
    if np.ptp(x) < 1e-3:
        return
    y = b0 + b1 * x + np.sin(7 * x)
    base = linear_fit(x, y)
    shifted = linear_fit(x, y + shift)
    assert shifted.intercept == pytest.approx(base.intercept + shift, rel=1e-9, abs=1e-7)
    assert shifted.slope == pytest.approx(base.slope, rel=1e-9, abs=1e-8)
    scaled = linear_fit(k * x, y)
    assert scaled.slope == pytest.approx(base.slope / k, rel=1e-8, abs=1e-8)


@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(1e-3, 1)), min_size=3, max_size=3))
def test_combine_order_invariant(items):
    m, s = zip(*items)
    ref = combine_slopes(m, s).mean
    for perm in itertools.permutations(range(3)):
        assert combine_slopes([m[i] for i in perm], [s[i] for i in perm]).mean == pytest.approx(ref, rel=1e-12,
                                                                                                 abs=1e-15)

import math

import numpy as np
import pytest
import scipy.stats as st

from worksteal.rng import SplitMix64
from worksteal.stats import (
    FitError,
    chi2_gof,
    evaluate_fit,
    fit_gaussian,
    fit_gev_pwm,
    gaussian_cdf,
    gev_cdf,
    gev_quantile,
    histogram,
    linear_regression,
    summarize,
)


# -- summaries ----------------------------------------------------------------

def test_summarize_examples():
    assert summarize([1, 1, 1]) == pytest.approx((1.0, 0.0, 0.0))
    mean, var, cv = summarize([0, 2])
    assert (mean, var) == pytest.approx((1.0, 2.0))
    assert cv == pytest.approx(math.sqrt(2))


def test_summarize_synthetic_moments():
    rng = SplitMix64(10)
    x = 5.0 + 2.0 * np.array([sum(rng.random_array(12)) - 6 for _ in range(10_000)])
    mean, var, cv = summarize(x)
    se_mean = math.sqrt(var / len(x))
    assert abs(mean - 5.0) < 3 * se_mean
    assert abs(var - 4.0) < 0.3


# -- regression ----------------------------------------------------------------

def test_regression_exact_line():
    x = [0, 1, 2, 3, 4]
    slope, icpt, r2 = linear_regression(x, [2 * v + 1 for v in x])
    assert (slope, icpt, r2) == pytest.approx((2.0, 1.0, 1.0))


def test_regression_constant_y():
    slope, icpt, r2 = linear_regression([0, 1, 2], [5, 5, 5])
    assert slope == pytest.approx(0.0)
    assert r2 == 0.0


def test_regression_noisy_slope():
    rng = SplitMix64(3)
    x = np.arange(200, dtype=float)
    noise = rng.random_array(200) - 0.5
    slope, _, r2 = linear_regression(x, 3.0 * x + noise)
    assert slope == pytest.approx(3.0, abs=0.01)
    assert r2 > 0.999


def test_regression_validation():
    with pytest.raises(ValueError):
        linear_regression([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        linear_regression([1, 2], [1, 2])


# -- histogram ------------------------------------------------------------------

def test_histogram_example():
    assert histogram([1, 1, 2]) == [(1, 2), (2, 1)]


def test_histogram_empty_errors():
    with pytest.raises(ValueError):
        histogram([])


def test_histogram_recount_oracle():
    rng = SplitMix64(9)
    xs = [int(v) for v in rng.randbelow_array(10_000, 40)]
    hist = dict(histogram(xs))
    for v in range(40):
        assert hist.get(v, 0) == xs.count(v)
    assert sum(hist.values()) == len(xs)


# -- GEV ---------------------------------------------------------------------------

def test_gev_cdf_quantile_match_scipy():
    # scipy's genextreme uses c = -xi
    for mu, sigma, xi in ((0.0, 1.0, 0.2), (5.0, 2.0, -0.15), (1.0, 3.0, 0.0)):
        xs = np.linspace(mu - 2 * sigma, mu + 6 * sigma, 41)
        ours = gev_cdf(xs, mu, sigma, xi)
        ref = st.genextreme.cdf(xs, -xi if xi != 0 else 0.0, loc=mu, scale=sigma)
        assert np.allclose(ours, ref, atol=1e-12)
        ps = np.linspace(0.02, 0.98, 25)
        assert np.allclose(gev_quantile(ps, mu, sigma, xi),
                           st.genextreme.ppf(ps, -xi if xi != 0 else 0.0,
                                             loc=mu, scale=sigma), atol=1e-9)


def gev_draws(n, mu, sigma, xi, seed):
    rng = SplitMix64(seed)
    u = rng.random_array(n) * (1 - 2e-12) + 1e-12
    return gev_quantile(u, mu, sigma, xi)


def test_pwm_recovers_parameters():
    x = gev_draws(100_000, 5.0, 2.0, 0.1, seed=42)
    mu, sigma, xi = fit_gev_pwm(x).params
    assert mu == pytest.approx(5.0, rel=0.05)
    assert sigma == pytest.approx(2.0, rel=0.05)
    assert xi == pytest.approx(0.1, abs=0.05 * 2.0)


def test_pwm_gumbel_shape_near_zero():
    x = gev_draws(100_000, 0.0, 1.0, 0.0, seed=7)
    _, _, xi = fit_gev_pwm(x).params
    assert abs(xi) < 0.05


def test_pwm_location_equivariance():
    x = gev_draws(5_000, 3.0, 1.5, -0.1, seed=11)
    base = fit_gev_pwm(x).params
    shifted = fit_gev_pwm(x + 17.0).params
    assert shifted[0] - base[0] == pytest.approx(17.0, abs=1e-9)
    assert shifted[1] == pytest.approx(base[1], abs=1e-9)
    assert shifted[2] == pytest.approx(base[2], abs=1e-9)


def test_pwm_scale_equivariance():
    x = gev_draws(5_000, 3.0, 1.5, -0.1, seed=12)
    base = fit_gev_pwm(x).params
    scaled = fit_gev_pwm(x * 2.5).params
    assert scaled[0] == pytest.approx(base[0] * 2.5, rel=1e-9)
    assert scaled[1] == pytest.approx(base[1] * 2.5, rel=1e-9)
    assert scaled[2] == pytest.approx(base[2], abs=1e-9)


def test_fit_errors_on_degenerate_samples():
    with pytest.raises(FitError):
        fit_gev_pwm([3.0] * 100)
    with pytest.raises(FitError):
        fit_gaussian([1.0, 1.0, 1.0])


# -- chi-square -----------------------------------------------------------------------

def test_chi2_perfect_match():
    # a fitted CDF exactly matching the empirical distribution gives
    # stat 0 and p-value 1
    xs = [0] * 50 + [1] * 50
    stat, dof, p = chi2_gof(xs, lambda e: np.where(np.asarray(e) < 1, 0.5, 1.0))
    assert stat == pytest.approx(0.0)
    assert p == pytest.approx(1.0)


def test_chi2_dof2_closed_form():
    # p = exp(-stat/2) for two degrees of freedom
    from worksteal.special import chi2_sf

    assert chi2_sf(1.3863, 2) == pytest.approx(0.5, abs=1e-4)


def test_chi2_detects_wrong_model():
    rng = SplitMix64(5)
    xs = [int(v) for v in rng.randbelow_array(5000, 10)]  # uniform on 0..9
    bad = lambda e: gaussian_cdf(e, 2.0, 1.0)
    stat, dof, p = chi2_gof(xs, bad)
    assert p < 1e-6


def test_chi2_accepts_true_model():
    rng = SplitMix64(6)
    n = 8000
    xs = (rng.randbelow_array(n, 6) + rng.randbelow_array(n, 6)).astype(int)
    pmf = np.array([min(k + 1, 11 - k) / 36 for k in range(11)])
    cdf_vals = np.cumsum(pmf)

    def true_cdf(edges):
        idx = np.clip(np.floor(np.asarray(edges)).astype(int), -1, 10)
        out = np.where(idx < 0, 0.0, cdf_vals[np.clip(idx, 0, 10)])
        return out

    stat, dof, p = chi2_gof(xs, true_cdf)
    assert p > 0.01


def test_chi2_merges_small_bins():
    xs = [0] * 100 + [1] * 3 + [5] * 100
    stat, dof, p = chi2_gof(xs, lambda e: gaussian_cdf(e, 2.0, 2.0),
                            min_expected_per_bin=5)
    assert dof >= 1


def test_chi2_rejects_non_integer():
    with pytest.raises(ValueError):
        chi2_gof([0.5, 1.5], lambda e: np.asarray(e) * 0 + 0.5)


def test_evaluate_fit_penalizes_parameters():
    rng = SplitMix64(8)
    xs = np.round(gev_draws(4000, 20.0, 3.0, 0.05, seed=3)).astype(int)
    gev_fit = evaluate_fit(fit_gev_pwm(xs), xs)
    gauss_fit = evaluate_fit(fit_gaussian(xs), xs)
    assert gev_fit.dof is not None and gauss_fit.dof is not None
    assert gev_fit.p_value > gauss_fit.p_value

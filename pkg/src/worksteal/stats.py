"""Statistics for the experimental campaign.

Summaries, least-squares regression of the overhead against log2(W),
integer histograms, closed-form extreme-value fitting by probability-
weighted moments, and chi-square goodness of fit for discrete makespan
samples.  The GEV estimator is the Hosking-Wallis-Wood PWM form; its
shape is reported in the standard sign convention (xi = -k, positive
xi = heavy upper tail).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .special import chi2_sf
from .special import gamma as _gamma

_EULER = 0.5772156649015329


class FitError(ValueError):
    """Samples cannot support the requested fit."""


def summarize(samples) -> tuple[float, float, float]:
    """(mean, unbiased variance, coefficient of variation sd/mean)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ValueError("summarize needs at least two samples")
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    cv = math.sqrt(var) / mean if mean != 0.0 else math.inf
    return mean, var, cv


def linear_regression(x, y) -> tuple[float, float, float]:
    """Ordinary least squares; returns (slope, intercept, r_squared).

    A constant response is fit by a flat line with r_squared defined
    as 0 (the 0/0 convention for explained variance).
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.size != ya.size or xa.size < 3:
        raise ValueError("need matching x/y with at least 3 points")
    if np.ptp(xa) == 0.0:
        raise ValueError("x must not be constant")
    xm = xa.mean()
    ym = ya.mean()
    sxx = float(((xa - xm) ** 2).sum())
    sxy = float(((xa - xm) * (ya - ym)).sum())
    slope = sxy / sxx
    intercept = ym - slope * xm
    ss_tot = float(((ya - ym) ** 2).sum())
    if ss_tot == 0.0:
        return slope, intercept, 0.0
    resid = ya - (slope * xa + intercept)
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot
    return slope, intercept, r2


def histogram(samples, bin_width: int = 1) -> list[tuple[int, int]]:
    """Exact integer binning: [(bin_start, count)] covering the full span."""
    if bin_width < 1:
        raise ValueError("bin_width must be a positive integer")
    xs = list(samples)
    if not xs:
        raise ValueError("histogram of an empty sample")
    bins = [int(math.floor(x / bin_width)) * bin_width for x in xs]
    lo, hi = min(bins), max(bins)
    counts = {b: 0 for b in range(lo, hi + 1, bin_width)}
    for b in bins:
        counts[b] += 1
    return sorted(counts.items())


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------

def gaussian_cdf(x, mean: float, sd: float):
    if sd <= 0.0:
        raise ValueError("sd must be positive")
    z = (np.asarray(x, dtype=float) - mean) / (sd * math.sqrt(2.0))
    out = 0.5 * (1.0 + np.vectorize(math.erf)(z))
    return float(out) if np.isscalar(x) else out


def gev_cdf(x, mu: float, sigma: float, xi: float):
    """Generalized extreme value CDF, location/scale/shape convention."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    z = (np.asarray(x, dtype=float) - mu) / sigma
    if abs(xi) < 1e-12:
        out = np.exp(-np.exp(-z))
    else:
        t = 1.0 + xi * z
        inside = t > 0.0
        out = np.empty_like(z)
        out[~inside] = 0.0 if xi > 0 else 1.0
        with np.errstate(over="ignore"):
            out[inside] = np.exp(-t[inside] ** (-1.0 / xi))
    return float(out) if np.isscalar(x) else out


def gev_quantile(p, mu: float, sigma: float, xi: float):
    """Inverse of gev_cdf on (0, 1)."""
    pa = np.asarray(p, dtype=float)
    if np.any((pa <= 0.0) | (pa >= 1.0)):
        raise ValueError("quantile needs p in (0, 1)")
    if abs(xi) < 1e-12:
        out = mu - sigma * np.log(-np.log(pa))
    else:
        out = mu + sigma * ((-np.log(pa)) ** (-xi) - 1.0) / xi
    return float(out) if np.isscalar(p) else out


@dataclass(frozen=True)
class FitReport:
    """Fitted family, parameters, and (optionally) goodness of fit."""

    family: str                 # "gev" or "gaussian"
    params: tuple[float, ...]   # (mu, sigma, xi) or (mean, sd)
    chi2: float | None = None
    dof: int | None = None
    p_value: float | None = None

    def cdf(self, x):
        if self.family == "gev":
            return gev_cdf(x, *self.params)
        return gaussian_cdf(x, *self.params)

    @property
    def n_params(self) -> int:
        return len(self.params)


def fit_gev_pwm(samples) -> FitReport:
    """Fit a GEV by probability-weighted moments (L-moments).

    Sample PWMs b0, b1, b2 come from the ascending order statistics;
    the shape follows Hosking's rational approximation
    k = 7.8590 c + 2.9554 c^2 with c = (2 b1 - b0)/(3 b2 - b0)
    - ln 2 / ln 3, then sigma = (2 b1 - b0) k / (Gamma(1+k)(1 - 2^-k))
    and mu = b0 + sigma (Gamma(1+k) - 1)/k.  Reported shape is
    xi = -k.  Degenerate (all-equal) samples raise FitError.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 50:
        raise FitError("PWM fit needs at least 50 samples")
    if x[0] == x[-1]:
        raise FitError("all samples equal; nothing to fit")
    i = np.arange(1, n + 1, dtype=float)
    b0 = float(x.mean())
    b1 = float(np.sum((i - 1.0) / (n - 1.0) * x) / n)
    b2 = float(np.sum((i - 1.0) * (i - 2.0) / ((n - 1.0) * (n - 2.0)) * x) / n)
    c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - math.log(2.0) / math.log(3.0)
    k = 7.8590 * c + 2.9554 * c * c
    if abs(k) < 1e-9:
        sigma = (2.0 * b1 - b0) / math.log(2.0)
        mu = b0 - sigma * _EULER
        return FitReport(family="gev", params=(mu, sigma, 0.0))
    g = _gamma(1.0 + k)
    sigma = (2.0 * b1 - b0) * k / (g * (1.0 - 2.0 ** (-k)))
    mu = b0 + sigma * (g - 1.0) / k
    if sigma <= 0.0:
        raise FitError("PWM produced a non-positive scale")
    return FitReport(family="gev", params=(mu, sigma, -k))


def fit_gaussian(samples) -> FitReport:
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise FitError("need at least two samples")
    sd = float(x.std(ddof=1))
    if sd == 0.0:
        raise FitError("all samples equal; nothing to fit")
    return FitReport(family="gaussian", params=(float(x.mean()), sd))


# ---------------------------------------------------------------------------
# chi-square goodness of fit
# ---------------------------------------------------------------------------

def chi2_gof(samples, model_cdf, n_params: int = 0,
             min_expected_per_bin: float = 5.0) -> tuple[float, int, float]:
    """Pearson chi-square test of integer samples against a fitted CDF.

    Integer values are binned with half-integer continuity edges and
    open tails, then adjacent bins are merged left to right until every
    expected count reaches ``min_expected_per_bin``.  Degrees of
    freedom are bins - 1 - n_params (fitted parameters penalized);
    the p-value is the regularized upper incomplete gamma
    Q(dof/2, stat/2).
    """
    s = np.asarray(samples)
    if s.size < 2:
        raise ValueError("chi2_gof needs at least two samples")
    if not np.all(s == np.floor(s)):
        raise ValueError("chi2_gof expects integer-valued samples")
    s = s.astype(np.int64)
    lo, hi = int(s.min()), int(s.max())
    values = np.arange(lo, hi + 1)
    obs = np.bincount(s - lo, minlength=values.size).astype(float)
    cum = np.asarray(model_cdf(values + 0.5), dtype=float)
    prob = np.empty(values.size)
    prob[0] = cum[0]
    prob[1:] = np.diff(cum)
    prob[-1] += 1.0 - cum[-1]          # open tails absorb the rest
    expected = s.size * prob

    merged_obs: list[float] = []
    merged_exp: list[float] = []
    acc_o = acc_e = 0.0
    for o, e in zip(obs, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected_per_bin:
            merged_obs.append(acc_o)
            merged_exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0.0 or acc_o > 0.0:
        if merged_exp:
            merged_obs[-1] += acc_o
            merged_exp[-1] += acc_e
        else:
            merged_obs.append(acc_o)
            merged_exp.append(acc_e)

    o = np.array(merged_obs)
    e = np.array(merged_exp)
    stat = float(np.sum((o - e) ** 2 / e))
    dof = len(o) - 1 - n_params
    if dof < 1:
        raise ValueError("not enough bins for the requested parameter count")
    return stat, dof, chi2_sf(stat, dof)


def evaluate_fit(report: FitReport, samples,
                 min_expected_per_bin: float = 5.0) -> FitReport:
    """Attach a chi-square goodness-of-fit result to a FitReport."""
    stat, dof, p = chi2_gof(samples, report.cdf, n_params=report.n_params,
                            min_expected_per_bin=min_expected_per_bin)
    return replace(report, chi2=stat, dof=dof, p_value=p)

"""Self-contained gamma-family special functions.

The statistics layer needs Gamma(1+k) for the extreme-value fit and the
regularized upper incomplete gamma Q(a, x) for chi-square p-values.
Both are implemented here so the numerical path is fully documented:
Lanczos approximation (g = 7, 9 coefficients, relative error below
1e-10 over the range used) plus the classic series / continued-fraction
split for the incomplete gamma.  Tests cross-check every value against
scipy and the closed forms at 1, 2 and 4 degrees of freedom.
"""

from __future__ import annotations

import math

# Lanczos g = 7, n = 9 coefficients (double-precision set)
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma function for real x (poles at non-positive integers)."""
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        s = math.sin(math.pi * x)
        if s == 0.0:
            raise ValueError(f"gamma pole at {x}")
        return math.pi / (s * gamma(1.0 - x))
    x -= 1.0
    a = _LANCZOS[0]
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * a


def gammaln(x: float) -> float:
    """log Gamma(x) for x > 0, overflow-free."""
    if x <= 0.0:
        raise ValueError("gammaln needs x > 0")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - gammaln(1.0 - x)
    x -= 1.0
    a = _LANCZOS[0]
    for i in range(1, 9):
        a += _LANCZOS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (x + 0.5) * math.log(t) - t + math.log(a)


def _lower_series(a: float, x: float) -> float:
    """P(a, x) by series, for x < a + 1."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(1000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - gammaln(a))


def _upper_cf(a: float, x: float) -> float:
    """Q(a, x) by Lentz continued fraction, for x >= a + 1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - gammaln(a))


def gammainc_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a)."""
    if a <= 0.0:
        raise ValueError("gammainc_upper needs a > 0")
    if x < 0.0:
        raise ValueError("gammainc_upper needs x >= 0")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _lower_series(a, x)
    return _upper_cf(a, x)


def chi2_sf(stat: float, dof: int) -> float:
    """Survival function of the chi-square distribution."""
    if dof < 1:
        raise ValueError("chi2_sf needs dof >= 1")
    return gammainc_upper(dof / 2.0, stat / 2.0)

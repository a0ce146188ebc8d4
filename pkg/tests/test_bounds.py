import math

import pytest

from worksteal.bounds import (
    LAMBDA_LIMIT,
    ModelAssertionError,
    lam,
    lower_bound_run,
    makespan_bound,
    nu_lambda,
    optimize_nu,
    h_of,
    q,
    q_k,
)


# -- request probabilities -------------------------------------------------------

def test_q_examples():
    assert q(1, 3) == pytest.approx(0.5)
    assert q(2, 3) == pytest.approx(0.75)
    assert q(0, 17) == 0.0


def test_q_large_m_limit():
    # q(m-1) approaches 1 - 1/e
    m = 10 ** 6
    assert q(m - 1, m) == pytest.approx(1 - math.exp(-1), abs=1e-5)


def test_q_monotone_in_r():
    m = 64
    vals = [q(r, m) for r in range(m)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_q_k_examples():
    assert q_k(1, 3, 1) == pytest.approx(0.5)
    assert q_k(3, 4, 2) == pytest.approx(2 / 9)


def test_q_k_sums_to_one():
    for m in (3, 10, 64, 1024):
        for r in {1, 2, min(m - 1, 7), min(m - 1, 64)}:
            total = sum(q_k(r, m, k) for k in range(r + 1))
            assert total == pytest.approx(1.0, abs=1e-12)


def test_q_domain_errors():
    with pytest.raises(ValueError):
        q(5, 5)
    with pytest.raises(ValueError):
        q(-1, 5)
    with pytest.raises(ValueError):
        q_k(2, 5, 3)


# -- contraction factors ---------------------------------------------------------

def test_h_examples():
    assert h_of("unit", 1, 3) == pytest.approx(0.75)
    # nu = 2 power matches the unit factor exactly
    for r in range(0, 7):
        assert h_of("power", r, 8, nu=2.0) == pytest.approx(h_of("unit", r, 8))
    # coop two-term sum: 1 - (1 - 1/4) q_1(1)
    assert h_of("coop", 1, 3, nu=3.0) == pytest.approx(0.625)
    assert h_of("dag", 1, 3) == pytest.approx(0.75)


def test_h_in_unit_interval_and_decreasing():
    m = 128
    for scen, nu in (("unit", None), ("power", 2.5), ("coop", 3.0), ("dag", None)):
        vals = [h_of(scen, r, m, nu=nu) for r in range(m)]
        assert all(0.0 < v <= 1.0 for v in vals)
    unit_vals = [h_of("unit", r, m) for r in range(1, m)]
    assert all(b < a for a, b in zip(unit_vals, unit_vals[1:]))


# -- lambda ------------------------------------------------------------------------

def test_lambda_unit_at_1024():
    lv = lam("unit", 1024)
    assert 1.80 <= lv <= 1.8245
    assert 3.64 < 2 * lv <= 3.65
    assert 3 * lv <= 5.5


def test_lambda_limit_constant():
    assert LAMBDA_LIMIT == pytest.approx(1.8246, abs=2e-4)
    assert 3 * LAMBDA_LIMIT == pytest.approx(5.4739, abs=5e-4)
    assert 5.47 < 3 * LAMBDA_LIMIT <= 5.5


def test_lambda_full_scan_equals_endpoint_scan():
    for m in (4, 32, 256, 1024):
        assert lam("unit", m) == pytest.approx(lam("unit", m, scan="endpoints"),
                                               abs=1e-9)


def test_lambda_approaches_limit():
    assert lam("unit", 8192) == pytest.approx(LAMBDA_LIMIT, abs=2e-3)


# -- nu optimisation -----------------------------------------------------------------

def test_optimize_nu_power():
    nu_star, val = optimize_nu("power", 1024)
    assert nu_star == pytest.approx(2.94, abs=0.05)
    assert 3.20 < val <= 3.24


def test_nu_lambda_consistency_at_two():
    assert nu_lambda("power", 1024, 2.0) == pytest.approx(2 * lam("unit", 1024),
                                                          rel=1e-12)


def test_coop_constant():
    val = 3.0 * lam("coop", 1024, nu=3.0)
    assert 2.80 < val <= 2.88


# -- makespan bounds ------------------------------------------------------------------

def test_bound_unit_power_formula():
    W = 2 ** 17
    b = makespan_bound("unit_power", W, 16)
    assert b.expected == pytest.approx(W / 16 + 3.24 * (17 + 0.5 / math.log(2)) + 1)


def test_bound_dag_formula():
    b = makespan_bound("dag", 2000, 25, D=20)
    assert b.expected == pytest.approx(2000 / 25 + 5.5 * 20 + 1)
    assert b.expected == pytest.approx(191.0)


def test_bound_weighted_formula():
    b = makespan_bound("weighted", 100, 4, n=20, p_max=10)
    assert b.expected == pytest.approx(
        25 + (3 / 4) * 10 + 3.24 * (math.log2(20) + 0.5 / math.log(2)) + 1)


def test_bounds_dominate_base_load():
    for scen, kw in (("unit_variance", {}), ("unit_power", {}), ("unit_coop", {}),
                     ("weighted", {"n": 10, "p_max": 7}), ("dag", {"D": 9})):
        b = makespan_bound(scen, 1000, 8, **kw)
        assert b.expected >= 1000 / 8


def test_bound_dominates_lower_bound_construction():
    # the guaranteed upper bound always exceeds the best-case makespan
    # of the adversarial cascade instance
    for k in range(1, 7):
        W, m = 2 ** (k + 1), 2 ** k
        res = lower_bound_run(k)
        b = makespan_bound("unit_variance", W, m)
        assert b.expected >= res.cmax


def test_tail_bounds_monotone_and_above_mean_scale():
    b = makespan_bound("unit_power", 2 ** 15, 32)
    assert b.tail(0.01) > b.tail(0.1) > b.tail(0.5)
    with pytest.raises(ValueError):
        b.tail(0.0)


def test_bound_argument_validation():
    with pytest.raises(ValueError):
        makespan_bound("weighted", 100, 4)
    with pytest.raises(ValueError):
        makespan_bound("dag", 100, 4)
    with pytest.raises(ValueError):
        makespan_bound("nope", 100, 4)


# -- constructive lower bound -----------------------------------------------------------

def test_lower_bound_small_cases():
    assert lower_bound_run(1).cmax == 3
    assert lower_bound_run(2).cmax == 4
    assert lower_bound_run(3).cmax == 5


def test_lower_bound_matches_formula():
    for k in range(1, 11):
        res = lower_bound_run(k)
        assert res.cmax == k + 2
        # k+2 = W/m + log2(W) - 1 for this family
        assert res.cmax == res.W // res.m + int(math.log2(res.W)) - 1
        # identity holds in the constructed schedule too
        assert res.m * res.cmax == res.W + res.steals_total


def test_lower_bound_validates_k():
    with pytest.raises(ValueError):
        lower_bound_run(0)

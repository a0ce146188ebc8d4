import math

import pytest

import worksteal as ws
from worksteal.bounds import h_of, q
from worksteal.engine import Simulation
from worksteal.potential import (
    build_phi_series,
    phi,
    verify_one_step_decrease,
)
from worksteal.protocols import ProtocolOptions
from worksteal.rng import SplitMix64
from worksteal.workloads import ExplicitInit, UnitTasks


def unit_sim(counts, seed=0, coop=False):
    m = len(counts)
    cfg = ws.SimConfig(mode="unit", m=m, workload=UnitTasks(sum(counts)),
                       protocol=ProtocolOptions(cooperative=coop),
                       initial=ExplicitInit(counts), seed=seed)
    return Simulation(cfg)


# -- phi values -----------------------------------------------------------------

def test_phi_examples():
    assert phi("variance", [4, 0]) == pytest.approx(8.0)
    assert phi("power_minus", [3, 1, 0], nu=2) == pytest.approx(6.0)
    D = 9
    load = 0.5 * (2 * math.sqrt(2)) ** D
    assert phi("sum_squares", [load]) == pytest.approx(load ** 2)


def test_phi_validation():
    with pytest.raises(ValueError):
        phi("power", [1, 2])            # missing nu
    with pytest.raises(ValueError):
        phi("power", [1, 2], nu=1.0)    # nu must exceed 1
    with pytest.raises(ValueError):
        phi("variance", [-1, 2])
    with pytest.raises(ValueError):
        phi("cubic", [1])


def test_variance_upper_bound():
    # variance potential never exceeds (1 - 1/m) w^2
    sim = unit_sim([10, 0, 0], seed=4)
    while not sim.done:
        w = sim.total_work()
        assert phi("variance", sim.w) <= (1 - 1 / sim.m) * w * w + 1e-9
        sim.step()


# -- exact one-step enumeration ---------------------------------------------------

def exhaustive_expected_phi(sim, kind, nu=None):
    """Independent enumeration oracle: all victim assignments, all winners."""
    idle = sim.idle_processors()
    m = sim.m
    if not idle:
        c = sim.clone()
        c.step(forced={})
        return phi(kind, c.potential_loads(), nu=nu)
    total = 0.0
    count = 0
    choices = [[v for v in range(m) if v != i] for i in idle]
    import itertools
    for combo in itertools.product(*choices):
        assignment = dict(zip(idle, combo))
        c = sim.clone()
        c.step(forced=assignment)
        total += phi(kind, c.potential_loads(), nu=nu)
        count += 1
    return total / count


def test_exact_verifier_matches_oracle_unit():
    sim = unit_sim([10, 0, 0], seed=1)
    res = verify_one_step_decrease(sim, "variance", lambda r: h_of("unit", r, 3),
                                   samples=200, rng=SplitMix64(5))
    assert res.exact
    oracle = exhaustive_expected_phi(sim, "variance")
    assert res.expected_after == pytest.approx(oracle, rel=1e-12)
    # the documented h bound: E[phi'] <= (1 - q(2)/2) phi
    assert res.passed
    assert res.bound == pytest.approx((1 - q(2, 3) / 2) * phi("variance", [10, 0, 0]))


def test_exact_verifier_matches_oracle_coop():
    sim = unit_sim([9, 0, 0], seed=2, coop=True)
    res = verify_one_step_decrease(sim, "power_minus",
                                   lambda r: h_of("coop", r, 3, nu=3.0),
                                   samples=200, rng=SplitMix64(6), nu=3.0)
    assert res.exact and res.passed
    oracle = exhaustive_expected_phi(sim, "power_minus", nu=3.0)
    assert res.expected_after == pytest.approx(oracle, rel=1e-12)


def test_r_zero_variance_fixed_point():
    # with nobody idle, execution leaves the variance potential unchanged
    sim = unit_sim([5, 5], seed=3)
    res = verify_one_step_decrease(sim, "variance", lambda r: h_of("unit", r, 2),
                                   samples=200, rng=SplitMix64(7))
    assert res.r == 0
    assert res.expected_after == pytest.approx(res.phi_before)
    assert res.passed


def test_power_single_pile_exact_decrement():
    # one loaded processor, one thief: the halving drop of sum w^nu is
    # at least (1 - 2^(1-nu)) w^nu
    nu = 2.94
    sim = unit_sim([12, 0], seed=8)
    res = verify_one_step_decrease(sim, "power", lambda r: h_of("power", r, 2, nu=nu),
                                   samples=200, rng=SplitMix64(8), nu=nu)
    assert res.exact and res.passed
    keep, get = (6, 5)   # victim ceil of (12-1)/2
    assert res.expected_after == pytest.approx(keep ** nu + get ** nu)
    assert (res.phi_before - res.expected_after) >= (1 - 2 ** (1 - nu)) * 12 ** nu - 1e-9


def test_sampled_verifier_agrees_with_exact():
    sim = unit_sim([10, 0, 0], seed=9)
    exact = verify_one_step_decrease(sim, "variance", lambda r: h_of("unit", r, 3),
                                     samples=200, rng=SplitMix64(1))
    sampled = verify_one_step_decrease(sim, "variance", lambda r: h_of("unit", r, 3),
                                       samples=4000, rng=SplitMix64(2), micro_m=0)
    assert not sampled.exact
    assert sampled.expected_after == pytest.approx(exact.expected_after,
                                                   abs=4 * sampled.stderr + 1e-9)
    assert sampled.passed


def test_verifier_rejects_few_samples():
    sim = unit_sim([4, 0])
    with pytest.raises(ValueError):
        verify_one_step_decrease(sim, "variance", lambda r: 1.0, samples=50,
                                 rng=SplitMix64(0))


def test_verifier_skips_tiny_unit_states():
    sim = unit_sim([1, 0])
    res = verify_one_step_decrease(sim, "variance", lambda r: h_of("unit", r, 2),
                                   samples=200, rng=SplitMix64(0))
    assert res.skipped


def test_verifier_requires_nonterminal():
    sim = unit_sim([1])
    sim.step()
    with pytest.raises(ValueError):
        verify_one_step_decrease(sim, "variance", lambda r: 1.0, samples=200,
                                 rng=SplitMix64(0))


# -- unit steals strictly decrease the sum of squares ------------------------------

def test_successful_steal_decreases_sum_squares():
    for seed in range(10):
        cfg = ws.SimConfig(mode="unit", m=4, workload=UnitTasks(60), seed=seed)
        sim = Simulation(cfg, event_log=True)
        sim.run()
        for ev in sim.events:
            if ev[0] == "unit_steal":
                _, _v, w_before, keep, get = ev
                assert w_before >= 2
                assert keep ** 2 + get ** 2 < w_before ** 2


# -- phi series --------------------------------------------------------------------

def test_phi_series_tau_and_rescale():
    # with the rescaled variance potential, crossing below 1 means the
    # loads are exactly balanced: the rest of the run is a single
    # steal-free busy phase (the balanced loads may exceed one task per
    # processor, e.g. four processors draining (3,3,3,3))
    for seed in range(25):
        m = 3 + seed % 4
        cfg = ws.SimConfig(mode="unit", m=m, workload=UnitTasks(40 + seed),
                           seed=seed, record_potential=True, record_steps=True)
        res = ws.run(cfg)
        scale = 1 - 1 / (m - 1)
        series = build_phi_series(res.phi0, res.telemetry, scale=scale)
        assert series.tau <= res.cmax
        assert series.values[-1] == 0.0
        # no steal requests at or after tau ...
        later = sum(t.r_t for t in res.telemetry[series.tau:])
        assert later == 0
        assert series.R_before_tau == res.steals_total
        # ... and the balanced remainder drains in exactly w/m slots
        w_at_tau = (res.telemetry[series.tau - 1].w_total if series.tau > 0
                    else 40 + seed)
        assert w_at_tau % m == 0
        assert res.cmax == series.tau + w_at_tau // m

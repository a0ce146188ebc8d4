"""Random reachable states for the one-step contraction checks.

Each analysis scenario pairs a potential kind with a contraction factor
h(r); this module builds small mid-run simulation states to feed
:func:`worksteal.potential.verify_one_step_decrease`, by running a
random configuration of the matching protocol for a random number of
slots.  States are nonterminal by construction.
"""

from __future__ import annotations

from .bounds import h_of
from .engine import SimConfig, Simulation
from .protocols import ProtocolOptions
from .rng import SplitMix64
from .workloads import AllOnZero, BallsAndBins, DagTasks, UnitTasks, dag_for_work

SCENARIO_KINDS = {
    "unit": "variance",
    "power": "power",
    "coop": "power_minus",
    "dag": "sum_squares",
}


def scenario_setup(scenario: str, m: int, nu: float | None = None):
    """(potential kind, nu, h function) for one scenario."""
    kind = SCENARIO_KINDS[scenario]
    if scenario == "power":
        nu = nu if nu is not None else 2.94
    elif scenario == "coop":
        # the cooperative decrement is derived for nu <= 3
        nu = nu if nu is not None else 3.0
    else:
        nu = None
    bound_scenario = {"unit": "unit", "power": "power",
                      "coop": "coop", "dag": "dag"}[scenario]
    return kind, nu, (lambda r: h_of(bound_scenario, r, m, nu=nu))


def random_reachable_state(scenario: str, rng: SplitMix64,
                           max_m: int = 8, max_w: int = 64) -> Simulation:
    """A nonterminal state reached by running the scenario's protocol."""
    m = 2 + rng.randbelow(max_m - 1)
    if scenario == "dag":
        n = max(m + 2, 8 + rng.randbelow(max_w))
        min_layers = 2
        while (1 << min_layers) - 1 < n:
            min_layers += 1
        layers = min(n, min_layers + rng.randbelow(max(n - min_layers, 1)))
        dag = dag_for_work(n, layers, rng)
        config = SimConfig(mode="dag", m=m, workload=DagTasks(dag),
                           seed=rng.u64())
    else:
        W = 2 + rng.randbelow(max_w - 1)
        initial = BallsAndBins() if rng.randbelow(2) else AllOnZero()
        config = SimConfig(
            mode="unit", m=m, workload=UnitTasks(W),
            protocol=ProtocolOptions(cooperative=(scenario == "coop")),
            initial=initial, seed=rng.u64())
    sim = Simulation(config)
    burn = rng.randbelow(max(sim.total_work() // 2, 1) + 1)
    for _ in range(burn):
        if sim.done:
            break
        sim.step()
    if sim.done:  # over-burned; the fresh state is always nonterminal
        sim = Simulation(config)
    return sim

"""Load-imbalance potentials and the one-step contraction verifier.

Four scalar potentials measure how unevenly work is spread:

  variance     sum_i (w_i - mean)^2, the unit-task imbalance
  power        sum_i w_i^nu for nu > 1
  power_minus  sum_i (w_i^nu - w_i), used by the cooperative and
               weighted analyses
  sum_squares  sum_i w_i^2 on already-instrumented loads (deque mode
               feeds 2^(L/2)-style values here)

The contraction hypothesis says the expected potential after one slot
with r steal requests is at most h(r) times the current one, for a
scenario-specific factor h.  `verify_one_step_decrease` checks that
hypothesis on a live simulation state, exactly by enumeration on micro
states and by Monte-Carlo sampling elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

KINDS = ("variance", "power", "power_minus", "sum_squares")


def phi(kind: str, loads, nu: float | None = None) -> float:
    """Evaluate a potential on per-processor loads."""
    ws = [float(w) for w in loads]
    if any(w < 0 for w in ws):
        raise ValueError("loads must be non-negative")
    if kind == "variance":
        mean = sum(ws) / len(ws)
        return math.fsum((w - mean) ** 2 for w in ws)
    if kind == "power":
        return math.fsum(w ** _nu(nu) for w in ws)
    if kind == "power_minus":
        e = _nu(nu)
        return math.fsum(w ** e - w for w in ws)
    if kind == "sum_squares":
        return math.fsum(w * w for w in ws)
    raise ValueError(f"unknown potential kind {kind!r}")


def _nu(nu: float | None) -> float:
    if nu is None:
        raise ValueError("this potential kind needs nu")
    if nu <= 1:
        raise ValueError("nu must exceed 1")
    return float(nu)


def default_kind(mode: str) -> str:
    return {"unit": "variance", "weighted": "power_minus", "dag": "sum_squares"}[mode]


# ---------------------------------------------------------------------------
# potential trajectory of a recorded run
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiSeries:
    """Per-slot potential values of one run.

    ``values[t]`` is the potential at the start of slot t (values[0] is
    the initial potential, the last entry is 0 at termination).  ``tau``
    is the first index with value < 1 and ``R_before_tau`` the number
    of steal requests issued strictly before it.
    """

    values: tuple[float, ...]
    tau: int
    R_before_tau: int


def build_phi_series(phi0: float, telemetry, scale: float = 1.0) -> PhiSeries:
    """Assemble a PhiSeries from a recorded run.

    ``telemetry`` is the per-slot record list of a run with potential
    recording on (each entry carries the post-slot potential and r_t).
    ``scale`` divides every value first, for rescaled variants of the
    threshold argument.
    """
    vals = [phi0 / scale]
    for t in telemetry:
        if t.phi is None:
            raise ValueError("telemetry lacks potential values; "
                             "run with record_potential=True")
        vals.append(t.phi / scale)
    tau = None
    for i, v in enumerate(vals):
        if v < 1.0:
            tau = i
            break
    if tau is None:
        raise ValueError("potential never dropped below 1; run incomplete?")
    r_before = sum(telemetry[s].r_t for s in range(min(tau, len(telemetry))))
    return PhiSeries(tuple(vals), tau, int(r_before))


# ---------------------------------------------------------------------------
# one-step contraction verifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerifyResult:
    passed: bool
    skipped: bool
    exact: bool
    r: int
    phi_before: float
    expected_after: float
    bound: float
    stderr: float

    def __bool__(self) -> bool:
        return self.passed or self.skipped


def verify_one_step_decrease(sim, kind: str, h_fn, samples: int, rng,
                             nu: float | None = None,
                             micro_m: int = 4, micro_work: int = 16) -> VerifyResult:
    """Check E[phi_after | state] <= h(r) * phi_before on one state.

    ``sim`` is a live Simulation (nonterminal); ``h_fn(r)`` gives the
    scenario's contraction factor.  On micro states (m <= micro_m and
    total work <= micro_work) the expectation is computed exactly by
    enumerating every victim assignment; otherwise the next slot is
    sampled ``samples`` times and the check passes iff the estimate is
    at most the bound plus three standard errors.

    Variance-kind caveat: the unit-task contraction is only derived for
    total work >= 2, so states with w(t) <= 1 are skipped.
    """
    if sim.done:
        raise ValueError("verify_one_step_decrease needs a nonterminal state")
    if samples < 100:
        raise ValueError("fewer than 100 samples cannot certify the bound")

    phi_before = phi(kind, sim.potential_loads(), nu=nu)
    r = sim.idle_count()
    bound = h_fn(r) * phi_before

    if kind == "variance" and sim.total_work() <= 1:
        return VerifyResult(True, True, False, r, phi_before, 0.0, bound, 0.0)
    if phi_before == 0.0:
        # already balanced; contraction is trivially satisfied
        return VerifyResult(True, True, False, r, phi_before, 0.0, bound, 0.0)

    # slack for float noise in the balanced fixed point E[phi'] == phi
    # (e.g. r = 0 under the variance kind); real violations are O(phi)
    eps = 1e-9 * max(phi_before, 1.0)

    if sim.m <= micro_m and sim.total_work() <= micro_work:
        expected = _exact_expected_phi(sim, kind, nu)
        return VerifyResult(expected <= bound + eps, False, True, r,
                            phi_before, expected, bound, 0.0)

    total = 0.0
    total_sq = 0.0
    for _ in range(samples):
        c = sim.clone()
        c.step(rng=rng)
        v = phi(kind, c.potential_loads(), nu=nu)
        total += v
        total_sq += v * v
    est = total / samples
    var = max(total_sq / samples - est * est, 0.0)
    se = math.sqrt(var / samples)
    return VerifyResult(est <= bound + 3.0 * se + eps, False, False, r,
                        phi_before, est, bound, se)


def _exact_expected_phi(sim, kind: str, nu: float | None) -> float:
    """Exact E[phi after one slot] by enumerating victim choices.

    Every idle processor picks one of the other m-1 processors
    independently and uniformly.  Conditional on the assignment, the
    resulting potential does not depend on which contending thief wins
    (thieves are interchangeable zero-load processors) nor on the
    cooperative part permutation, so arbitration draws need no
    enumeration.
    """
    idle = sim.idle_processors()
    m = sim.m
    r = len(idle)
    if r == 0:
        c = sim.clone()
        c.step(forced={})
        return phi(kind, c.potential_loads(), nu=nu)
    others = [[v for v in range(m) if v != i] for i in idle]
    total = 0.0
    n_outcomes = (m - 1) ** r
    choice = [0] * r
    while True:
        assignment = {i: others[j][choice[j]] for j, i in enumerate(idle)}
        c = sim.clone()
        c.step(forced=assignment)
        total += phi(kind, c.potential_loads(), nu=nu)
        # odometer increment
        j = 0
        while j < r:
            choice[j] += 1
            if choice[j] < m - 1:
                break
            choice[j] = 0
            j += 1
        if j == r:
            break
    return total / n_outcomes

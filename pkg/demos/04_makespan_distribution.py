"""What distribution does the makespan follow?

The makespan of independent tasks behaves like a maximum of correlated
processor finishing times, so its distribution is skewed with a heavy
right tail; a generalized extreme value (GEV) law fits it well and a
Gaussian does not.  For DAGs with a long critical path the makespan is
closer to a sum of per-layer times and drifts back toward a Gaussian.

This script reproduces both effects with chi-square goodness of fit.
Expect a few minutes at the default replication count.
"""

import math

import numpy as np

import worksteal as ws
from worksteal import stats
from worksteal.rng import SplitMix64, derive_seed
from worksteal.workloads import DagTasks, UnitTasks, dag_for_work

REPS = 3000


def sample_overheads(cfg_of, offset, tag):
    xs = np.empty(REPS, dtype=int)
    for i in range(REPS):
        xs[i] = ws.run(cfg_of(derive_seed(tag, i))).cmax - offset
    return xs


def describe(xs, label):
    print(f"{label}: mean={xs.mean():.2f} sd={xs.std(ddof=1):.2f} "
          f"min={xs.min()} max={xs.max()}")
    gev = stats.evaluate_fit(stats.fit_gev_pwm(xs), xs)
    gauss = stats.evaluate_fit(stats.fit_gaussian(xs), xs)
    mu, sigma, xi = gev.params
    print(f"  GEV fit      mu={mu:7.2f} sigma={sigma:5.2f} xi={xi:+.3f}   "
          f"chi2 p = {gev.p_value:.3f}")
    print(f"  Gaussian fit mean={gauss.params[0]:7.2f} sd={gauss.params[1]:5.2f}       "
          f"chi2 p = {gauss.p_value:.2e}")
    # a crude text histogram
    hist = stats.histogram(xs)
    peak = max(c for _v, c in hist)
    for v, c in hist:
        if c:
            print(f"  {v:>5} {'#' * max(1, int(40 * c / peak))}")


# independent unit tasks: GEV-shaped overhead
m, W = 256, 2 ** 15
xs = sample_overheads(
    lambda s: ws.SimConfig(mode="unit", m=m, workload=UnitTasks(W), seed=s),
    math.ceil(W / m), tag=41)
describe(xs, f"unit tasks m={m} W=2^15, overhead above ceil(W/m)")

# long-critical-path DAG: back toward Gaussian
md, Wd = 128, 2 ** 17
dag = dag_for_work(Wd, Wd // (4 * md), SplitMix64(9))
xd = sample_overheads(
    lambda s: ws.SimConfig(mode="dag", m=md, workload=DagTasks(dag), seed=s),
    math.ceil(dag.n / md), tag=42)
print()
describe(xd, f"layered DAG m={md} n=2^17 depth={dag.D}, overhead")

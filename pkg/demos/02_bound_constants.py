"""The analysis constants, computed rather than quoted.

Each scheduling scenario has a contraction factor h(r): with r steal
requests in flight the expected load-imbalance potential shrinks to at
most h(r) times its value in one slot.  The scenario constant

    lambda = max over r in [1, m-1] of  r / (-m log2 h(r))

turns that per-slot contraction into a bound on total steal requests,
and the makespan bounds follow.  This script evaluates everything at
m = 1024 and prints the resulting guarantees for one workload.
"""

import math

from worksteal import bounds

m = 1024

lam_unit = bounds.lam("unit", m)
print(f"unit-task constant              lambda      = {lam_unit:.4f}")
print(f"  limit for large m                         = {bounds.LAMBDA_LIMIT:.4f}")
print(f"  makespan factor                2*lambda   = {2 * lam_unit:.4f}")

nu_star, best = bounds.optimize_nu("power", m)
print(f"power potential optimum         nu*         = {nu_star:.3f}")
print(f"  makespan factor                nu*lambda  = {best:.4f}")

coop = 3.0 * bounds.lam("coop", m, nu=3.0)
print(f"cooperative (nu=3)              3*lambda    = {coop:.4f}")

dag = 3.0 * bounds.lam("dag", m)
print(f"deque scheduling                3*lambda    = {dag:.4f}")

# what the bounds promise for a concrete workload
W = 2 ** 17
print(f"\nguarantees for W = 2^17 unit tasks on m = {m}:")
print(f"  ideal span W/m                     = {W / m:.1f}")
for scen in ("unit_variance", "unit_power", "unit_coop"):
    b = bounds.makespan_bound(scen, W, m)
    print(f"  {scen:<24} E[makespan] <= {b.expected:8.1f}   "
          f"P(> {b.tail(0.001):.1f}) <= 0.1%")

b = bounds.makespan_bound("dag", W, m, D=math.ceil(math.log2(W)))
print(f"  {'dag (D = log2 W)':<24} E[makespan] <= {b.expected:8.1f}")

# the matching lower bound: even a best-case schedule pays ~log2(W)
print("\nbest-case cascade (W = 2^(k+1) tasks, m = 2^k processors):")
for k in (2, 4, 8):
    res = bounds.lower_bound_run(k)
    print(f"  k={k:>2}: makespan {res.cmax} = W/m + log2(W) - 1 "
          f"= {res.W // res.m} + {k + 1} - 1")

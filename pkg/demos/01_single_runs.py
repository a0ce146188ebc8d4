"""A first tour of the simulator.

Runs a handful of single configurations in each mode and shows the one
invariant every run obeys: every processor-slot is either one executed
unit of work or one steal request, so m * makespan = W + R exactly.
"""

import worksteal as ws
from worksteal.rng import SplitMix64
from worksteal.workloads import DagTasks, UnitTasks, WeightedTasks, dag_for_work


def show(label, cfg):
    res = ws.run(cfg)
    W = cfg.workload.total_work
    print(f"{label:<34} m={cfg.m:<4} W={W:<7} makespan={res.cmax:<7} "
          f"steals={res.steals_total:<6} (ok={res.steals_ok}, fail={res.steals_fail})")
    assert cfg.m * res.cmax == W + res.steals_total
    print(f"{'':<34} identity: {cfg.m} * {res.cmax} == {W} + {res.steals_total}")


# 4096 unit tasks, all starting on processor 0 (the worst imbalance)
show("unit tasks, worst-case start",
     ws.SimConfig(mode="unit", m=16, workload=UnitTasks(4096), seed=1))

# the same workload scattered uniformly at random
show("unit tasks, balls-and-bins start",
     ws.SimConfig(mode="unit", m=16, workload=UnitTasks(4096),
                  initial=ws.BallsAndBins(), seed=1))

# weighted tasks: the scheduler only sees task counts, not sizes
p = [1 + (i * 7) % 10 for i in range(600)]
show("weighted tasks (p in 1..10)",
     ws.SimConfig(mode="weighted", m=8, workload=WeightedTasks(p), seed=2))

# a precedence DAG scheduled with per-processor deques
dag = dag_for_work(4096, 13, SplitMix64(3))
show(f"layered DAG (depth {dag.D})",
     ws.SimConfig(mode="dag", m=8, workload=DagTasks(dag), seed=3))

# per-slot telemetry of a small run
cfg = ws.SimConfig(mode="unit", m=4, workload=UnitTasks(32), seed=4,
                   record_steps=True)
res = ws.run(cfg)
print("\nslot  requests  ok  fail  remaining")
for t in res.telemetry:
    print(f"{t.t:>4}  {t.r_t:>8}  {t.succ:>2}  {t.fail:>4}  {t.w_total:>9}")

"""The compiled kernels must be draw-for-draw equal to the reference engine."""

import random

import pytest

import worksteal as ws
from worksteal import _kernels
from worksteal.protocols import ProtocolOptions
from worksteal.rng import SplitMix64
from worksteal.workloads import DagTasks, UnitTasks, WeightedTasks, dag_for_work

pytestmark = pytest.mark.skipif(not _kernels.AVAILABLE, reason="numba missing")


def random_config(rnd):
    mode = rnd.choice(["unit", "weighted", "dag"])
    m = rnd.randint(1, 9)
    seed = rnd.getrandbits(64)
    if mode == "unit":
        proto = ProtocolOptions(
            cooperative=rnd.random() < 0.4 and m >= 2,
            split_rounding=rnd.choice([None, "victim_ceil", "thief_ceil"]),
            coop_split_base=rnd.choice(["post_exec", "pre_exec"]))
        initial = rnd.choice([ws.AllOnZero(), ws.BallsAndBins()])
        return ws.SimConfig(mode=mode, m=m, workload=UnitTasks(rnd.randint(1, 70)),
                            protocol=proto, initial=initial, seed=seed)
    if mode == "weighted":
        p = [rnd.randint(1, 10) for _ in range(rnd.randint(1, 30))]
        proto = ProtocolOptions(
            split_rounding=rnd.choice([None, "victim_ceil", "thief_ceil"]))
        initial = rnd.choice([ws.AllOnZero(), ws.BallsAndBins()])
        return ws.SimConfig(mode=mode, m=m, workload=WeightedTasks(p),
                            protocol=proto, initial=initial, seed=seed)
    n = rnd.randint(2, 50)
    layers = 2
    while (1 << layers) - 1 < n:
        layers += 1
    layers = rnd.randint(layers, n)
    dag = dag_for_work(n, layers, SplitMix64(rnd.getrandbits(64)))
    return ws.SimConfig(mode=mode, m=m, workload=DagTasks(dag), seed=seed)


def test_kernels_bit_identical_to_reference():
    rnd = random.Random(20240817)
    for _ in range(250):
        cfg = random_config(rnd)
        assert ws.run(cfg) == ws.run(cfg, force_reference=True), cfg


def test_kernels_larger_scales_identity():
    rnd = random.Random(7)
    for _ in range(12):
        cfg = ws.SimConfig(mode="unit", m=rnd.choice([16, 64, 128]),
                           workload=UnitTasks(rnd.choice([2 ** 10, 2 ** 13])),
                           seed=rnd.getrandbits(64))
        res = ws.run(cfg)
        assert ws.accounting_identity_holds(cfg, res)


def test_dag_kernel_capacity_growth():
    # a wide shallow DAG forces large deques through the retry path
    dag = dag_for_work(3000, 12, SplitMix64(5))
    cfg = ws.SimConfig(mode="dag", m=2, workload=DagTasks(dag), seed=11)
    fast = ws.run(cfg)
    ref = ws.run(cfg, force_reference=True)
    assert fast == ref

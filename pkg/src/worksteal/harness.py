"""Replication runner, parameter sweeps, and experiment recipes.

A sweep runs ``replications`` independent simulations per point of one
swept axis; replication i of point j always uses the stream
derive_seed(master_seed, j, i), so any single row can be reproduced in
isolation and the record list is identical however the replications are
scheduled (serially or across threads).  Results go to a flat CSV with
a fixed header; experiment recipes (overhead slope against log2 W,
cooperative savings ratio) consume the same machinery.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import engine, stats
from .bounds import ModelAssertionError
from .protocols import ProtocolOptions
from .rng import SplitMix64, derive_seed
from .workloads import (
    AllOnZero,
    BallsAndBins,
    DagTasks,
    ExplicitInit,
    UnitTasks,
    WeightedTasks,
    generate_layered_dag,
    load_dag,
)

CSV_HEADER = ["seed", "mode", "m", "W", "D", "cmax",
              "steals_total", "steals_ok", "steals_fail", "phi0"]


@dataclass(frozen=True)
class ExperimentRecord:
    """One CSV row: a single replication's outcome."""

    seed: int
    mode: str
    m: int
    W: int
    D: int
    cmax: int
    steals_total: int
    steals_ok: int
    steals_fail: int
    phi0: float

    def to_row(self) -> list:
        return [self.seed, self.mode, self.m, self.W, self.D, self.cmax,
                self.steals_total, self.steals_ok, self.steals_fail,
                repr(self.phi0)]

    @classmethod
    def from_row(cls, row: list) -> "ExperimentRecord":
        return cls(seed=int(row[0]), mode=row[1], m=int(row[2]), W=int(row[3]),
                   D=int(row[4]), cmax=int(row[5]), steals_total=int(row[6]),
                   steals_ok=int(row[7]), steals_fail=int(row[8]),
                   phi0=float(row[9]))


@dataclass(frozen=True)
class SweepSpec:
    """A base configuration, one swept axis, and a replication count."""

    base: engine.SimConfig
    axis_param: str                  # "W" (unit mode) or "m"
    axis_values: tuple[int, ...]
    replications: int
    master_seed: int = 0

    def config_for(self, point: int) -> engine.SimConfig:
        value = self.axis_values[point]
        if self.axis_param == "m":
            return replace(self.base, m=int(value))
        if self.axis_param == "W":
            if self.base.mode != "unit":
                raise ValueError("sweeping W is only supported for unit workloads; "
                                 "build per-point configs for other modes")
            return replace(self.base, workload=UnitTasks(int(value)))
        raise ValueError(f"unknown sweep axis {self.axis_param!r}")


def _record_of(config: engine.SimConfig, result: engine.RunResult) -> ExperimentRecord:
    if not engine.accounting_identity_holds(config, result):
        raise ModelAssertionError(
            f"accounting identity violated: m={config.m} cmax={result.cmax} "
            f"W={config.workload.total_work} R={result.steals_total}")
    D = config.workload.dag.D if config.mode == "dag" else 0
    return ExperimentRecord(seed=config.seed, mode=config.mode, m=config.m,
                            W=config.workload.total_work, D=D, cmax=result.cmax,
                            steals_total=result.steals_total,
                            steals_ok=result.steals_ok,
                            steals_fail=result.steals_fail, phi0=result.phi0)


def run_one(config: engine.SimConfig) -> ExperimentRecord:
    return _record_of(config, engine.run(config))


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[ExperimentRecord]:
    """All replications of all points, in deterministic (point, rep) order.

    Every replication checks the accounting identity; a violation
    aborts the sweep.  ``workers > 1`` runs replications on a thread
    pool (the compiled kernels release the GIL); the returned rows do
    not depend on the schedule.
    """
    jobs = []
    for j in range(len(spec.axis_values)):
        cfg = spec.config_for(j)
        for i in range(spec.replications):
            jobs.append(replace(cfg, seed=derive_seed(spec.master_seed, j, i)))
    if workers <= 1:
        return [run_one(cfg) for cfg in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_one, jobs))


def write_csv(records, path) -> None:
    """Write records; on failure the partial file ends with an ABORT marker."""
    try:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(CSV_HEADER)
            for r in records:
                w.writerow(r.to_row())
    except Exception:
        try:
            with open(path, "a") as f:
                f.write("# ABORTED: partial file\n")
        except OSError:
            pass
        raise


def read_csv(path) -> list[ExperimentRecord]:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError(f"unrecognized CSV header in {path}")
    return [ExperimentRecord.from_row(r) for r in rows[1:] if not r[0].startswith("#")]


# ---------------------------------------------------------------------------
# experiment recipes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlopeResult:
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]   # (log2 W, mean overhead)


def slope_experiment(m: int, W_list, reps: int, master_seed: int = 0,
                     cooperative: bool = False, workers: int = 1) -> SlopeResult:
    """Regress the mean per-processor steal overhead on log2(W).

    Overhead per run is steals_total / m, which by the accounting
    identity equals cmax - W/m.  All tasks start on processor 0.
    """
    if len(W_list) < 3:
        raise ValueError("need at least 3 work sizes")
    base = engine.SimConfig(mode="unit", m=m, workload=UnitTasks(int(W_list[0])),
                            protocol=ProtocolOptions(cooperative=cooperative))
    spec = SweepSpec(base=base, axis_param="W",
                     axis_values=tuple(int(w) for w in W_list),
                     replications=reps, master_seed=master_seed)
    records = run_sweep(spec, workers=workers)
    points = []
    for j, W in enumerate(spec.axis_values):
        chunk = records[j * reps:(j + 1) * reps]
        mean_overhead = sum(r.steals_total for r in chunk) / reps / m
        points.append((math.log2(W), mean_overhead))
    slope, intercept, r2 = stats.linear_regression([p[0] for p in points],
                                                   [p[1] for p in points])
    return SlopeResult(slope=slope, intercept=intercept, r_squared=r2,
                       points=tuple(points))


@dataclass(frozen=True)
class CoopRatioResult:
    ratio: float
    mean_steals_standard: float
    mean_steals_cooperative: float


def coop_ratio_experiment(m: int, W: int, reps: int,
                          master_seed: int = 0) -> CoopRatioResult:
    """Steal-request saving of cooperative arbitration, paired seeds.

    Runs the same seeds with and without cooperation and returns
    1 - mean(R_coop) / mean(R_standard).
    """
    total_std = 0
    total_coop = 0
    for i in range(reps):
        seed = derive_seed(master_seed, 0, i)
        std = engine.SimConfig(mode="unit", m=m, workload=UnitTasks(W), seed=seed)
        coop = replace(std, protocol=ProtocolOptions(cooperative=True))
        total_std += run_one(std).steals_total
        total_coop += run_one(coop).steals_total
    return CoopRatioResult(ratio=1.0 - total_coop / total_std,
                           mean_steals_standard=total_std / reps,
                           mean_steals_cooperative=total_coop / reps)


# ---------------------------------------------------------------------------
# JSON configuration mirror
# ---------------------------------------------------------------------------

def config_from_json(obj: dict) -> engine.SimConfig:
    """Build a SimConfig from the documented JSON schema."""
    mode = obj["mode"]
    wl = obj["workload"]
    if "W" in wl:
        workload = UnitTasks(int(wl["W"]))
    elif "p" in wl:
        workload = WeightedTasks(wl["p"])
    elif "dag_file" in wl:
        workload = DagTasks(load_dag(wl["dag_file"]))
    elif "dag" in wl:
        d = wl["dag"]
        workload = DagTasks(generate_layered_dag(
            int(d["layers"]), int(d["width"]),
            long_path=bool(d.get("long_path", False)),
            rng=SplitMix64(int(d.get("seed", 0))),
            join_prob=float(d.get("join_prob", 0.3))))
    else:
        raise ValueError("workload must give W, p, dag_file or dag")
    init = obj.get("initial", "all_on_zero")
    if init == "all_on_zero":
        initial = AllOnZero()
    elif init == "balls_and_bins":
        initial = BallsAndBins()
    elif isinstance(init, dict) and "explicit" in init:
        initial = ExplicitInit(init["explicit"])
    else:
        raise ValueError(f"unknown initial distribution {init!r}")
    proto = obj.get("protocol", {})
    protocol = ProtocolOptions(
        cooperative=bool(proto.get("cooperative", False)),
        split_rounding=proto.get("split_rounding"),
        coop_split_base=proto.get("coop_split_base", "post_exec"))
    return engine.SimConfig(
        mode=mode, m=int(obj["m"]), workload=workload, protocol=protocol,
        initial=initial, seed=int(obj.get("seed", 0)),
        record_potential=bool(obj.get("record_potential", False)),
        record_steps=bool(obj.get("record_steps", False)),
        potential_kind=obj.get("potential_kind"),
        potential_nu=float(obj.get("potential_nu", 2.0)))


def sweep_from_json(obj: dict) -> SweepSpec:
    base = config_from_json(obj["base"])
    axis = obj["axis"]
    return SweepSpec(base=base, axis_param=axis["param"],
                     axis_values=tuple(int(v) for v in axis["values"]),
                     replications=int(obj["replications"]),
                     master_seed=int(obj.get("master_seed", 0)))


def load_config(path) -> engine.SimConfig:
    with open(path) as f:
        return config_from_json(json.load(f))


def load_sweep(path) -> SweepSpec:
    with open(path) as f:
        return sweep_from_json(json.load(f))

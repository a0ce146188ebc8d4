"""Synchronous discrete-time core of the scheduler simulator.

One slot proceeds in fixed phases from a start-of-slot snapshot:

  1. every processor idle at the snapshot picks a victim uniformly
     among the other m-1 processors (one draw each, ascending id);
  2. every active processor executes one unit of work;
  3. steal requests are arbitrated per victim (ascending victim id) and
     the splits are applied against the post-execution victim state;
     successful thieves start executing only next slot;
  4. (weighted mode) processors whose current task just finished pop
     the next task from their kept queue.

The success predicate is evaluated on the snapshot: a unit victim
needs w >= 2, a weighted victim needs a queued (non-executing) task,
a deque victim needs a poppable top.  Failed requests - contention or
predicate - are counted, which is what makes the accounting identity
m*cmax = W + R exact: every processor-slot is either one executed unit
or one steal request.

Randomness draw order is part of the determinism contract (shared with
the accelerated kernels): phase-1 victim draws for idle processors in
ascending id, then per served victim in ascending id one winner draw
when two or more thieves contend (standard) or a Fisher-Yates shuffle
of the thieves (cooperative, k-1 draws).  Runs with identical
configuration and seed are bit-identical, whichever execution path
handles them.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _kernels
from .potential import default_kind, phi
from .protocols import (
    COOP_POST_EXEC,
    ProtocolOptions,
    split_coop,
    split_unit,
    split_weighted,
)
from .rng import SplitMix64
from .workloads import (
    AllOnZero,
    DagTasks,
    InitialDistribution,
    UnitTasks,
    WeightedTasks,
    Workload,
    realize_initial,
)

MODES = ("unit", "weighted", "dag")


class ConfigError(ValueError):
    """Simulation configuration violates its invariants."""


@dataclass(frozen=True)
class SimConfig:
    """Full description of one simulated run."""

    mode: str
    m: int
    workload: Workload
    protocol: ProtocolOptions = ProtocolOptions()
    initial: InitialDistribution = AllOnZero()
    seed: int = 0
    record_potential: bool = False
    record_steps: bool = False
    potential_kind: str | None = None   # None = canonical kind for the mode
    potential_nu: float = 2.0

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.m < 1:
            raise ConfigError("need m >= 1")
        expected = {"unit": UnitTasks, "weighted": WeightedTasks, "dag": DagTasks}
        if not isinstance(self.workload, expected[self.mode]):
            raise ConfigError(f"mode {self.mode!r} needs a "
                              f"{expected[self.mode].__name__} workload")
        try:
            self.workload.validate()
            self.protocol.validate(self.mode)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if self.workload.total_work < 1:
            raise ConfigError("workload must carry at least one unit of work")
        if not (0 <= self.seed <= (1 << 64) - 1):
            raise ConfigError("seed must fit in 64 bits")

    def phi_kind(self) -> str:
        return self.potential_kind or default_kind(self.mode)


@dataclass(frozen=True)
class StepTelemetry:
    """Observables of one slot."""

    t: int
    r_t: int
    succ: int
    fail: int
    w_total: int
    phi: float | None = None


@dataclass(frozen=True)
class RunResult:
    """Outcome of a completed run; satisfies m*cmax = W + steals_total."""

    cmax: int
    steals_total: int
    steals_ok: int
    steals_fail: int
    phi0: float
    telemetry: tuple[StepTelemetry, ...] | None = None


@dataclass(frozen=True)
class WorkerState:
    """Per-processor snapshot view."""

    queue: object            # unit: task count; weighted: pending times; dag: (node, h) entries
    executing_remaining: int
    tasks_executed: int
    steals_sent_ok: int
    steals_sent_fail: int


class Simulation:
    """Reference slot-by-slot engine for all three modes.

    Slower than the numba kernels but feature-complete: per-slot
    telemetry, potential recording, steal-event logging for the
    decrement checks, cloning, and forced victim assignments for
    exhaustive enumeration.
    """

    def __init__(self, config: SimConfig, event_log: bool = False):
        config.validate()
        self.config = config
        self.m = config.m
        self.mode = config.mode
        self.rng = SplitMix64(config.seed)
        self.t = 0
        self.steals_ok = 0
        self.steals_fail = 0
        self.requests = 0
        self.sent_ok = [0] * self.m
        self.sent_fail = [0] * self.m
        self.tasks_done = [0] * self.m
        self.event_log = event_log
        self.events: list[tuple] = []
        self.rounding = config.protocol.rounding_for(config.mode)
        self._init_state()
        self.phi0 = phi(config.phi_kind(), self.potential_loads(),
                        nu=config.potential_nu)

    # -- state setup ------------------------------------------------------

    def _init_state(self) -> None:
        cfg = self.config
        if self.mode == "unit":
            self.w = list(realize_initial(cfg.initial, cfg.workload, self.m, self.rng))
            self.total = sum(self.w)
        elif self.mode == "weighted":
            queues = realize_initial(cfg.initial, cfg.workload, self.m, self.rng)
            self.queues = [list(q) for q in queues]
            self.exec_rem = [0] * self.m
            # a processor starts executing its first task immediately
            for i in range(self.m):
                if self.queues[i]:
                    self.exec_rem[i] = self.queues[i].pop(0)
            self.total = cfg.workload.total_work
        else:
            dag = cfg.workload.dag
            realize_initial(cfg.initial, cfg.workload, self.m, self.rng)
            self.dag = dag
            self.indeg = [int(x) for x in dag.in_degrees()]
            self.depth = [-1] * dag.n
            self.depth[dag.source] = 0
            # deque entries are (node, height) with index 0 = top
            self.deques: list[list[tuple[int, int]]] = [[] for _ in range(self.m)]
            self.deques[0].append((dag.source, dag.D))
            self.enabling_trace: list[tuple[int, int]] = [(dag.source, -1)]
            self.executed = 0

    # -- inspection --------------------------------------------------------

    @property
    def done(self) -> bool:
        if self.mode == "unit":
            return self.total == 0
        if self.mode == "weighted":
            return all(r == 0 for r in self.exec_rem) and not any(self.queues)
        return self.executed == self.dag.n

    def total_work(self) -> int:
        """Remaining work in unit slots (remaining nodes in dag mode)."""
        if self.mode == "unit":
            return self.total
        if self.mode == "weighted":
            return sum(self.exec_rem) + sum(sum(q) for q in self.queues)
        return self.dag.n - self.executed

    def idle_processors(self) -> list[int]:
        if self.mode == "unit":
            return [i for i in range(self.m) if self.w[i] == 0]
        if self.mode == "weighted":
            return [i for i in range(self.m) if self.exec_rem[i] == 0]
        return [i for i in range(self.m) if not self.deques[i]]

    def idle_count(self) -> int:
        return len(self.idle_processors())

    def worker(self, i: int) -> WorkerState:
        if self.mode == "unit":
            queue, rem = self.w[i], (1 if self.w[i] > 0 else 0)
        elif self.mode == "weighted":
            queue, rem = tuple(self.queues[i]), self.exec_rem[i]
        else:
            queue, rem = tuple(self.deques[i]), (1 if self.deques[i] else 0)
        return WorkerState(queue=queue, executing_remaining=rem,
                           tasks_executed=self.tasks_done[i],
                           steals_sent_ok=self.sent_ok[i],
                           steals_sent_fail=self.sent_fail[i])

    def potential_loads(self) -> list[float]:
        """Per-processor load measure feeding the mode's potential."""
        if self.mode == "unit":
            return [float(x) for x in self.w]
        if self.mode == "weighted":
            # the potential counts tasks, including the executing one
            return [float((1 if self.exec_rem[i] else 0) + len(self.queues[i]))
                    for i in range(self.m)]
        return [0.0 if L is None else 2.0 ** (L / 2.0)
                for L in (self._dag_log_load(i) for i in range(self.m))]

    def _dag_log_load(self, i: int):
        """Integer L with instrumented load 2**(L/2); None for empty."""
        dq = self.deques[i]
        if not dq:
            return None
        h_top = dq[0][1]
        return 3 * h_top - (2 if len(dq) == 1 else 0)

    def deque_heights(self, i: int) -> list[int]:
        return [h for (_node, h) in self.deques[i]]

    def clone(self) -> "Simulation":
        c = object.__new__(Simulation)
        c.config = self.config
        c.m = self.m
        c.mode = self.mode
        c.rng = self.rng.clone()
        c.t = self.t
        c.steals_ok = self.steals_ok
        c.steals_fail = self.steals_fail
        c.requests = self.requests
        c.sent_ok = list(self.sent_ok)
        c.sent_fail = list(self.sent_fail)
        c.tasks_done = list(self.tasks_done)
        c.event_log = False
        c.events = []
        c.rounding = self.rounding
        c.phi0 = self.phi0
        if self.mode == "unit":
            c.w = list(self.w)
            c.total = self.total
        elif self.mode == "weighted":
            c.queues = [list(q) for q in self.queues]
            c.exec_rem = list(self.exec_rem)
            c.total = self.total
        else:
            c.dag = self.dag
            c.indeg = list(self.indeg)
            c.depth = list(self.depth)
            c.deques = [list(dq) for dq in self.deques]
            c.enabling_trace = list(self.enabling_trace)
            c.executed = self.executed
        return c

    # -- slot advance ------------------------------------------------------

    def step(self, rng: SplitMix64 | None = None, forced: dict[int, int] | None = None
             ) -> StepTelemetry:
        """Advance exactly one slot.

        ``forced`` maps idle processors to victims and suppresses all
        randomness (winner = lowest-id thief, cooperative parts in
        ascending thief order); it exists for exhaustive enumeration,
        where only load multisets matter.
        """
        if self.done:
            raise RuntimeError("step() called on a terminal state")
        rng = rng or self.rng

        idle = self.idle_processors()
        r = len(idle)
        if forced is None:
            requests = {}
            for i in idle:
                d = rng.randbelow(self.m - 1)
                requests[i] = d if d < i else d + 1
        else:
            requests = dict(forced)
            if sorted(requests) != sorted(idle):
                raise ValueError("forced assignment must cover exactly the idle set")

        by_victim: dict[int, list[int]] = {}
        for i in sorted(requests):
            by_victim.setdefault(requests[i], []).append(i)

        if self.mode == "unit":
            succ = self._slot_unit(by_victim, rng, forced is not None)
        elif self.mode == "weighted":
            succ = self._slot_weighted(by_victim, rng, forced is not None)
        else:
            succ = self._slot_dag(by_victim, rng, forced is not None)

        fail = r - succ
        self.steals_ok += succ
        self.steals_fail += fail
        self.requests += r
        self.t += 1

        phi_val = None
        if self.config.record_potential:
            phi_val = phi(self.config.phi_kind(), self.potential_loads(),
                          nu=self.config.potential_nu)
        return StepTelemetry(t=self.t - 1, r_t=r, succ=succ, fail=fail,
                             w_total=self.total_work(), phi=phi_val)

    def _pick_winner(self, thieves: list[int], rng, forced: bool) -> int:
        if forced or len(thieves) == 1:
            return thieves[0]
        return thieves[rng.randbelow(len(thieves))]

    def _mark_served(self, served: list[int], thieves: list[int]) -> None:
        for th in thieves:
            if th in served:
                self.sent_ok[th] += 1
            else:
                self.sent_fail[th] += 1

    def _slot_unit(self, by_victim, rng, forced: bool) -> int:
        snap = list(self.w)
        coop = self.config.protocol.cooperative
        for i in range(self.m):
            if snap[i] > 0:
                self.w[i] -= 1
                self.total -= 1
                self.tasks_done[i] += 1
        succ = 0
        for v in sorted(by_victim):
            thieves = by_victim[v]
            k = len(thieves)
            if snap[v] < 2:
                self._mark_served([], thieves)
                continue
            if coop:
                parts = split_coop(snap[v], k, self.config.protocol.coop_split_base)
                if self.config.protocol.coop_split_base == COOP_POST_EXEC:
                    self.w[v] = parts[0]
                else:
                    self.w[v] = parts[0] - 1
                order = list(thieves)
                if not forced and k >= 2:
                    rng.shuffle(order)
                for part, thief in zip(parts[1:], order):
                    self.w[thief] = part
                succ += k
                self._mark_served(thieves, thieves)
                if self.event_log:
                    self.events.append(("coop_split", v, snap[v], k, tuple(parts)))
            else:
                winner = self._pick_winner(thieves, rng, forced)
                keep, get = split_unit(snap[v], self.rounding)
                self.w[v] = keep
                self.w[winner] = get
                succ += 1
                self._mark_served([winner], thieves)
                if self.event_log:
                    self.events.append(("unit_steal", v, snap[v], keep, get))
        return succ

    def _slot_weighted(self, by_victim, rng, forced: bool) -> int:
        stealable = [len(q) for q in self.queues]
        for i in range(self.m):
            if self.exec_rem[i] > 0:
                self.exec_rem[i] -= 1
                if self.exec_rem[i] == 0:
                    self.tasks_done[i] += 1
        succ = 0
        for v in sorted(by_victim):
            thieves = by_victim[v]
            if stealable[v] < 1:
                self._mark_served([], thieves)
                continue
            winner = self._pick_winner(thieves, rng, forced)
            keep, get = split_weighted(self.queues[v], self.rounding)
            self.queues[v] = keep
            self.queues[winner] = get
            succ += 1
            self._mark_served([winner], thieves)
        # finished processors pick up their next task for the coming slot
        for i in range(self.m):
            if self.exec_rem[i] == 0 and self.queues[i]:
                self.exec_rem[i] = self.queues[i].pop(0)
        return succ

    def _slot_dag(self, by_victim, rng, forced: bool) -> int:
        size_snap = [len(dq) for dq in self.deques]
        log_before = ([self._dag_log_load(i) for i in range(self.m)]
                      if self.event_log else None)
        # execution: pop the bottom entry, enable children.  When two
        # parents of a join finish in the same slot, the highest-indexed
        # processor (scanned last) performs the enabling push.
        for i in range(self.m):
            if size_snap[i] == 0:
                continue
            node, _h = self.deques[i].pop()
            self.executed += 1
            self.tasks_done[i] += 1
            for c in self.dag.children[node]:
                self.indeg[c] -= 1
                if self.indeg[c] == 0:
                    self.depth[c] = self.depth[node] + 1
                    self.deques[i].append((c, self.dag.D - self.depth[c]))
                    self.enabling_trace.append((c, node))
        succ = 0
        steal_log = []
        for v in sorted(by_victim):
            thieves = by_victim[v]
            if size_snap[v] >= 2:
                winner = self._pick_winner(thieves, rng, forced)
                stolen = self.deques[v].pop(0)
                self.deques[winner].append(stolen)
                succ += 1
                self._mark_served([winner], thieves)
                if self.event_log:
                    steal_log.append(("dag_steal", v, winner, log_before[v]))
            else:
                self._mark_served([], thieves)
                if self.event_log and size_snap[v] == 1:
                    steal_log.append(("dag_allfail", v, None, log_before[v]))
        if self.event_log:
            for kind, v, thief, lb in steal_log:
                if kind == "dag_steal":
                    self.events.append((kind, v, lb, self._dag_log_load(v),
                                        self._dag_log_load(thief)))
                else:
                    self.events.append((kind, v, lb, self._dag_log_load(v)))
        return succ

    # -- full run -----------------------------------------------------------

    def run(self) -> RunResult:
        record = self.config.record_steps or self.config.record_potential
        telemetry = [] if record else None
        while not self.done:
            tel = self.step()
            if record:
                telemetry.append(tel)
        return RunResult(cmax=self.t,
                         steals_total=self.requests,
                         steals_ok=self.steals_ok,
                         steals_fail=self.steals_fail,
                         phi0=self.phi0,
                         telemetry=None if telemetry is None else tuple(telemetry))


def run(config: SimConfig, force_reference: bool = False) -> RunResult:
    """Simulate one configuration to completion.

    Dispatches to the compiled kernels when available and no per-slot
    recording is requested; results are bit-identical to the reference
    engine either way (the two paths share the RNG stream contract).
    """
    config.validate()
    recording = config.record_steps or config.record_potential
    if force_reference or recording or not _kernels.AVAILABLE:
        return Simulation(config).run()
    return _kernels.run_fast(config)


def accounting_identity_holds(config: SimConfig, result: RunResult) -> bool:
    """m * cmax == W + R, exactly, in every mode."""
    return config.m * result.cmax == config.workload.total_work + result.steals_total

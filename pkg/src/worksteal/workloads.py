"""Workload families, initial task placement, and DAG machinery.

Three workload kinds drive the simulator: a count of unit tasks, a list
of integer processing times, and a precedence DAG with a single source
and out-degree at most two.  This module also provides the random
layer-by-layer DAG generator, critical-path computation, the enabling
tree instrumentation used by the deque-mode analysis, and a plain-text
edge-list format for DAG exchange.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import SplitMix64


class WorkloadError(ValueError):
    """Invalid workload description."""


class MalformedDagError(WorkloadError):
    """DAG violates the model constraints (cycle, multi-source, ...)."""


class GenerationError(WorkloadError):
    """Layered generator parameters are infeasible."""


class TraceError(ValueError):
    """An execution trace is internally inconsistent."""


# ---------------------------------------------------------------------------
# workload specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitTasks:
    """W identical tasks of one slot each."""

    W: int

    def validate(self) -> None:
        if self.W < 1:
            raise WorkloadError("unit workload needs W >= 1")

    @property
    def total_work(self) -> int:
        return self.W

    @property
    def n_tasks(self) -> int:
        return self.W


@dataclass(frozen=True)
class WeightedTasks:
    """Tasks with integer processing times (slots)."""

    p: tuple[int, ...]

    def __init__(self, p):
        object.__setattr__(self, "p", tuple(int(x) for x in p))

    def validate(self) -> None:
        if len(self.p) < 1:
            raise WorkloadError("weighted workload needs at least one task")
        if any(x < 1 for x in self.p):
            raise WorkloadError("processing times must be positive integers")

    @property
    def total_work(self) -> int:
        return sum(self.p)

    @property
    def n_tasks(self) -> int:
        return len(self.p)

    @property
    def p_max(self) -> int:
        return max(self.p)


@dataclass(frozen=True)
class DagSpec:
    """Single-source precedence DAG with out-degree <= 2.

    ``children[u]`` lists u's successors; ``parents`` is derived.
    ``D`` is the critical path in node count, computed by topological
    DP at construction.  ``layer_of`` is populated by the layered
    generator.
    """

    children: tuple[tuple[int, ...], ...]
    source: int = 0
    D: int = field(default=0)
    layer_of: tuple[int, ...] | None = None

    def __init__(self, children, source=0, layer_of=None):
        object.__setattr__(self, "children",
                           tuple(tuple(int(c) for c in cs) for cs in children))
        object.__setattr__(self, "source", int(source))
        object.__setattr__(self, "layer_of",
                           None if layer_of is None else tuple(layer_of))
        self._check()
        object.__setattr__(self, "D", critical_path(self))

    @property
    def n(self) -> int:
        return len(self.children)

    @property
    def parents(self) -> tuple[tuple[int, ...], ...]:
        ps: list[list[int]] = [[] for _ in range(self.n)]
        for u, cs in enumerate(self.children):
            for c in cs:
                ps[c].append(u)
        return tuple(tuple(x) for x in ps)

    def in_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for cs in self.children:
            for c in cs:
                deg[c] += 1
        return deg

    @property
    def total_work(self) -> int:
        return self.n

    @property
    def n_tasks(self) -> int:
        return self.n

    def validate(self) -> None:  # construction already validated
        pass

    def _check(self) -> None:
        n = self.n
        if n < 1:
            raise MalformedDagError("empty DAG")
        for u, cs in enumerate(self.children):
            if len(cs) > 2:
                raise MalformedDagError(f"node {u} has out-degree {len(cs)} > 2")
            for c in cs:
                if not (0 <= c < n):
                    raise MalformedDagError(f"edge {u}->{c} out of range")
        deg = self.in_degrees()
        sources = [u for u in range(n) if deg[u] == 0]
        if sources != [self.source]:
            raise MalformedDagError(
                f"expected single source {self.source}, found in-degree-0 nodes {sources}")
        # reachability from the source
        seen = np.zeros(n, dtype=bool)
        stack = [self.source]
        seen[self.source] = True
        while stack:
            u = stack.pop()
            for c in self.children[u]:
                if not seen[c]:
                    seen[c] = True
                    stack.append(c)
        if not seen.all():
            raise MalformedDagError("not every node is reachable from the source")


@dataclass(frozen=True)
class DagTasks:
    """DAG workload wrapper."""

    dag: DagSpec

    def validate(self) -> None:
        self.dag.validate()

    @property
    def total_work(self) -> int:
        return self.dag.n

    @property
    def n_tasks(self) -> int:
        return self.dag.n


Workload = UnitTasks | WeightedTasks | DagTasks


# ---------------------------------------------------------------------------
# initial distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AllOnZero:
    """Every task starts on processor 0 (the worst-case imbalance)."""


@dataclass(frozen=True)
class BallsAndBins:
    """Each task is assigned to a processor uniformly at random."""


@dataclass(frozen=True)
class ExplicitInit:
    """Explicit placement.

    Unit mode: ``assignment`` holds m per-processor task counts.
    Weighted mode: ``assignment`` holds one processor id per task.
    """

    assignment: tuple[int, ...]

    def __init__(self, assignment):
        object.__setattr__(self, "assignment", tuple(int(x) for x in assignment))


InitialDistribution = AllOnZero | BallsAndBins | ExplicitInit


def realize_initial(dist: InitialDistribution, workload: Workload, m: int,
                    rng: SplitMix64 | None = None):
    """Materialize an initial placement.

    Returns per-processor unit counts (unit mode) or per-processor task
    lists in task-index order (weighted mode).  BallsAndBins consumes
    exactly one draw per task, in task order.  DAG workloads always
    start with the source on processor 0 and ignore ``dist``.
    """
    if isinstance(workload, DagTasks):
        if not isinstance(dist, AllOnZero):
            raise WorkloadError("DAG runs start with the source on processor 0; "
                                "use AllOnZero")
        return None
    if isinstance(workload, UnitTasks):
        W = workload.W
        if isinstance(dist, AllOnZero):
            counts = [0] * m
            counts[0] = W
            return counts
        if isinstance(dist, BallsAndBins):
            if rng is None:
                raise WorkloadError("BallsAndBins needs an rng")
            counts = np.bincount(rng.randbelow_array(W, m), minlength=m)
            return [int(c) for c in counts]
        if isinstance(dist, ExplicitInit):
            if len(dist.assignment) != m:
                raise WorkloadError("explicit unit placement must list m counts")
            if any(c < 0 for c in dist.assignment):
                raise WorkloadError("negative task count")
            if sum(dist.assignment) != W:
                raise WorkloadError("explicit placement must cover all W tasks")
            return list(dist.assignment)
    if isinstance(workload, WeightedTasks):
        p = workload.p
        if isinstance(dist, AllOnZero):
            owners = [0] * len(p)
        elif isinstance(dist, BallsAndBins):
            if rng is None:
                raise WorkloadError("BallsAndBins needs an rng")
            owners = [int(x) for x in rng.randbelow_array(len(p), m)]
        elif isinstance(dist, ExplicitInit):
            if len(dist.assignment) != len(p):
                raise WorkloadError("explicit weighted placement must assign every task")
            if any(not (0 <= o < m) for o in dist.assignment):
                raise WorkloadError("task assigned to nonexistent processor")
            owners = list(dist.assignment)
        else:
            raise WorkloadError(f"unknown initial distribution {dist!r}")
        queues: list[list[int]] = [[] for _ in range(m)]
        for j, owner in enumerate(owners):
            queues[owner].append(p[j])
        return queues
    raise WorkloadError(f"unknown workload {workload!r}")


def initial_phi0(dist: InitialDistribution, workload: Workload, m: int,
                 rng: SplitMix64 | None = None, kind: str | None = None,
                 nu: float = 2.0) -> float:
    """Potential of a realized initial placement.

    Defaults to the mode's canonical potential: load variance for unit
    tasks, sum of (count^nu - count) for weighted tasks.
    """
    from .potential import phi  # local import: potential has no deps on us

    placement = realize_initial(dist, workload, m, rng)
    if isinstance(workload, UnitTasks):
        loads = placement
        kind = kind or "variance"
    elif isinstance(workload, WeightedTasks):
        loads = [len(q) for q in placement]
        kind = kind or "power_minus"
    else:
        raise WorkloadError("initial_phi0 is defined for unit and weighted workloads")
    return phi(kind, loads, nu=nu)


# ---------------------------------------------------------------------------
# critical path
# ---------------------------------------------------------------------------

def critical_path(dag: DagSpec) -> int:
    """Longest source-to-sink path, counted in nodes.

    Topological DP (Kahn order); raises MalformedDagError on a cycle.
    """
    n = dag.n
    deg = dag.in_degrees()
    dist = np.zeros(n, dtype=np.int64)
    order = [u for u in range(n) if deg[u] == 0]
    for u in order:
        dist[u] = 1
    head = 0
    seen = len(order)
    while head < len(order):
        u = order[head]
        head += 1
        for c in dag.children[u]:
            if dist[u] + 1 > dist[c]:
                dist[c] = dist[u] + 1
            deg[c] -= 1
            if deg[c] == 0:
                order.append(c)
                seen += 1
    if seen != n:
        raise MalformedDagError("cycle detected")
    return int(dist.max())


# ---------------------------------------------------------------------------
# layered generator
# ---------------------------------------------------------------------------

def plan_layer_sizes(n_nodes: int, layers: int) -> list[int]:
    """Choose layer sizes totalling exactly ``n_nodes``.

    Layer 0 is the lone source and each later layer at most doubles the
    previous one (otherwise out-degree-2 parents could not cover it).
    Sizes ramp up 1, 2, 4, ... and then plateau at the smallest width
    that reaches the target, with the excess trimmed off the last
    layers; feasibility requires layers <= n_nodes <= 2**layers - 1.
    """
    if layers < 1 or n_nodes < layers:
        raise GenerationError("need n_nodes >= layers >= 1")
    if layers < 63 and n_nodes > 2 ** layers - 1:
        raise GenerationError(
            f"{n_nodes} nodes cannot fit in {layers} layers under the doubling cap")

    def total(width: int) -> int:
        return sum(min(1 << min(l, 62), width) for l in range(layers))

    lo, hi = 1, max(1, n_nodes)
    while lo < hi:                       # smallest width with total(width) >= N
        mid = (lo + hi) // 2
        if total(mid) >= n_nodes:
            hi = mid
        else:
            lo = mid + 1
    width = lo
    sizes = [min(1 << min(l, 62), width) for l in range(layers)]
    excess = sum(sizes) - n_nodes
    for l in range(layers - 1, 0, -1):   # trim one node per tail layer
        if excess == 0:
            break
        if sizes[l] == width and sizes[l] > 1:
            sizes[l] -= 1
            excess -= 1
    if excess != 0:
        raise GenerationError(
            f"cannot reach {n_nodes} nodes in {layers} layers under the doubling cap")
    return sizes


def generate_layered_dag(layers: int, width: int, long_path: bool = False,
                         rng: SplitMix64 | None = None,
                         layer_sizes: list[int] | None = None,
                         join_prob: float = 0.3) -> DagSpec:
    """Random layer-by-layer DAG.

    Layer 0 holds the single source; layer l then holds
    min(2**l, width) nodes unless explicit ``layer_sizes`` are given.
    Every non-source node draws its parent uniformly among
    previous-layer nodes with spare out-degree, extra join edges are
    added with probability ``join_prob`` where capacity allows, and a
    repair pass guarantees every non-final-layer node has a child.  The
    result always has depth D == layers.

    ``long_path`` documents the caller's intent (layers ~ W/4m instead
    of ~ log2 W); the construction itself only depends on the sizes.

    Raises GenerationError if explicit sizes more than double between
    layers (out-degree-2 coverage would be impossible) or are not
    positive, starting from a single source.
    """
    if layers < 1 or width < 1:
        raise GenerationError("need layers >= 1 and width >= 1")
    rng = rng or SplitMix64(0)
    if layer_sizes is None:
        sizes = [1] + [min(2 ** l, width) for l in range(1, layers)]
    else:
        sizes = [int(s) for s in layer_sizes]
        if len(sizes) != layers:
            raise GenerationError("layer_sizes length must equal layers")
        if sizes[0] != 1:
            raise GenerationError("layer 0 must hold exactly the source")
        for a, b in zip(sizes, sizes[1:]):
            if b < 1:
                raise GenerationError("layer sizes must be positive")
            if b > 2 * a:
                raise GenerationError(
                    f"layer of {b} nodes after one of {a}: width more than doubles, "
                    "out-degree <= 2 cannot cover it")

    ids: list[np.ndarray] = []
    start = 0
    for s in sizes:
        ids.append(np.arange(start, start + s))
        start += s
    n = start
    children: list[list[int]] = [[] for _ in range(n)]
    layer_of = np.zeros(n, dtype=np.int64)
    for l, arr in enumerate(ids):
        layer_of[arr] = l

    for l in range(1, layers):
        prev = [int(u) for u in ids[l - 1]]
        curr = [int(v) for v in ids[l]]
        capacity = {u: 2 for u in prev}
        # one slot-bearing parent per new node, uniform over spare capacity
        slots = [u for u in prev for _ in range(2)]
        rng.shuffle(slots)
        for v, u in zip(curr, slots):
            children[u].append(v)
            capacity[u] -= 1
        # repair: previous-layer nodes must have at least one child
        for u in prev:
            if not children[u]:
                v = curr[rng.randbelow(len(curr))]
                children[u].append(v)
                capacity[u] -= 1
        # optional joins
        for v in curr:
            if rng.random() < join_prob:
                cands = [u for u in prev if capacity[u] > 0 and v not in children[u]]
                if cands:
                    u = cands[rng.randbelow(len(cands))]
                    children[u].append(v)
                    capacity[u] -= 1

    return DagSpec(children, source=0, layer_of=layer_of)


def dag_for_work(n_nodes: int, layers: int, rng: SplitMix64,
                 long_path: bool = False, join_prob: float = 0.3) -> DagSpec:
    """Layered DAG with exactly ``n_nodes`` nodes and depth ``layers``."""
    sizes = plan_layer_sizes(n_nodes, layers)
    return generate_layered_dag(layers, max(sizes), long_path=long_path, rng=rng,
                                layer_sizes=sizes, join_prob=join_prob)


# ---------------------------------------------------------------------------
# enabling-tree instrumentation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnablingInfo:
    """Enabling tree of one execution.

    ``enabling_parent[v]`` is the parent whose completion made v ready
    (-1 for the source); ``enabling_depth`` is v's depth in that tree;
    ``h[v] = D - enabling_depth[v]`` is the instrumented height used by
    the deque-mode potential, so h(source) == D and h drops by exactly
    one along every enabling edge.
    """

    enabling_parent: tuple[int, ...]
    enabling_depth: tuple[int, ...]
    h: tuple[int, ...]


def enabling_instrument(dag: DagSpec, trace) -> EnablingInfo:
    """Build the enabling tree from an execution trace.

    ``trace`` is an iterable of (node, enabling_parent) pairs in
    enabling order, with parent -1 for the source.  Raises TraceError
    if a node is enabled twice, enabled by a non-parent, or enabled
    before its enabling parent.
    """
    n = dag.n
    parent = [-2] * n
    depth = [-1] * n
    parents = dag.parents
    for node, ep in trace:
        if parent[node] != -2:
            raise TraceError(f"node {node} enabled twice")
        if ep == -1:
            if node != dag.source:
                raise TraceError(f"non-source node {node} enabled with no parent")
            parent[node] = -1
            depth[node] = 0
            continue
        if ep not in parents[node]:
            raise TraceError(f"{ep} is not a parent of {node}")
        if depth[ep] < 0:
            raise TraceError(f"node {node} enabled before its enabling parent {ep}")
        parent[node] = ep
        depth[node] = depth[ep] + 1
    if any(d < 0 for d in depth):
        missing = [v for v in range(n) if depth[v] < 0]
        raise TraceError(f"trace does not enable nodes {missing[:5]}")
    h = tuple(dag.D - d for d in depth)
    return EnablingInfo(tuple(parent), tuple(depth), h)


# ---------------------------------------------------------------------------
# edge-list I/O:  first line "n D", then one "u v" pair per edge
# ---------------------------------------------------------------------------

def save_dag(dag: DagSpec, path) -> None:
    with open(path, "w") as f:
        f.write(f"{dag.n} {dag.D}\n")
        for u, cs in enumerate(dag.children):
            for c in cs:
                f.write(f"{u} {c}\n")


def load_dag(path) -> DagSpec:
    with open(path) as f:
        first = f.readline().split()
        if len(first) != 2:
            raise MalformedDagError("first line must be 'n D'")
        n, d_claimed = int(first[0]), int(first[1])
        children: list[list[int]] = [[] for _ in range(n)]
        for line in f:
            line = line.strip()
            if not line:
                continue
            u, v = (int(x) for x in line.split())
            children[u].append(v)
    dag = DagSpec(children)
    if dag.D != d_claimed:
        raise MalformedDagError(
            f"file claims critical path {d_claimed}, recomputed {dag.D}")
    return dag

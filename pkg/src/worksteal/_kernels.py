"""Compiled fast paths for bulk simulation.

One numba kernel per mode, used by :func:`worksteal.engine.run` when no
per-slot recording is requested.  Each kernel follows the reference
engine's slot semantics and randomness draw order exactly, consuming
the same counter-based splitmix64 stream, so a (config, seed) pair
produces bit-identical results on either path; the equivalence is
property-tested.  Unit and weighted kernels fast-forward through
stretches where no processor is idle (no draws are consumed there).

If numba is unavailable the engine transparently falls back to the
reference implementation.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    AVAILABLE = False

    def njit(*a, **k):
        def wrap(f):
            return f
        return wrap


U64 = np.uint64
_GAMMA = U64(0x9E3779B97F4A7C15)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True, inline="always")
def _mix(z):
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True, inline="always")
def _randbelow(seed, counter, n):
    counter += U64(1)
    f = (_mix(seed + counter * _GAMMA) >> U64(11)) * _INV53
    return np.int64(f * n), counter


@njit(cache=True, nogil=True)
def _unit_kernel(w_init, coop, victim_ceil, coop_pre_exec, seed, counter):
    m = w_init.shape[0]
    w = w_init.copy()
    total = np.int64(0)
    for i in range(m):
        total += w[i]
    cmax = np.int64(0)
    r_tot = np.int64(0)
    ok = np.int64(0)
    fail = np.int64(0)
    idle = np.empty(m, np.int64)
    snap = np.empty(m, np.int64)
    cnt = np.empty(m, np.int64)
    off = np.empty(m + 1, np.int64)
    pos = np.empty(m, np.int64)
    grp = np.empty(m, np.int64)
    vic = np.empty(m, np.int64)
    parts = np.empty(m + 1, np.int64)
    while total > 0:
        r = np.int64(0)
        mn = np.int64(1) << 62
        for i in range(m):
            if w[i] == 0:
                idle[r] = i
                r += 1
            elif w[i] < mn:
                mn = w[i]
        if r == 0:
            # nobody idle: jump to the slot where the lightest queue drains
            cmax += mn
            total -= mn * m
            for i in range(m):
                w[i] -= mn
            continue
        for j in range(m):
            cnt[j] = 0
        for j in range(r):
            i = idle[j]
            d, counter = _randbelow(seed, counter, m - 1)
            v = d if d < i else d + 1
            vic[j] = v
            cnt[v] += 1
        for i in range(m):
            snap[i] = w[i]
            if w[i] > 0:
                w[i] -= 1
                total -= 1
        off[0] = 0
        for j in range(m):
            off[j + 1] = off[j] + cnt[j]
            pos[j] = off[j]
        for j in range(r):
            v = vic[j]
            grp[pos[v]] = idle[j]
            pos[v] += 1
        for v in range(m):
            k = cnt[v]
            if k == 0:
                continue
            if snap[v] < 2:
                fail += k
                continue
            if coop:
                base = snap[v] if coop_pre_exec else snap[v] - 1
                q = base // (k + 1)
                b = base % (k + 1)
                for x in range(k + 1):
                    parts[x] = q + 1 if x < b else q
                w[v] = parts[0] - 1 if coop_pre_exec else parts[0]
                if k >= 2:
                    for x in range(k - 1, 0, -1):
                        d, counter = _randbelow(seed, counter, x + 1)
                        tmp = grp[off[v] + x]
                        grp[off[v] + x] = grp[off[v] + d]
                        grp[off[v] + d] = tmp
                for x in range(k):
                    w[grp[off[v] + x]] = parts[x + 1]
                ok += k
            else:
                if k >= 2:
                    d, counter = _randbelow(seed, counter, k)
                else:
                    d = np.int64(0)
                winner = grp[off[v] + d]
                rem = snap[v] - 1
                keep = (rem + 1) // 2 if victim_ceil else rem // 2
                w[v] = keep
                w[winner] = rem - keep
                ok += 1
                fail += k - 1
        r_tot += r
        cmax += 1
    return cmax, r_tot, ok, fail, counter


@njit(cache=True, nogil=True)
def _weighted_kernel(tasks, qlo_init, qhi_init, thief_ceil, seed, counter):
    m = qlo_init.shape[0]
    n = tasks.shape[0]
    qlo = qlo_init.copy()
    qhi = qhi_init.copy()
    pre = np.empty(n + 1, np.int64)
    pre[0] = 0
    for j in range(n):
        pre[j + 1] = pre[j] + tasks[j]
    cur = np.zeros(m, np.int64)
    total = np.int64(pre[n])
    for i in range(m):            # initial pick-up of the first task
        if qlo[i] < qhi[i]:
            cur[i] = tasks[qlo[i]]
            qlo[i] += 1
    cmax = np.int64(0)
    r_tot = np.int64(0)
    ok = np.int64(0)
    fail = np.int64(0)
    idle = np.empty(m, np.int64)
    s_snap = np.empty(m, np.int64)
    cnt = np.empty(m, np.int64)
    off = np.empty(m + 1, np.int64)
    pos = np.empty(m, np.int64)
    grp = np.empty(m, np.int64)
    vic = np.empty(m, np.int64)
    while total > 0:
        r = np.int64(0)
        mn = np.int64(1) << 62
        for i in range(m):
            if cur[i] == 0:
                idle[r] = i
                r += 1
            else:
                t_i = cur[i] + (pre[qhi[i]] - pre[qlo[i]])
                if t_i < mn:
                    mn = t_i
        if r == 0:
            # advance every processor mn slots through its own queue
            cmax += mn
            total -= mn * m
            for i in range(m):
                a = mn
                use = a if a < cur[i] else cur[i]
                cur[i] -= use
                a -= use
                while a > 0:
                    v = tasks[qlo[i]]
                    qlo[i] += 1
                    if a >= v:
                        a -= v
                    else:
                        cur[i] = v - a
                        a = 0
                if cur[i] == 0 and qlo[i] < qhi[i]:
                    cur[i] = tasks[qlo[i]]
                    qlo[i] += 1
            continue
        for j in range(m):
            cnt[j] = 0
        for j in range(r):
            i = idle[j]
            d, counter = _randbelow(seed, counter, m - 1)
            v = d if d < i else d + 1
            vic[j] = v
            cnt[v] += 1
        for i in range(m):
            s_snap[i] = qhi[i] - qlo[i]
            if cur[i] > 0:
                cur[i] -= 1
                total -= 1
        off[0] = 0
        for j in range(m):
            off[j + 1] = off[j] + cnt[j]
            pos[j] = off[j]
        for j in range(r):
            v = vic[j]
            grp[pos[v]] = idle[j]
            pos[v] += 1
        for v in range(m):
            k = cnt[v]
            if k == 0:
                continue
            if s_snap[v] < 1:
                fail += k
                continue
            if k >= 2:
                d, counter = _randbelow(seed, counter, k)
            else:
                d = np.int64(0)
            winner = grp[off[v] + d]
            s = s_snap[v]
            cut = qlo[v] + ((s + 1) // 2 if not thief_ceil else s // 2)
            qlo[winner] = cut
            qhi[winner] = qhi[v]
            qhi[v] = cut
            ok += 1
            fail += k - 1
        for i in range(m):
            if cur[i] == 0 and qlo[i] < qhi[i]:
                cur[i] = tasks[qlo[i]]
                qlo[i] += 1
        r_tot += r
        cmax += 1
    return cmax, r_tot, ok, fail, counter


@njit(cache=True, nogil=True)
def _dag_kernel(indptr, cidx, indeg_init, n, m, cap, seed, counter):
    buf = np.empty((m, cap), np.int32)
    top = np.zeros(m, np.int64)
    bot = np.zeros(m, np.int64)
    indeg = indeg_init.copy()
    buf[0, 0] = 0
    bot[0] = 1
    executed = np.int64(0)
    cmax = np.int64(0)
    r_tot = np.int64(0)
    ok = np.int64(0)
    fail = np.int64(0)
    idle = np.empty(m, np.int64)
    size_snap = np.empty(m, np.int64)
    cnt = np.empty(m, np.int64)
    off = np.empty(m + 1, np.int64)
    pos = np.empty(m, np.int64)
    grp = np.empty(m, np.int64)
    vic = np.empty(m, np.int64)
    while executed < n:
        r = np.int64(0)
        for i in range(m):
            size_snap[i] = bot[i] - top[i]
            if size_snap[i] == 0:
                idle[r] = i
                r += 1
        if r > 0:
            for j in range(m):
                cnt[j] = 0
            for j in range(r):
                i = idle[j]
                d, counter = _randbelow(seed, counter, m - 1)
                v = d if d < i else d + 1
                vic[j] = v
                cnt[v] += 1
        for i in range(m):
            if size_snap[i] == 0:
                continue
            node = buf[i, bot[i] - 1]
            bot[i] -= 1
            executed += 1
            for e in range(indptr[node], indptr[node + 1]):
                c = cidx[e]
                indeg[c] -= 1
                if indeg[c] == 0:
                    if bot[i] == cap:
                        sz = bot[i] - top[i]
                        if sz == cap:
                            return np.int64(-1), r_tot, ok, fail, counter
                        for x in range(sz):
                            buf[i, x] = buf[i, top[i] + x]
                        top[i] = 0
                        bot[i] = sz
                    buf[i, bot[i]] = c
                    bot[i] += 1
        if r > 0:
            off[0] = 0
            for j in range(m):
                off[j + 1] = off[j] + cnt[j]
                pos[j] = off[j]
            for j in range(r):
                v = vic[j]
                grp[pos[v]] = idle[j]
                pos[v] += 1
            for v in range(m):
                k = cnt[v]
                if k == 0:
                    continue
                if size_snap[v] < 2:
                    fail += k
                    continue
                if k >= 2:
                    d, counter = _randbelow(seed, counter, k)
                else:
                    d = np.int64(0)
                winner = grp[off[v] + d]
                buf[winner, 0] = buf[v, top[v]]
                top[v] += 1
                top[winner] = 0
                bot[winner] = 1
                ok += 1
                fail += k - 1
            r_tot += r
        cmax += 1
    return cmax, r_tot, ok, fail, counter


def _dag_csr(dag):
    """CSR arrays of a DagSpec, memoized on the (frozen) instance."""
    cached = getattr(dag, "_csr_cache", None)
    if cached is not None:
        return cached
    n = dag.n
    indptr = np.zeros(n + 1, dtype=np.int32)
    for u, cs in enumerate(dag.children):
        indptr[u + 1] = indptr[u] + len(cs)
    cidx = np.empty(indptr[-1], dtype=np.int32)
    k = 0
    for cs in dag.children:
        for c in cs:
            cidx[k] = c
            k += 1
    indeg = dag.in_degrees().astype(np.int32)
    object.__setattr__(dag, "_csr_cache", (indptr, cidx, indeg))
    return indptr, cidx, indeg


def run_fast(config):
    """Kernel-backed equivalent of Simulation(config).run() without telemetry."""
    from .engine import RunResult  # deferred: engine imports this module
    from .potential import phi
    from .protocols import COOP_PRE_EXEC, VICTIM_CEIL
    from .rng import SplitMix64
    from .workloads import realize_initial

    rng = SplitMix64(config.seed)
    kind = config.phi_kind()
    mode = config.mode
    victim_ceil = config.protocol.rounding_for(mode) == VICTIM_CEIL
    if mode == "unit":
        counts = realize_initial(config.initial, config.workload, config.m, rng)
        phi0 = phi(kind, counts, nu=config.potential_nu)
        w0 = np.array(counts, dtype=np.int64)
        cmax, r, ok, fl, counter = _unit_kernel(
            w0, config.protocol.cooperative, victim_ceil,
            config.protocol.coop_split_base == COOP_PRE_EXEC,
            U64(config.seed), U64(rng.counter))
    elif mode == "weighted":
        queues = realize_initial(config.initial, config.workload, config.m, rng)
        phi0 = phi(kind, [len(q) for q in queues], nu=config.potential_nu)
        lens = [len(q) for q in queues]
        tasks = np.array([p for q in queues for p in q], dtype=np.int64)
        qhi = np.cumsum(lens).astype(np.int64)
        qlo = qhi - np.array(lens, dtype=np.int64)
        cmax, r, ok, fl, counter = _weighted_kernel(
            tasks, qlo, qhi, not victim_ceil, U64(config.seed), U64(rng.counter))
    else:
        dag = config.workload.dag
        realize_initial(config.initial, config.workload, config.m, rng)
        loads = [0.0] * config.m
        loads[0] = 2.0 ** ((3 * dag.D - 2) / 2.0)
        phi0 = phi(kind, loads, nu=config.potential_nu)
        indptr, cidx, indeg = _dag_csr(dag)
        cap = min(dag.n + 1, 1024)
        while True:
            cmax, r, ok, fl, counter = _dag_kernel(
                indptr, cidx, indeg, dag.n, config.m, cap,
                U64(config.seed), U64(rng.counter))
            if cmax >= 0:
                break
            cap = min(dag.n + 1, cap * 2)
    return RunResult(cmax=int(cmax), steals_total=int(r), steals_ok=int(ok),
                     steals_fail=int(fl), phi0=phi0)

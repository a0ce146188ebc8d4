"""Steal-request arbitration and work-splitting rules.

These are the pure protocol primitives shared by every scheduling
variant: contention arbitration (one winner per victim, or everyone
served in cooperative mode) and the split applied to a robbed queue
(unit-count halving, near-equal cooperative pieces, back-half of a
weighted task queue, or the single top entry of a deque).

All functions are side-effect free except where documented and consume
randomness only through an explicit :class:`~worksteal.rng.SplitMix64`.
"""

from __future__ import annotations

from dataclasses import dataclass

VICTIM_CEIL = "victim_ceil"
THIEF_CEIL = "thief_ceil"

# Cooperative split base: divide the post-execution remainder (w-1) or
# the full start-of-slot load (w).  The analysis is agnostic; the
# simulator defaults to the remainder for consistency with the base
# protocol, where the executed task is removed before the split.
COOP_POST_EXEC = "post_exec"
COOP_PRE_EXEC = "pre_exec"


class ProtocolError(ValueError):
    """A steal request violates the protocol (e.g. self-targeting)."""


@dataclass(frozen=True)
class ProtocolOptions:
    """Knobs of the stealing protocol.

    cooperative      serve all simultaneous requests on a victim
                     (unit-task mode only) instead of one random winner.
    split_rounding   which side of a halving receives the ceiling;
                     None picks the mode default (victim in unit mode,
                     thief in weighted mode).
    coop_split_base  whether a cooperative split divides the victim's
                     post-execution remainder or its full load.
    """

    cooperative: bool = False
    split_rounding: str | None = None
    coop_split_base: str = COOP_POST_EXEC

    def validate(self, mode: str) -> None:
        if self.split_rounding not in (None, VICTIM_CEIL, THIEF_CEIL):
            raise ProtocolError(f"unknown split_rounding {self.split_rounding!r}")
        if self.coop_split_base not in (COOP_POST_EXEC, COOP_PRE_EXEC):
            raise ProtocolError(f"unknown coop_split_base {self.coop_split_base!r}")
        if self.cooperative and mode != "unit":
            raise ProtocolError("cooperative stealing is only defined for unit mode")

    def rounding_for(self, mode: str) -> str:
        if self.split_rounding is not None:
            return self.split_rounding
        return VICTIM_CEIL if mode == "unit" else THIEF_CEIL


def arbitrate(requests: dict[int, int], rng, cooperative: bool = False) -> dict[int, list[int]]:
    """Resolve contention among steal requests.

    ``requests`` maps each thief to its chosen victim.  Returns a map
    victim -> list of served thieves: a single uniformly chosen winner
    per victim in the standard protocol, every requester (ascending id)
    in the cooperative one.  Whether the victim can actually deliver is
    the caller's business; arbitration only models queue contention.

    Draw order contract: victims are processed in ascending id and one
    winner index is drawn per contested victim (no draws in
    cooperative mode).
    """
    by_victim: dict[int, list[int]] = {}
    for thief in sorted(requests):
        victim = requests[thief]
        if victim == thief:
            raise ProtocolError(f"processor {thief} targeted itself")
        by_victim.setdefault(victim, []).append(thief)
    if cooperative:
        return {v: list(ts) for v, ts in sorted(by_victim.items())}
    out = {}
    for v in sorted(by_victim):
        ts = by_victim[v]
        out[v] = [ts[rng.randbelow(len(ts))]] if len(ts) > 1 else [ts[0]]
    return out


def split_unit(w_victim: int, rounding: str = VICTIM_CEIL) -> tuple[int, int]:
    """Split a unit-task queue after one task was executed.

    The victim held ``w_victim`` tasks at the start of the slot, one of
    which it executes; the remainder w-1 is halved.  Returns
    (victim_keep, thief_get) with keep + get == w_victim - 1.  The
    ``rounding`` convention decides who receives the odd task.  At
    w_victim == 2 the thief may receive zero tasks under victim_ceil;
    the steal still counts as successful.
    """
    if w_victim < 2:
        raise ValueError("split_unit requires a victim with at least 2 tasks")
    rem = w_victim - 1
    if rounding == VICTIM_CEIL:
        keep = (rem + 1) // 2
    elif rounding == THIEF_CEIL:
        keep = rem // 2
    else:
        raise ProtocolError(f"unknown rounding {rounding!r}")
    return keep, rem - keep


def split_coop(w_victim: int, k: int, base: str = COOP_POST_EXEC) -> list[int]:
    """Split a victim's tasks among itself and k cooperative thieves.

    With amount a = w-1 (post_exec) or w (pre_exec) written as
    a = (k+1)*q + b, returns k+1 parts: b parts of q+1 followed by
    k+1-b parts of q (descending order, pairwise within 1).  The caller
    gives the first (largest) part to the victim and distributes the
    rest to thieves in randomized order.  Under pre_exec the victim's
    executed task is later deducted from its own part.
    """
    if w_victim < 2:
        raise ValueError("split_coop requires a victim with at least 2 tasks")
    if k < 1:
        raise ValueError("split_coop requires at least one thief")
    amount = w_victim - 1 if base == COOP_POST_EXEC else w_victim
    q, b = divmod(amount, k + 1)
    return [q + 1] * b + [q] * (k + 1 - b)


def split_weighted(queue: list, rounding: str = THIEF_CEIL) -> tuple[list, list]:
    """Split the stealable (queued, non-executing) tasks of a victim.

    Of s queued tasks the thief receives the back half in queue order:
    ceil(s/2) tasks under thief_ceil (the default), floor(s/2) under
    victim_ceil.  Task counts split evenly; the work they carry need
    not, since processing times are unknown to the scheduler.
    Returns (victim_keep, thief_get) preserving queue order.
    """
    s = len(queue)
    if s < 1:
        raise ValueError("split_weighted requires at least one stealable task")
    if rounding == THIEF_CEIL:
        cut = s // 2
    elif rounding == VICTIM_CEIL:
        cut = (s + 1) // 2
    else:
        raise ProtocolError(f"unknown rounding {rounding!r}")
    return list(queue[:cut]), list(queue[cut:])


def can_steal_dag(deque_size: int, bottom_executing: bool = True) -> bool:
    """Whether a deque has a poppable top.

    The top entry can be stolen unless the deque is empty or its only
    entry is the task currently in execution.
    """
    if deque_size >= 2:
        return True
    return deque_size == 1 and not bottom_executing


def steal_dag(deque: list, bottom_executing: bool = True):
    """Pop and return the top-most deque entry, or None if the steal fails.

    The deque is ordered top to bottom (index 0 = top).  Fails on an
    empty deque or when the sole entry is the one in execution.
    """
    if not can_steal_dag(len(deque), bottom_executing):
        return None
    return deque.pop(0)

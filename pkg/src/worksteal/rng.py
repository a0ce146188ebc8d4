"""Deterministic counter-based pseudo-random streams.

The whole toolkit draws randomness from one generator family: the
splitmix64 output function applied to an incrementing 64-bit counter,

    value_k = mix64(seed + k * GAMMA),   k = 1, 2, ...

where ``mix64`` is the standard splitmix64 finalizer (Steele, Lea &
Flood) and GAMMA is the golden-ratio increment.  Because each output
depends only on (seed, k), the same stream can be produced scalar-wise
in Python, vectorized with numpy, or inside a numba kernel, and a
stream position can be handed across those boundaries as a plain
counter.  Replication streams are derived from a master seed by
folding integer keys through the same mixer (`derive_seed`), so the
i-th replication of the j-th sweep point is reproducible in isolation.

Within-process reproducibility is guaranteed; bit-equality with other
implementations of the toolkit is not a goal.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

# 1 / 2**53, used to map the top 53 bits of a draw to [0, 1)
_INV53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *keys: int) -> int:
    """Derive a substream seed from a master seed and integer keys.

    Each key is folded in with one avalanche mix, so (master, j, i)
    and (master, i, j) give unrelated streams.
    """
    s = master & MASK64
    for k in keys:
        s = mix64((s + GAMMA + (k & MASK64)) & MASK64)
    return s


class SplitMix64:
    """Counter-based splitmix64 stream.

    The k-th draw is ``mix64(seed + k*GAMMA)`` with k starting at 1.
    ``counter`` is the number of draws consumed so far; it can be
    passed to a numba kernel and written back afterwards so Python and
    kernel code share one stream.
    """

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        self.seed = seed & MASK64
        self.counter = counter & MASK64

    def clone(self) -> "SplitMix64":
        return SplitMix64(self.seed, self.counter)

    def u64(self) -> int:
        self.counter = (self.counter + 1) & MASK64
        return mix64((self.seed + self.counter * GAMMA) & MASK64)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53-bit resolution."""
        return (self.u64() >> 11) * _INV53

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n).

        Computed as ``int(random() * n)``; the truncation matches the
        kernel-side arithmetic exactly.  The rounding bias is O(n/2^53)
        and irrelevant at simulation scales (n <= 2^20).
        """
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        return int(self.random() * n)

    def shuffle(self, xs: list) -> None:
        """In-place Fisher-Yates shuffle.

        Draw order (one randbelow(i+1) per position, descending) is
        part of the determinism contract shared with the kernels.
        """
        for i in range(len(xs) - 1, 0, -1):
            j = self.randbelow(i + 1)
            xs[i], xs[j] = xs[j], xs[i]

    # -- vectorized draws (advance the same counter) --

    def u64_array(self, n: int) -> np.ndarray:
        ks = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter = (self.counter + n) & MASK64
        z = np.uint64(self.seed) + ks * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    def random_array(self, n: int) -> np.ndarray:
        return (self.u64_array(n) >> np.uint64(11)) * _INV53

    def randbelow_array(self, n: int, bound: int) -> np.ndarray:
        if bound <= 0:
            raise ValueError("randbelow_array needs bound >= 1")
        return (self.random_array(n) * bound).astype(np.int64)

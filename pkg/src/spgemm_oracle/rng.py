"""Counter-based SplitMix64 generator.

Every draw is ``mix64(seed + k * GAMMA)`` for a running counter ``k``, with the
finalizer from Steele, Lea & Flood (2014). The stream depends only on 64-bit
wrapping integer arithmetic, so it is bit-identical on every platform and numpy
version, and it vectorizes without a Python loop.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / float(1 << 53)


def mix64(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _mix_int(x: int) -> int:
    return int(mix64(np.array([x & MASK64], dtype=np.uint64))[0])


class SplitMix64:
    """Seedable, splittable 64-bit generator.

    >>> SplitMix64(42).random(2).tolist() == SplitMix64(42).random(2).tolist()
    True
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self._counter = 0

    def next_u64(self, n: int) -> np.ndarray:
        ks = np.arange(self._counter + 1, self._counter + 1 + n, dtype=np.uint64)
        self._counter += n
        with np.errstate(over="ignore"):
            states = np.uint64(self.seed) + ks * np.uint64(GAMMA)
        return mix64(states)

    def random(self, n: int) -> np.ndarray:
        """``n`` doubles uniform on [0, 1), 53 bits each."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def integers(self, high: int, n: int) -> np.ndarray:
        """``n`` integers uniform on [0, high) as ``floor(high * u)``."""
        if high <= 0:
            raise ValueError("high must be positive")
        out = np.floor(self.random(n) * high).astype(np.int64)
        # u * high can round up to high in float arithmetic
        np.minimum(out, high - 1, out=out)
        return out

    def spawn(self, key: int) -> "SplitMix64":
        """Independent child stream keyed by ``key``; does not advance the parent."""
        return SplitMix64(_mix_int(self.seed ^ _mix_int(key * GAMMA)))

"""Deterministic randomness for the protocol layer.

splitmix64 is pinned bit-exactly so that independently written peers derive
identical instances and private words from equal seeds: the state advances by
0x9E3779B97F4A7C15 and each output runs through the standard finalizer.
All protocol randomness flows from explicit 64-bit seeds; nothing reads the
system RNG.
"""

from __future__ import annotations

import hashlib

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Uniform draw from [0, n) by rejection sampling; deterministic."""
        if n <= 0:
            raise ValueError("randrange bound must be positive")
        bound = ((1 << 64) // n) * n
        while True:
            v = self.next_u64()
            if v < bound:
                return v % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform draw from [lo, hi] inclusive."""
        return lo + self.randrange(hi - lo + 1)

    def choice(self, seq):
        return seq[self.randrange(len(seq))]


def derive_seed(seed: int, label: bytes) -> int:
    """Fork an independent 64-bit seed for a labelled sub-stream."""
    digest = hashlib.sha256(label + (seed & _MASK).to_bytes(8, "big")).digest()
    return int.from_bytes(digest[:8], "big")

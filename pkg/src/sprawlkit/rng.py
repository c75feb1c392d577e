"""SplitMix64: the fixed pseudo-random generator used for all sampling.

Bootstrap resampling and holdout shuffles must reproduce bit-identically
across platforms and Python versions, so the generator algorithm is pinned
here instead of relying on ``random``. SplitMix64 (Steele, Lea & Flood's
64-bit mixer, as published in java.util.SplittableRandom) is tiny and has
a well-known reference output stream.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(value: int) -> int:
    """One SplitMix64 finalizer step; maps any int to a well-mixed u64."""
    z = value & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Deterministic 64-bit generator with a one-integer state."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return mix64(self._state)

    def randint(self, n: int) -> int:
        """Uniform int in [0, n). Modulo bias is negligible for n << 2**64."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]


def derive_seed(seed: int, stream: int) -> int:
    """Stable per-stream seed from a user seed and a stream index."""
    return mix64(mix64(seed) ^ (stream + 1) * _GAMMA)

"""Portable deterministic random number generation.

Every seeded stream in this package (candidate drawing, fold shuffling,
forward sampling) comes from SplitMix64 so that runs are reproducible
bit-for-bit from a 64-bit seed, independent of platform or Python
version. The exact algorithm, the unbiased bounded draw, and the seed
derivation scheme are specified in docs/FORMATS.md; changing any of them
breaks golden reports.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood's mixing constants)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection; no modulo bias."""
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def float53(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def child_seed(seed: int, index: int) -> int:
    """Derive an independent sub-stream seed (e.g. one per CV fold).

    Defined as the (index+1)-th output of a SplitMix64 seeded with
    ``seed``; documented in docs/FORMATS.md.
    """
    if index < 0:
        raise ValueError("index must be nonnegative")
    rng = SplitMix64(seed)
    for _ in range(index):
        rng.next_u64()
    return rng.next_u64()

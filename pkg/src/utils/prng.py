"""Seeded SplitMix64 source used by every generator.

The algorithm is fixed (see docs/prng.md) so that generated fixtures are
byte-identical across platforms and Python versions; ``random.Random``
gives no such guarantee.
"""
from fractions import Fraction
from typing import List, MutableSequence, Sequence, TypeVar

T = TypeVar("T")

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """Deterministic 64-bit generator."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError(f"randbelow needs a positive bound, got {n}")
        limit = ((1 << 64) // n) * n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi]."""
        return lo + self.randbelow(hi - lo + 1)

    def rational(self, bound: int, denominator: int = 1) -> Fraction:
        """Fraction with numerator in [-bound, bound] over a denominator in [1, denominator]."""
        q = self.randint(1, denominator) if denominator > 1 else 1
        return Fraction(self.randint(-bound, bound), q)

    def shuffle(self, items: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def choice(self, items: Sequence[T]) -> T:
        return items[self.randbelow(len(items))]

    def sample(self, items: Sequence[T], k: int) -> List[T]:
        pool = list(items)
        self.shuffle(pool)
        return pool[:k]

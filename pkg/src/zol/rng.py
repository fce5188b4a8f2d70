"""Deterministic random streams and confidence intervals.

A counter-based generator (splitmix64 applied to a keyed counter) gives
reproducible, independently addressable substreams: Rng(seed, stream)
produces the same sequence regardless of what other streams were drawn
first, which keeps parallel experiments and their replays honest.
"""

import math

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


class Rng:
    """Keyed counter stream of 64-bit words with float/int helpers."""

    def __init__(self, seed: int, stream: int = 0):
        self._key = _mix(seed & MASK64 ^ _mix(stream & MASK64))
        self._counter = 0

    def next64(self) -> int:
        self._counter += 1
        return _mix(self._key + self._counter * GOLDEN & MASK64)

    def random(self) -> float:
        # 53-bit mantissa, uniform on [0, 1)
        return (self.next64() >> 11) * 2.0 ** -53

    def randint(self, n: int) -> int:
        """Uniform on {0, ..., n-1} by rejection; unbiased."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (MASK64 + 1) - (MASK64 + 1) % n
        while True:
            w = self.next64()
            if w < limit:
                return w % n

    def choice(self, seq):
        return seq[self.randint(len(seq))]

    def bernoulli(self, p) -> bool:
        return self.random() < p

    def substream(self, stream: int) -> "Rng":
        child = Rng.__new__(Rng)
        child._key = _mix(self._key ^ _mix(stream & MASK64))
        child._counter = 0
        return child


def wilson_interval(successes: int, trials: int, z: float = 1.959963985):
    """Wilson score interval for a binomial proportion, default 95%."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes out of range")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(
        phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)

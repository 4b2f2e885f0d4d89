"""Named, splittable deterministic random streams for the simulator.

Every entity in a run (a user, a query event, one tick's work item) gets
its own SplitMix64 stream derived from the run seed and a label path, so
adding draws in one place never shifts the numbers drawn anywhere else.
The samplers are implemented here rather than borrowed from numpy to keep
golden outputs stable across library versions.
"""

from __future__ import annotations

import math

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_LABEL_OFFSET = 0xCBF29CE484222325
_LABEL_PRIME = 0x100000001B3


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, (z ^ (z >> 31)) & _MASK64


def _label_hash(label) -> int:
    if isinstance(label, int):
        return label & _MASK64
    h = _LABEL_OFFSET
    for byte in str(label).encode("utf-8"):
        h ^= byte
        h = (h * _LABEL_PRIME) & _MASK64
    return h


def derive_seed(seed: int, *labels) -> int:
    """Mix a root seed with a label path into a child stream seed."""
    state = seed & _MASK64
    for label in labels:
        state ^= _label_hash(label)
        state, out = _splitmix64(state)
        state = out
    return state


class Stream:
    """One independent deterministic stream of draws."""

    __slots__ = ("_state", "_spare_normal")

    def __init__(self, seed: int):
        self._state = seed & _MASK64
        self._spare_normal: float | None = None

    def next_u64(self) -> int:
        self._state, out = _splitmix64(self._state)
        return out

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 bits of resolution."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], inclusive; modulo bias is negligible
        against a 64-bit draw for the small ranges used here."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next_u64() % (hi - lo + 1)

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def normal(self) -> float:
        """Standard normal via Box-Muller, caching the paired draw."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return z
        u1 = self.uniform()
        while u1 == 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = radius * math.sin(2.0 * math.pi * u2)
        return radius * math.cos(2.0 * math.pi * u2)

    def lognormal_ms(self, median: float, sigma: float) -> float:
        """Lognormal latency sample with the given median (ms) and log-sigma."""
        return median * math.exp(sigma * self.normal())

    def pareto(self, alpha: float, minimum: float) -> float:
        """Pareto-tailed sample with scale ``minimum`` and shape ``alpha``."""
        u = self.uniform()
        while u == 0.0:
            u = self.uniform()
        return minimum / (u ** (1.0 / alpha))

    def choice_weighted(self, items: list, weights: list[float]):
        total = sum(weights)
        if total <= 0:
            raise ValueError("weights must have positive sum")
        target = self.uniform() * total
        cumulative = 0.0
        for item, weight in zip(items, weights):
            cumulative += weight
            if target < cumulative:
                return item
        return items[-1]


def stream(seed: int, *labels) -> Stream:
    """Stream addressed by (seed, label path)."""
    return Stream(derive_seed(seed, *labels))

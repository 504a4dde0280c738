"""Seeded, splittable randomness for reproducible experiments."""

from __future__ import annotations

import numpy as np


class RandomSource:
    """Deterministic random stream keyed by (seed, stream_id).

    Two sources built with the same key produce identical draw sequences;
    ``split`` derives an independent stream under the same seed so that
    per-trial or per-worker randomness stays reproducible no matter how
    work is scheduled.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._gen = np.random.default_rng([self.seed & _MASK64, self.stream_id & _MASK64])

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream_id={self.stream_id})"

    def split(self, stream_id: int) -> "RandomSource":
        return RandomSource(self.seed, stream_id)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def random(self) -> float:
        return float(self._gen.random())

    def uniform(self, low: float, high: float, size=None):
        out = self._gen.uniform(low, high, size=size)
        return float(out) if size is None else out

    def integers(self, low: int, high: int, size=None):
        """Uniform integers in [low, high)."""
        out = self._gen.integers(low, high, size=size)
        return int(out) if size is None else out

    def normal(self, loc=0.0, scale=1.0, size=None):
        out = self._gen.normal(loc, scale, size=size)
        return float(out) if size is None else out

    def randbits(self, bits: int) -> int:
        """Uniform integer in [0, 2**bits) for arbitrarily large bit counts."""
        if bits <= 0:
            raise ValueError("bits must be positive")
        nbytes = (bits + 7) // 8
        value = int.from_bytes(self._gen.bytes(nbytes), "big")
        return value >> (8 * nbytes - bits)


_MASK64 = (1 << 64) - 1


def as_random_source(rng) -> RandomSource:
    """Coerce a RandomSource or integer seed into a RandomSource."""
    if isinstance(rng, RandomSource):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RandomSource(int(rng))
    raise TypeError(f"expected RandomSource or int seed, got {type(rng).__name__}")

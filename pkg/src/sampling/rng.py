"""
Seeded random streams.

Every stream is a numpy Generator over the PCG64 bit generator (O'Neill's
permuted congruential generator, 128-bit state, 64-bit output), seeded
through a SeedSequence built from (seed, stream index). Replica k of a
configuration with seed s always draws from stream (s, k), independent of
which worker runs it.
"""

from typing import Optional

import numpy as np

ALGORITHM = "PCG64"


class RngStream:
    """
    Single-owner random stream.

    Attributes:
        seed: Configuration seed
        stream: Stream index (replica number, worker id, ...)
        draws: Number of values drawn so far
    """

    def __init__(self, seed: int, stream: int = 0):
        if seed < 0 or stream < 0:
            raise ValueError(f"seed and stream index must be unsigned, got {seed}, {stream}")
        self.seed = int(seed)
        self.stream = int(stream)
        self.draws = 0
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream={self.stream}, algorithm={ALGORITHM}, draws={self.draws})"

    @property
    def algorithm(self) -> str:
        return ALGORITHM

    def derive(self, stream: int) -> "RngStream":
        """Independent stream sharing this stream's seed."""
        return RngStream(self.seed, stream)

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        self.draws += 1
        return float(self.generator.random())

    def uniform(self, low: float, high: float) -> float:
        self.draws += 1
        return float(self.generator.uniform(low, high))

    def integers(self, low: int, high: Optional[int] = None) -> int:
        """Uniform integer in [low, high), or [0, low) when high is omitted."""
        self.draws += 1
        return int(self.generator.integers(low, high))

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

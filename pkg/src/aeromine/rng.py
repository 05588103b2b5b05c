"""Counter-based random streams.

Every stochastic operation in the library draws from a stream identified by
a (seed, position, iteration, purpose, counter) tuple.  Streams are derived
on demand from the tuple alone, so a resumed run can re-create any stream
without serializing generator state, and distinct tuples give independent
streams.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, replace

import numpy as np

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class RandomKey:
    seed: int
    position: int = 0
    iteration: int = 0
    purpose: str = ""
    counter: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh PCG64 generator for this key; identical keys give identical streams."""
        entropy = [
            self.seed & _U64,
            self.position & _U64,
            self.iteration & _U64,
            zlib.crc32(self.purpose.encode("utf-8")),
            self.counter & _U64,
        ]
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))

    def derive(self, purpose: str, position: int | None = None,
               iteration: int | None = None, counter: int = 0) -> "RandomKey":
        return RandomKey(
            seed=self.seed,
            position=self.position if position is None else position,
            iteration=self.iteration if iteration is None else iteration,
            purpose=purpose,
            counter=counter,
        )

    def with_counter(self, counter: int) -> "RandomKey":
        return replace(self, counter=counter)


def as_generator(stream) -> np.random.Generator:
    """Accept either a RandomKey or an already-built Generator."""
    if isinstance(stream, RandomKey):
        return stream.generator()
    if isinstance(stream, np.random.Generator):
        return stream
    raise TypeError(f"expected RandomKey or Generator, got {type(stream)!r}")

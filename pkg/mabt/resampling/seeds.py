"""Counter-derived random streams.

A stream is addressed by ``(master_seed, path..., tag, replicate)`` and built
from a ``numpy.random.SeedSequence`` spawn key, so replicate ``b`` gets the
same numbers whichever worker runs it and in whatever order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mabt.common.hashing import tag_key

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a path scoping nested Monte Carlo loops."""

    master_seed: int
    path: tuple[int, ...] = ()

    def child(self, index: int) -> SeedSpec:
        """Scope for one repetition (a Monte Carlo rep, a split, ...)."""
        return SeedSpec(self.master_seed, self.path + (int(index),))

    def sequence(self, replicate: int, tag: str = "") -> np.random.SeedSequence:
        return np.random.SeedSequence(
            entropy=int(self.master_seed) & _MASK64,
            spawn_key=(*self.path, tag_key(tag), int(replicate)),
        )

    def generator(self, replicate: int, tag: str = "") -> np.random.Generator:
        """Independent generator for ``replicate`` under ``tag``."""
        return np.random.Generator(np.random.PCG64(self.sequence(replicate, tag)))

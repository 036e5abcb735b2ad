"""Reproducible stream derivation for disorder Monte Carlo.

A SeedPlan names a master seed plus a path of integers.  The generator for
realization index i hashes (master_seed, path..., i) through SeedSequence
into a counter-based Philox stream, so distinct indices give independent
streams and every realization is reproducible bit-for-bit no matter how
work is scheduled across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter

__all__ = ["SeedPlan"]


@dataclass(frozen=True)
class SeedPlan:
    master_seed: int
    path: tuple = ()

    def __post_init__(self):
        if not (isinstance(self.master_seed, (int, np.integer)) and self.master_seed >= 0):
            raise InvalidParameter("master seed must be a nonnegative integer")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def child(self, *indices: int) -> "SeedPlan":
        """Sub-plan for a named purpose; extend the derivation path."""
        return SeedPlan(self.master_seed, self.path + tuple(int(i) for i in indices))

    def generator(self, index: int = 0) -> np.random.Generator:
        """Independent Philox stream for one realization index."""
        ss = np.random.SeedSequence(self.master_seed,
                                    spawn_key=self.path + (int(index),))
        return np.random.Generator(np.random.Philox(ss))

"""Counter-based RNG streams: one independent Philox stream per replication.

Every Monte Carlo loop derives its stream from (seed, replication index), so
aggregates are bit-identical for any execution order or degree of
parallelism; reductions always run in replication order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def rep_rng(seed: int, rep_index: int) -> np.random.Generator:
    """Generator for replication ``rep_index`` of an experiment ``seed``."""
    key = np.array([seed & _MASK64, rep_index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

"""Reproducible random number streams.

All stochastic code in this package draws from a numpy Generator backed by
the Philox 4x64 counter-based bit generator, keyed by (seed, stream).  The
same (seed, stream, call sequence) produces the same draws on every platform
for a fixed numpy version.  Replicated experiments use one stream per
replicate, indexed by the replicate number.
"""

from __future__ import annotations

import numpy as np

__all__ = ["ALGORITHM", "make_rng"]

ALGORITHM = "philox4x64"

_UINT64_MAX = 2**64 - 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the given (seed, stream) pair."""
    if not 0 <= seed <= _UINT64_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    if not 0 <= stream <= _UINT64_MAX:
        raise ValueError(f"stream must be a 64-bit unsigned integer, got {stream}")
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

"""Deterministic random streams.

All sampling goes through counter-based Philox generators, so a
(seed, stream) pair produces the same draws on every platform and the
draws for different purposes never overlap.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

_MAX_SEED = 2**64

# Fixed stream ids. Streams keep draws for different purposes disjoint
# even when they share a seed.
DISORDER_STREAM = 0
PHASE_STREAM = 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _MAX_SEED:
        raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (stream, seed)."""
    key = (int(stream) << 64) | check_seed(seed)
    return np.random.Generator(np.random.Philox(key=key))

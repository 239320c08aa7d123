"""Reproducible random number streams.

All randomness in the package flows through counter-based Philox
generators keyed by ``(seed, stream_index)``.  Two consumers holding the
same key always see the same stream, independent of execution order, so
parallel Monte Carlo loops stay bit-reproducible.  Streams are
single-owner by convention: split a new stream instead of sharing one.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for sub-stream ``index`` of the family keyed by ``seed``."""
    if seed < 0 or index < 0:
        raise ValueError("seed and stream index must be non-negative")
    key = np.array([np.uint64(seed), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))

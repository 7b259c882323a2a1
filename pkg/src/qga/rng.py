"""Per-purpose random streams derived from a master seed.

Every stochastic decision draws from a stream keyed by
``(master_seed, purpose, index, generation)``, so results do not depend on the
order in which evaluations are scheduled.
"""

from __future__ import annotations

import zlib

import numpy as np


def purpose_tag(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def stream(master_seed: int, purpose: str, index: int = 0, generation: int = 0) -> np.random.Generator:
    if master_seed < 0 or index < 0 or generation < 0:
        raise ValueError("seed, index and generation must be non-negative")
    seq = np.random.SeedSequence([master_seed, purpose_tag(purpose), index, generation])
    return np.random.Generator(np.random.PCG64(seq))

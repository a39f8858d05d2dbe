"""Deterministic per-stage random streams.

Every source of randomness in a run draws from a child seed derived from
the single run seed and a stage label, so adding or reordering stages
never perturbs another stage's draws.
"""

from __future__ import annotations

import zlib

import numpy as np


def child_seed(seed: int, label: str) -> int:
    """A stable 64-bit child seed for a named stage."""
    sequence = np.random.SeedSequence(
        [int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(label.encode("utf-8"))]
    )
    return int(sequence.generate_state(1, np.uint64)[0])


def child_rng(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng(child_seed(seed, label))

"""Deterministic random-number substreams for sample-parallel experiments.

A single root seed plus a structured spawn key (stream label, sample index)
derives independent Philox streams through numpy's SeedSequence. Results are
reproducible regardless of execution order or worker count.
"""

from __future__ import annotations

import numpy as np

_LABEL_SPACE = 1 << 32


def _label_code(label: str) -> int:
    # stable 32-bit label hash (FNV-1a); python's hash() is salted per process
    h = 2166136261
    for b in label.encode("utf-8"):
        h = ((h ^ b) * 16777619) % (1 << 32)
    return h


def substream(seed: int, label: str, *indices: int) -> np.random.Generator:
    """Independent generator for (root seed, stream label, index tuple)."""
    key = (_label_code(label),) + tuple(int(i) % _LABEL_SPACE for i in indices)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))

"""Deterministic derivation of independent RNG streams.

Every Monte Carlo trial gets its own generator, keyed by the root seed and
a structured path (stream label, distribution key, trial index, ...). The
path is hashed with SHA-256, so the mapping is stable across processes,
platforms, and worker layouts.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_rng"]


def derive_rng(seed: int, *path: object) -> np.random.Generator:
    """Child generator fully determined by (seed, path)."""
    h = hashlib.sha256()
    h.update(repr(int(seed)).encode())
    for part in path:
        h.update(b"\x1f")
        h.update(repr(part).encode())
    entropy = int.from_bytes(h.digest(), "little")
    return np.random.default_rng(np.random.SeedSequence(entropy))

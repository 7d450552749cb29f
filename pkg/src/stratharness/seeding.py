"""Deterministic seed derivation.

Every random stream in a match is derived from the scenario seed plus a
label, so independent consumers never share (or perturb) one another's
sequence and results survive process restarts.
"""

from __future__ import annotations

import hashlib
import random

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *labels: object) -> int:
    """Mix ``seed`` with ``labels`` into a new unsigned 64-bit seed."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed) & _MASK64).encode())
    for label in labels:
        h.update(b"\x1f")
        h.update(str(label).encode())
    return int.from_bytes(h.digest(), "big")


def make_rng(seed: int, *labels: object) -> random.Random:
    return random.Random(derive_seed(seed, *labels))

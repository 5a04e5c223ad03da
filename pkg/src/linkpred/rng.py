"""Deterministic seed derivation.

Every randomized stage derives its own 64-bit seed by hashing the master
seed together with a label path, so stages (and per-network / per-tree /
per-walk substreams) are reproducible independently of execution order.
"""

import hashlib

import numpy as np


def derive_seed(master_seed: int, *labels) -> int:
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:8], "little")


def make_rng(master_seed: int, *labels) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, *labels))

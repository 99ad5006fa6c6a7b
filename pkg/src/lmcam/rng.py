"""Keyed counter-based random streams.

All stochastic operations draw from a Philox generator keyed by
``(seed, label, *indices)``. Philox is counter-based, so streams are
identical across platforms and independent per key: adding a new pipeline
stage with its own label never perturbs the draws of existing stages.
"""

import hashlib

import numpy as np


def keyed_rng(seed, *labels):
    """Return a ``numpy.random.Generator`` keyed by seed and labels.

    The key is derived by hashing the decimal seed together with the
    repr of every label, so any hashable/printable label (op names,
    clip indices) yields a stable, collision-resistant stream.
    """
    h = hashlib.blake2b(digest_size=16)
    h.update(str(int(seed)).encode())
    for label in labels:
        h.update(b"\x1f")
        h.update(repr(label).encode())
    key = int.from_bytes(h.digest(), "little")
    return np.random.Generator(np.random.Philox(key=key))

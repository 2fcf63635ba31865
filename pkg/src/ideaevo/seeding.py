"""Deterministic seed derivation.

Every random stream in a simulation is derived from one master seed by
hashing ``(master_seed, role, *index)`` with BLAKE2b.  Because the
derivation is a pure function, a replicate can be executed on any worker
in any order and still draw exactly the same numbers.
"""

import hashlib
import struct

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master_seed, role, *index):
    """Return a 64-bit seed for the stream named ``role`` at ``index``.

    >>> derive_seed(1, "agent", 0) == derive_seed(1, "agent", 0)
    True
    >>> derive_seed(1, "agent", 0) != derive_seed(1, "agent", 1)
    True
    """
    text = "|".join([str(int(master_seed)), str(role), *map(str, index)])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_rng(master_seed, role, *index):
    return np.random.default_rng(derive_seed(master_seed, role, *index))


def keyed_uniform(key, counter):
    """Uniform float in [0, 1) as a pure function of ``(key, counter)``.

    Counter-mode use of keyed BLAKE2b: the 64-bit ``key`` keys the hash and
    the non-negative ``counter`` is the message.  53 bits of the digest
    become the mantissa, as in ``random.random``.
    """
    digest = hashlib.blake2b(
        int(counter).to_bytes(16, "little"),
        digest_size=8,
        key=struct.pack("<Q", int(key) & _MASK64),
    ).digest()
    return (int.from_bytes(digest, "little") >> 11) * (1.0 / (1 << 53))

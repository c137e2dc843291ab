"""Counter-based hashing and per-replica random streams.

Everything random in the package is a pure function of 64-bit keys:

* obstacle status of a site is ``mix64`` folded over the zigzag-encoded
  coordinates, starting from the environment key;
* a replica's random stream is a SplitMix64 sequence whose starting state is
  ``stream_key(master_seed, replica_index)``.

No global generator state exists, so results do not depend on how replicas
are scheduled across workers.

Hash scheme (identifier ``HASH_SCHEME``)::

    mix64(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
               z ^= z >> 27; z *= 0x94D049BB133111EB
               z ^= z >> 31                      (all mod 2**64)
    zigzag(x) = (x << 1) ^ (x >> 63)             (signed -> unsigned, injective)
    site_hash(seed, x) = fold(h -> mix64(h ^ zigzag(x_i)), x, mix64(seed ^ ENV_SALT))
    uniform(h) = (h >> 11) * 2**-53
"""

from __future__ import annotations

import numba as nb
import numpy as np

HASH_SCHEME = "splitmix64-zigzag-v1"

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
ENV_SALT = np.uint64(0x5EED0B57AC1E5A17)
STREAM_SALT = np.uint64(0xD1B54A32D192ED03)

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_S1 = np.uint64(1)
_S63 = np.uint64(63)
_INV53 = 1.0 / 9007199254740992.0

MASK64 = (1 << 64) - 1


@nb.njit(nb.uint64(nb.uint64), cache=True, nogil=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@nb.njit(nb.uint64(nb.int64), cache=True, nogil=True)
def zigzag(x):
    return np.uint64((x << 1) ^ (x >> 63))


@nb.njit(cache=True, nogil=True)
def to_unit(h):
    """Map a 64-bit hash to [0, 1) with 53 bits of precision."""
    return np.float64(h >> _S11) * _INV53


@nb.njit(cache=True, nogil=True)
def env_key(seed):
    return mix64(np.uint64(seed) ^ ENV_SALT)


@nb.njit(cache=True, nogil=True)
def stream_key(master_seed, index):
    """Starting state of the SplitMix64 stream for replica ``index``."""
    h = mix64(np.uint64(master_seed) ^ STREAM_SALT)
    return mix64(h ^ mix64(np.uint64(index) + GOLDEN))


@nb.njit(cache=True, nogil=True)
def next_u64(state):
    """Advance a SplitMix64 state held in ``state[0]`` and return the output."""
    state[0] += GOLDEN
    return mix64(state[0])


@nb.njit(cache=True, nogil=True)
def next_uniform(state):
    return to_unit(next_u64(state))


@nb.njit(cache=True, nogil=True)
def next_below(state, k):
    """Uniform integer in ``[0, k)``."""
    j = np.int64(next_uniform(state) * k)
    return j if j < k else k - 1


def derive_seed(master_seed: int, *path) -> int:
    """Deterministic child seed from a master seed and a path of ints/strings.

    Used by the experiment runner to split one configured seed into
    independent environment and replica seeds.
    """
    h = int(mix64(np.uint64(master_seed & MASK64)))
    for part in path:
        if isinstance(part, str):
            for byte in part.encode():
                h = int(mix64(np.uint64(h ^ byte)))
            h = int(mix64(np.uint64(h ^ 0xFF)))
        else:
            h = int(mix64(np.uint64(h ^ int(mix64(np.uint64(int(part) & MASK64))))))
    return h


def make_stream(master_seed: int, index: int = 0) -> np.ndarray:
    """A one-element uint64 state array usable with the ``next_*`` functions."""
    return np.array([stream_key(np.uint64(master_seed & MASK64), np.uint64(index))], dtype=np.uint64)

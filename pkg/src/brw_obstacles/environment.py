"""IID Bernoulli obstacle configurations on Z^d.

A site is an obstacle when the uniform obtained by hashing
``(master_seed, site)`` falls below ``p``.  Nothing is stored, so the field is
effectively infinite and can be shared freely between workers.

The origin's own status never matters for the dynamics: a particle always
moves before any branching decision is taken.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numba as nb
import numpy as np

from . import rng
from .errors import ValidationError

OBSTACLE = "OBSTACLE"
VACANT = "VACANT"


@dataclass(frozen=True)
class EnvironmentSpec:
    d: int
    p: float
    master_seed: int = 0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValidationError(f"dimension must be a positive integer, got {self.d!r}")
        if not (0.0 <= self.p < 1.0):
            raise ValidationError(f"obstacle probability must lie in [0, 1), got {self.p!r}")
        if not (0 <= int(self.master_seed) < 2**64):
            raise ValidationError("master_seed must be an unsigned 64-bit integer")

    @property
    def q(self) -> float:
        return 1.0 - self.p


@dataclass(frozen=True)
class ObstacleField:
    """Immutable obstacle configuration.

    ``threshold`` is the probability compared against the site hash.  It equals
    ``spec.p`` except for the diagnostic all-obstacle field built by
    :meth:`all_obstacles`, where it is 1.
    """

    spec: EnvironmentSpec
    threshold: float = dc_field(default=-1.0)

    def __post_init__(self):
        if self.threshold < 0:
            object.__setattr__(self, "threshold", float(self.spec.p))

    @classmethod
    def all_obstacles(cls, d: int, master_seed: int = 0) -> "ObstacleField":
        """Diagnostic field with an obstacle at every site (p = 1)."""
        return cls(EnvironmentSpec(d, 0.0, master_seed), threshold=1.0)

    @property
    def d(self) -> int:
        return self.spec.d

    @property
    def p(self) -> float:
        return self.threshold

    @property
    def q(self) -> float:
        return 1.0 - self.threshold

    @property
    def key(self) -> np.uint64:
        return np.uint64(rng.env_key(np.uint64(self.spec.master_seed)))

    def metadata(self) -> dict:
        return {
            "d": self.d,
            "p": self.p,
            "q": self.q,
            "env_seed": int(self.spec.master_seed),
            "hash_scheme": rng.HASH_SCHEME,
        }

    def query(self, site) -> str:
        return VACANT if is_vacant(self, site) else OBSTACLE


@nb.njit(cache=True, nogil=True)
def site_is_obstacle(key, threshold, coords):
    """Obstacle status of the site ``coords`` (1-d int64 array)."""
    if threshold <= 0.0:
        return False
    if threshold >= 1.0:
        return True
    h = np.uint64(key)
    for i in range(coords.shape[0]):
        h = rng.mix64(h ^ rng.zigzag(coords[i]))
    return rng.to_unit(h) < threshold


@nb.njit(cache=True, nogil=True)
def _box_mask(key, threshold, d, radius):
    side = 2 * radius + 1
    total = side**d
    out = np.empty(total, dtype=np.bool_)
    coords = np.empty(d, dtype=np.int64)
    for flat in range(total):
        rem = flat
        for axis in range(d - 1, -1, -1):
            coords[axis] = rem % side - radius
            rem //= side
        out[flat] = site_is_obstacle(key, threshold, coords)
    return out


def make_field(spec: EnvironmentSpec) -> ObstacleField:
    if not isinstance(spec, EnvironmentSpec):
        raise ValidationError("make_field expects an EnvironmentSpec")
    return ObstacleField(spec)


def _as_site(field: ObstacleField, site) -> np.ndarray:
    coords = np.asarray(site, dtype=np.int64).reshape(-1)
    if coords.shape[0] != field.d:
        raise ValidationError(f"site {tuple(site)} has dimension {coords.shape[0]}, field has d={field.d}")
    return coords


def is_obstacle(field: ObstacleField, site) -> bool:
    return bool(site_is_obstacle(field.key, field.threshold, _as_site(field, site)))


def is_vacant(field: ObstacleField, site) -> bool:
    return not is_obstacle(field, site)


def obstacle_mask(field: ObstacleField, radius: int) -> np.ndarray:
    """Boolean array of shape ``(2*radius+1,)*d``; index ``radius`` is the origin."""
    if radius < 0:
        raise ValidationError("radius must be nonnegative")
    flat = _box_mask(field.key, float(field.threshold), field.d, int(radius))
    return flat.reshape((2 * radius + 1,) * field.d)


def vacancy_fraction(field: ObstacleField, box_radius: int) -> float:
    """Fraction of vacant sites in the centred L-infinity box of given radius."""
    if int(box_radius) != box_radius or box_radius < 1:
        raise ValidationError("box_radius must be a positive integer")
    return float(1.0 - obstacle_mask(field, int(box_radius)).mean())

"""Finite-support offspring laws."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numba as nb
import numpy as np

from . import rng
from .errors import ValidationError

CRITICAL = "CRITICAL"
SUBCRITICAL = "SUBCRITICAL"
SUPERCRITICAL = "SUPERCRITICAL"

MASS_TOL = 1e-12


@dataclass(frozen=True)
class OffspringLaw:
    """Offspring distribution ``P(L = k) = masses[k]`` with finite support.

    Build through :func:`from_masses` or :func:`critical_binary`; the
    constructor trusts its input.
    """

    ks: tuple
    probs: tuple

    @property
    def masses(self) -> dict:
        return dict(zip(self.ks, self.probs))

    @property
    def mean(self) -> float:
        return math.fsum(k * pk for k, pk in zip(self.ks, self.probs))

    @property
    def variance(self) -> float:
        m = self.mean
        return math.fsum(pk * (k - m) ** 2 for k, pk in zip(self.ks, self.probs))

    @property
    def p0(self) -> float:
        return self.masses.get(0, 0.0)

    @property
    def mu_star(self) -> float:
        """Probability of leaving at least one offspring, ``1 - p_0``."""
        return 1.0 - self.p0

    @property
    def regime(self) -> str:
        m = self.mean
        if abs(m - 1.0) <= MASS_TOL:
            return CRITICAL
        return SUBCRITICAL if m < 1.0 else SUPERCRITICAL

    @property
    def is_critical(self) -> bool:
        return self.regime == CRITICAL

    @property
    def max_offspring(self) -> int:
        return max(self.ks)

    @property
    def law_id(self) -> str:
        return ";".join(f"{k}:{pk:.12g}" for k, pk in zip(self.ks, self.probs))

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(values, cdf)`` tables consumed by the jitted samplers."""
        values = np.asarray(self.ks, dtype=np.int64)
        cdf = np.cumsum(np.asarray(self.probs, dtype=np.float64))
        cdf[-1] = 1.0
        return values, cdf

    def metadata(self) -> dict:
        return {"law_id": self.law_id, "mean": self.mean, "variance": self.variance, "regime": self.regime}


def _normalised(masses: Mapping[int, float]) -> OffspringLaw:
    items = sorted((int(k), float(v)) for k, v in dict(masses).items())
    if not items:
        raise ValidationError("offspring law needs at least one mass")
    for k, v in items:
        if k < 0:
            raise ValidationError(f"offspring count must be nonnegative, got {k}")
        if not (v >= 0.0) or not math.isfinite(v):
            raise ValidationError(f"mass at {k} must be a finite nonnegative number, got {v}")
    total = math.fsum(v for _, v in items)
    if abs(total - 1.0) > MASS_TOL:
        raise ValidationError(f"masses sum to {total!r}, not 1")
    items = [(k, v / total) for k, v in items if v > 0.0]
    return OffspringLaw(tuple(k for k, _ in items), tuple(v for _, v in items))


def from_masses(masses: Mapping[int, float]) -> OffspringLaw:
    """Validate and normalise a finite mass list.

    Zero masses are dropped.  Raises :class:`ValidationError` when masses are
    negative, do not sum to one (tolerance 1e-12), or the mean exceeds one.
    """
    law = _normalised(masses)
    if law.mean > 1.0 + MASS_TOL:
        raise ValidationError(f"supercritical law (mean {law.mean}) is not supported")
    return law


def critical_binary() -> OffspringLaw:
    """Zero or two offspring with equal probability."""
    return from_masses({0: 0.5, 2: 0.5})


def pgf(law: OffspringLaw, z: float) -> float:
    if not (0.0 <= z <= 1.0):
        raise ValidationError(f"pgf argument must lie in [0, 1], got {z}")
    return math.fsum(pk * z**k for k, pk in zip(law.ks, law.probs))


def pgf_array(law: OffspringLaw, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.zeros_like(z)
    for k, pk in zip(law.ks, law.probs):
        out += pk * z**k
    return out


def survival_map(law: OffspringLaw, s: np.ndarray) -> np.ndarray:
    """``1 - pgf(1 - s)`` evaluated without cancellation for small ``s``."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    with np.errstate(divide="ignore"):
        log_e = np.log1p(-np.minimum(s, 1.0))
    for k, pk in zip(law.ks, law.probs):
        if k > 0:
            out += pk * -np.expm1(k * log_e)
    return out


def survival_ratio(law: OffspringLaw, s: np.ndarray) -> np.ndarray:
    """``(1 - pgf(1 - s)) / s`` as a polynomial in ``1 - s``; equals the mean at ``s = 0``."""
    e = 1.0 - np.asarray(s, dtype=np.float64)
    out = np.zeros_like(e)
    for k, pk in zip(law.ks, law.probs):
        if k > 0:
            acc = np.ones_like(e)
            term = np.ones_like(e)
            for _ in range(1, k):
                term = term * e
                acc = acc + term
            out += pk * acc
    return out


@nb.njit(cache=True, nogil=True)
def draw(values, cdf, state):
    u = rng.next_uniform(state)
    for i in range(cdf.shape[0] - 1):
        if u < cdf[i]:
            return values[i]
    return values[cdf.shape[0] - 1]


def sample(law: OffspringLaw, stream: np.ndarray) -> int:
    """One offspring count drawn from ``law`` using the caller's stream."""
    values, cdf = law.arrays()
    return int(draw(values, cdf, stream))


@nb.njit(cache=True, nogil=True)
def _sample_many(values, cdf, state, size):
    out = np.empty(size, dtype=np.int64)
    for i in range(size):
        out[i] = draw(values, cdf, state)
    return out


def sample_many(law: OffspringLaw, stream: np.ndarray, size: int) -> np.ndarray:
    values, cdf = law.arrays()
    return _sample_many(values, cdf, stream, int(size))


def size_biased(law: OffspringLaw) -> OffspringLaw:
    """Law with masses ``k p_k / mean`` on ``k >= 1``.

    The result is usually supercritical; it only drives the spine.
    """
    m = law.mean
    if m <= 0.0:
        raise ValidationError("size-biasing needs a positive mean")
    return _normalised({k: k * pk / m for k, pk in zip(law.ks, law.probs) if k >= 1})


def llogl(law: OffspringLaw) -> float:
    return math.fsum(pk * k * math.log(k) for k, pk in zip(law.ks, law.probs) if k >= 1)

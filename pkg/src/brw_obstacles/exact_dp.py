"""Exact finite-horizon recursions on a truncated box.

A walk started at the origin makes at most ``n`` nearest-neighbour steps, so
a box of radius ``n`` holds everything that can influence time-``n``
quantities at the origin.  The arrays carry one extra stale layer (radius
``n + 1``): after ``k`` updates the values are exact on radius ``n + 1 - k``,
which still covers the origin at ``k = n``.

Recursions, with ``avg_y`` the average over the ``2d`` neighbours of ``x``:

* multiplicative functional  ``u_k(x) = avg_y w(y) u_{k-1}(y)``, ``u_0 = 1``,
  where ``w = vacant_weight`` off obstacles and ``obstacle_weight`` on them.
  With ``w = mean`` on vacant sites this is ``E_x |Z_k|``; read as a single
  soft-killed walker it is ``E_x[mu^{T_k}]``.
* survival  ``s_k(x) = avg_y [s_{k-1}(y) if y in K else 1 - phi(1 - s_{k-1}(y))]``,
  ``s_0 = 1``; this is ``1 - e_k(x)`` for the extinction probabilities ``e_k``.
* occupation mean  ``m_k(x) = avg_y [m_{k-1}(y) + 1{y vacant}]``, ``m_0 = 0``.

The log-space variants store ``log u`` / ``log s`` and combine neighbours by
log-sum-exp, so subcritical quantities at large ``n`` do not underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .environment import ObstacleField, obstacle_mask
from .errors import CapacityError, ValidationError
from .offspring import OffspringLaw, survival_map, survival_ratio

EXPECTATION_U = "EXPECTATION_U"
EXTINCTION_E = "EXTINCTION_E"
SURVIVAL_S = "SURVIVAL_S"
DV = "DV"
OCCUPATION_M = "OCCUPATION_M"

DEFAULT_MEMORY_BUDGET = 2 * 10**7  # cells
SANDWICH_SLACK = 1e-12


@dataclass
class DPField:
    """Per-site values on the box of radius ``horizon + 1`` (origin at the centre)."""

    horizon: int
    values: np.ndarray
    kind: str
    log_space: bool = False

    @property
    def radius(self) -> int:
        return (self.values.shape[0] - 1) // 2

    @property
    def exact_radius(self) -> int:
        """Radius around the origin on which the values are exact (always 1)."""
        return 1

    def at_origin(self) -> float:
        return float(self.values[(self.radius,) * self.values.ndim])

    def linear(self) -> np.ndarray:
        return np.exp(self.values) if self.log_space else self.values


def _check(field: ObstacleField, n: int, budget: int) -> None:
    if int(n) != n or n < 0:
        raise ValidationError(f"horizon must be a nonnegative integer, got {n!r}")
    if field.d not in (1, 2, 3):
        raise ValidationError("exact recursions support d in {1, 2, 3}")
    cells = (2 * n + 3) ** field.d
    if cells > budget:
        raise CapacityError(f"box of radius {n + 1} in d={field.d} needs {cells} cells, budget is {budget}")


def _neighbour_slices(d: int):
    inner = (slice(1, -1),) * d
    out = []
    for axis in range(d):
        for sl in (slice(2, None), slice(None, -2)):
            idx = list(inner)
            idx[axis] = sl
            out.append(tuple(idx))
    return inner, out


def _average(g: np.ndarray, into: np.ndarray, log_space: bool) -> None:
    """``into[inner] = avg over neighbours of g``; reduction order fixed by slice order."""
    d = g.ndim
    inner, nbrs = _neighbour_slices(d)
    if log_space:
        stacked = np.stack([g[s] for s in nbrs])
        into[inner] = logsumexp(stacked, axis=0) - math.log(2 * d)
    else:
        acc = g[nbrs[0]].copy()
        for s in nbrs[1:]:
            acc += g[s]
        into[inner] = acc / (2 * d)


def _mask(field: ObstacleField, n: int) -> np.ndarray:
    return obstacle_mask(field, n + 1)


def multiplicative_functional(field: ObstacleField, n: int, vacant_weight: float, obstacle_weight: float = 1.0,
                              log_space: bool = False, budget: int = DEFAULT_MEMORY_BUDGET) -> DPField:
    """``E_x prod_{i=1..n} w(X_i)`` for a simple random walk, over the box."""
    _check(field, n, budget)
    K = _mask(field, n)
    if log_space:
        with np.errstate(divide="ignore"):
            logw = np.where(K, math.log(obstacle_weight) if obstacle_weight > 0 else -np.inf,
                            math.log(vacant_weight) if vacant_weight > 0 else -np.inf)
        v = np.zeros(K.shape)
        for _ in range(n):
            g = v + logw
            _average(g, v, True)
    else:
        w = np.where(K, float(obstacle_weight), float(vacant_weight))
        v = np.ones(K.shape)
        for _ in range(n):
            g = v * w
            _average(g, v, False)
    return DPField(n, v, EXPECTATION_U, log_space)


def survival_field(field: ObstacleField, law: OffspringLaw, n: int, log_space: bool = False,
                   budget: int = DEFAULT_MEMORY_BUDGET) -> DPField:
    """Survival probabilities ``s_n(x) = 1 - e_n(x)`` over the box."""
    _check(field, n, budget)
    K = _mask(field, n)
    if log_space:
        v = np.zeros(K.shape)
        for _ in range(n):
            with np.errstate(divide="ignore"):
                g = np.where(K, v, v + np.log(survival_ratio(law, np.exp(v))))
            _average(g, v, True)
    else:
        v = np.ones(K.shape)
        for _ in range(n):
            g = np.where(K, v, survival_map(law, v))
            _average(g, v, False)
    return DPField(n, v, SURVIVAL_S, log_space)


def extinction_field(field: ObstacleField, law: OffspringLaw, n: int, budget: int = DEFAULT_MEMORY_BUDGET) -> DPField:
    """Extinction probabilities ``e_k(x)`` by the direct recursion ``e <- avg(K ? e : phi(e))``."""
    from .offspring import pgf_array

    _check(field, n, budget)
    K = _mask(field, n)
    v = np.zeros(K.shape)
    for _ in range(n):
        g = np.where(K, v, pgf_array(law, v))
        _average(g, v, False)
    return DPField(n, v, EXTINCTION_E, False)


def expected_population(field: ObstacleField, law: OffspringLaw, n: int, budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    """``E^omega |Z_n|`` for one particle started at the origin (many-to-one)."""
    return multiplicative_functional(field, n, law.mean, 1.0, False, budget).at_origin()


def log_expected_population(field: ObstacleField, law: OffspringLaw, n: int, budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    return multiplicative_functional(field, n, law.mean, 1.0, True, budget).at_origin()


def survival_exact(field: ObstacleField, law: OffspringLaw, n: int, budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    """Quenched survival probability ``P^omega(|Z_n| >= 1)``."""
    return survival_field(field, law, n, False, budget).at_origin()


def log_survival_exact(field: ObstacleField, law: OffspringLaw, n: int, budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    """``log P^omega(S_n)`` computed entirely in log space."""
    return survival_field(field, law, n, True, budget).at_origin()


def _check_mu(mu: float) -> None:
    if not (0.0 < mu <= 1.0):
        raise ValidationError(f"soft-killing survival parameter must lie in (0, 1], got {mu}")


def dv_exact(field: ObstacleField, mu: float, n: int, budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    """Probability that a walker killed with probability ``1 - mu`` at each vacant visit survives ``n`` steps."""
    _check_mu(mu)
    return multiplicative_functional(field, n, mu, 1.0, False, budget).at_origin()


def log_dv_exact(field: ObstacleField, mu: float, n: int, budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    _check_mu(mu)
    return multiplicative_functional(field, n, mu, 1.0, True, budget).at_origin()


def expected_occupation(field: ObstacleField, n: int, budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    """``E[T_n]``, the mean number of vacant sites visited at steps ``1..n``.

    This is the derivative of ``dv_exact`` in ``mu`` at ``mu = 1``.
    """
    _check(field, n, budget)
    vac = (~_mask(field, n)).astype(np.float64)
    v = np.zeros(vac.shape)
    for _ in range(n):
        _average(v + vac, v, False)
    return float(v[(n + 1,) * field.d])


@dataclass
class SandwichResult:
    lower: float
    exact: float
    upper: float
    holds: bool
    log_space: bool = False


def sandwich_check(field: ObstacleField, law: OffspringLaw, n: int, log_space: bool = False,
                   budget: int = DEFAULT_MEMORY_BUDGET, recursions=None) -> SandwichResult:
    """``DV(mu*) <= P(S_n) <= DV(mu)`` with ``mu* = 1 - p_0`` and ``mu`` the mean.

    ``recursions`` may supply replacement ``dv_exact`` / ``survival_exact``
    callables (used to inject faults in tests).  In log space the three
    values are logs and the slack is applied relative to the upper end.
    """
    if law.is_critical:
        raise ValidationError("the sandwich bound concerns subcritical laws")
    mu_star = law.mu_star
    if not (0.0 < mu_star < 1.0):
        raise ValidationError(f"need 0 < 1 - p_0 < 1, got {mu_star}")
    if log_space:
        lo = log_dv_exact(field, mu_star, n, budget)
        ex = log_survival_exact(field, law, n, budget)
        hi = log_dv_exact(field, law.mean, n, budget)
        slack = SANDWICH_SLACK * max(1.0, abs(hi))
    else:
        dv = getattr(recursions, "dv_exact", dv_exact)
        surv = getattr(recursions, "survival_exact", survival_exact)
        lo = dv(field, mu_star, n)
        ex = surv(field, law, n)
        hi = dv(field, law.mean, n)
        slack = SANDWICH_SLACK
    holds = (lo <= ex + slack) and (ex <= hi + slack)
    return SandwichResult(lo, ex, hi, bool(holds), log_space)

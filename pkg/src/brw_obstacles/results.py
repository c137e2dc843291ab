"""Result records shared by the estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

DIRECT_MC = "DIRECT_MC"
SPINE_IS = "SPINE_IS"
EXACT_DP = "EXACT_DP"
METHODS = (DIRECT_MC, SPINE_IS, EXACT_DP)


@dataclass
class SurvivalEstimate:
    """Point estimate with its standard error.

    ``estimate`` is a probability for survival estimators and a positive real
    for expectations.  ``log_estimate`` is set by log-space exact
    computations whose value may underflow.  A nonzero ``truncated_count``
    means some replicas hit the population cap; those replicas are counted as
    survivors, so the estimate is biased upward by at most
    ``truncated_count / replicates``.
    """

    estimate: float
    stderr: float
    replicates: int
    method: str
    metadata: dict = field(default_factory=dict)
    truncated_count: int = 0
    log_estimate: Optional[float] = None

    @property
    def flagged(self) -> bool:
        return self.truncated_count > 0

    def within(self, value: float, k: float = 3.0) -> bool:
        """True when ``value`` lies within ``k`` standard errors."""
        return abs(self.estimate - value) <= k * self.stderr


def mean_estimate(values: np.ndarray, method: str, metadata: Optional[dict] = None, truncated: int = 0) -> SurvivalEstimate:
    """Sample mean and its standard error, summed in index order."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    mean = float(np.sum(values) / n)
    if n > 1:
        var = float(np.sum((values - mean) ** 2) / (n - 1))
        se = math.sqrt(var / n)
    else:
        se = 0.0
    return SurvivalEstimate(mean, se, n, method, dict(metadata or {}), truncated)


def exact(value: float, method: str = EXACT_DP, metadata: Optional[dict] = None, log_value: Optional[float] = None) -> SurvivalEstimate:
    return SurvivalEstimate(float(value), 0.0, 1, method, dict(metadata or {}), 0, log_value)


def proportion_estimate(successes: int, n: int, method: str, metadata: Optional[dict] = None, truncated: int = 0) -> SurvivalEstimate:
    """Binomial proportion with standard error ``sqrt(p(1-p)/n)``."""
    p = successes / n
    return SurvivalEstimate(p, math.sqrt(p * (1.0 - p) / n), n, method, dict(metadata or {}), truncated)

"""Normalised survival statistics across a horizon grid.

Critical:    c_n = n q P(S_n) / 2, which tends to 1.
Subcritical: a_n = -log P(S_n);  r_n = a_n (log n)^(2/d) / n.

Only finite-n sequences and trend verdicts are reported; no limiting constant
is claimed for the subcritical rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

NON_SPATIAL_RTOL = 1e-9


@dataclass
class ScalingFit:
    kind: str
    ns: np.ndarray
    values: np.ndarray
    extra: dict = field(default_factory=dict)
    verdict: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.ns.tolist(),
            "values": self.values.tolist(),
            **{k: np.asarray(v).tolist() for k, v in self.extra.items()},
            "verdict": self.verdict,
        }


def _log_of(row) -> float:
    if math.isfinite(row.log_estimate):
        return row.log_estimate
    return math.log(row.estimate) if row.estimate > 0 else -math.inf


def series(rows, method: str, env_seed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(n, estimate, log_estimate)`` for one method and environment, sorted by n."""
    sel = sorted((r for r in rows if r.method == method and str(r.env_seed) == str(env_seed) and r.status == "ok"),
                 key=lambda r: r.n)
    ns = np.array([r.n for r in sel], dtype=np.int64)
    est = np.array([r.estimate for r in sel], dtype=np.float64)
    log_est = np.array([_log_of(r) for r in sel], dtype=np.float64)
    return ns, est, log_est


def fit_critical_constant(ns: Sequence[int], survival: Sequence[float], q: float) -> ScalingFit:
    ns = np.asarray(ns, dtype=np.float64)
    surv = np.asarray(survival, dtype=np.float64)
    if ns.size == 0:
        raise ValueError("empty horizon grid")
    c = ns * q * surv / 2.0
    dev = np.abs(c - 1.0)
    verdict = {
        "c_at_largest_n": float(c[-1]),
        "deviation_at_largest_n": float(dev[-1]),
        "deviation_shrinks": bool(dev[-1] <= dev[0]),
        "deviation_nonincreasing": bool(np.all(np.diff(dev) <= 0)),
    }
    return ScalingFit("critical", ns.astype(np.int64), c, {"deviation": dev}, verdict)


def fit_subcritical_rate(ns: Sequence[int], log_survival: Sequence[float], d: int) -> ScalingFit:
    """Rates from ``log P(S_n)`` values (log space avoids underflow)."""
    ns = np.asarray(ns, dtype=np.float64)
    a = -np.asarray(log_survival, dtype=np.float64)
    if ns.size == 0:
        raise ValueError("empty horizon grid")
    per_step = a / ns
    r = a * np.log(ns) ** (2.0 / d) / ns
    spread = float((per_step.max() - per_step.min()) / max(abs(per_step.mean()), 1e-300))
    verdict = {
        "a_over_n_strictly_decreasing": bool(np.all(np.diff(per_step) < 0)),
        "a_over_n_ratio_last_first": float(per_step[-1] / per_step[0]),
        "non_spatial_profile": bool(spread <= NON_SPATIAL_RTOL),
        "rate_at_largest_n": float(r[-1]),
    }
    return ScalingFit("subcritical", ns.astype(np.int64), r, {"a_over_n": per_step}, verdict)


def fit_rows(rows, method: str, env_seed, q: Optional[float] = None, d: Optional[int] = None, critical: bool = True) -> ScalingFit:
    ns, est, log_est = series(rows, method, env_seed)
    if critical:
        return fit_critical_constant(ns, est, q)
    return fit_subcritical_rate(ns, log_est, d)

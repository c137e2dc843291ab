"""Size-biased branching random walk with a distinguished spine.

The spine performs a simple random walk.  Each time it lands on a vacant
site it splits according to the size-biased law; one child (uniform) carries
the spine on, the others launch ordinary BRW bushes whose sizes at the
horizon are added to ``|Z_n|``.  Under this law ``1/|Z_n|`` is an unbiased
estimator of the survival probability.

Ordering: at a fission with ``k`` children the children get a uniformly
random left-to-right order.  The spine child's rank ``r`` is uniform, so the
first ``r`` siblings are the bushes to its left.  The spine is the leftmost
particle at time ``n`` exactly when every left bush is extinct by then.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numba as nb
import numpy as np

from . import exact_dp, rng
from .brw_sim import DEFAULT_CAP, _INITIAL_CAPACITY, run_brw
from .environment import ObstacleField, site_is_obstacle
from .errors import ValidationError
from .offspring import OffspringLaw, critical_binary, draw, size_biased
from .parallel import run_chunks
from .results import SPINE_IS, SurvivalEstimate, mean_estimate

MIN_ACCEPTED = 100


@dataclass
class SpineRealization:
    spine_path: np.ndarray
    vacant_visit_count: int
    total_population: int
    truncated: bool = False
    leftmost: Optional[bool] = None
    labels: list = dc_field(default_factory=list)

    @property
    def weight(self) -> float:
        return 1.0 / self.total_population

    @property
    def vacant_times(self) -> np.ndarray:
        """Times ``1 <= j <= n`` at which the spine sat on a vacant site."""
        return np.array([lab[0] for lab in self.labels], dtype=np.int64) if self.labels else np.zeros(0, dtype=np.int64)


@nb.njit(cache=True, nogil=True)
def _spine_run(n, key, thr, values, cdf, maxk, sb_values, sb_cdf, cap, state, cur, nxt,
               with_bushes, path, marks):
    """One spine replica.

    ``path`` is ``(n + 1, d)`` and receives the spine positions.  ``marks``
    is ``(n, 3)``; row ``j - 1`` holds ``(vacant, k, rank)`` for the fission at
    time ``j`` (zeros when the site is an obstacle).  Without bushes no
    branching randomness is drawn, so the path consumes exactly one draw per
    step, like a plain walker.

    Returns ``(L_n, |Z_n|, leftmost, truncated, cur, nxt)``.
    """
    d = path.shape[1]
    pos = np.zeros(d, dtype=np.int64)
    for a in range(d):
        path[0, a] = 0
    vacant_visits = 0
    total = 1
    leftmost = True
    truncated = False
    checkpoint = np.zeros(1, dtype=np.int64)
    bush_size = np.zeros(1, dtype=np.int64)
    two_d = 2 * d
    for j in range(1, n + 1):
        direction = rng.next_below(state, two_d)
        if direction & 1:
            pos[direction >> 1] -= 1
        else:
            pos[direction >> 1] += 1
        for a in range(d):
            path[j, a] = pos[a]
        marks[j - 1, 0] = 0
        marks[j - 1, 1] = 0
        marks[j - 1, 2] = 0
        if site_is_obstacle(key, thr, pos):
            continue
        vacant_visits += 1
        marks[j - 1, 0] = 1
        if not with_bushes:
            continue
        k = draw(sb_values, sb_cdf, state)
        rank = rng.next_below(state, k) if k > 1 else 0
        marks[j - 1, 1] = k
        marks[j - 1, 2] = rank
        checkpoint[0] = n - j
        for sib in range(k - 1):
            if truncated:
                break
            tr, cur, nxt = run_brw(pos, n - j, checkpoint, bush_size, key, thr, values, cdf, maxk, cap,
                                   state, cur, nxt)
            if tr:
                truncated = True
            total += bush_size[0]
            if sib < rank and bush_size[0] > 0:
                leftmost = False
            if total > cap:
                truncated = True
    return vacant_visits, total, leftmost, truncated, cur, nxt


@nb.njit(cache=True, nogil=True)
def _spine_chunk(first, seed, n, d, key, thr, values, cdf, maxk, sb_values, sb_cdf, cap, with_bushes,
                 vacant_out, total_out, left_out, trunc_out, end_out):
    cur = np.empty((_INITIAL_CAPACITY, d), dtype=np.int64)
    nxt = np.empty((_INITIAL_CAPACITY, d), dtype=np.int64)
    path = np.empty((n + 1, d), dtype=np.int64)
    marks = np.empty((max(n, 1), 3), dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    for r in range(vacant_out.shape[0]):
        state[0] = rng.stream_key(seed, np.uint64(first + r))
        lv, tot, left, tr, cur, nxt = _spine_run(n, key, thr, values, cdf, maxk, sb_values, sb_cdf, cap, state,
                                                 cur, nxt, with_bushes, path, marks)
        vacant_out[r] = lv
        total_out[r] = tot
        left_out[r] = left
        trunc_out[r] = tr
        for a in range(d):
            end_out[r, a] = path[n, a]


def _require_critical(law: OffspringLaw) -> None:
    if not law.is_critical:
        raise ValidationError("spine machinery is implemented for critical laws only")


def _args(field: ObstacleField, law: OffspringLaw):
    values, cdf = law.arrays()
    sb_values, sb_cdf = size_biased(law).arrays()
    return field.key, float(field.threshold), values, cdf, int(law.max_offspring), sb_values, sb_cdf


def run_spine(field: ObstacleField, law: OffspringLaw, n: int, stream: np.ndarray, track_labels: bool = False,
              with_bushes: bool = True, cap: int = DEFAULT_CAP) -> SpineRealization:
    """One realization of the size-biased BRW up to time ``n``."""
    _require_critical(law)
    if n < 0:
        raise ValidationError("horizon must be nonnegative")
    key, thr, values, cdf, maxk, sb_values, sb_cdf = _args(field, law)
    d = field.d
    path = np.empty((n + 1, d), dtype=np.int64)
    marks = np.zeros((max(n, 1), 3), dtype=np.int64)
    cur = np.empty((_INITIAL_CAPACITY, d), dtype=np.int64)
    nxt = np.empty((_INITIAL_CAPACITY, d), dtype=np.int64)
    lv, total, left, tr, _, _ = _spine_run(int(n), key, thr, values, cdf, maxk, sb_values, sb_cdf, int(cap), stream,
                                           cur, nxt, bool(with_bushes), path, marks)
    labels = []
    if track_labels:
        labels = [(j + 1, int(marks[j, 1]), int(marks[j, 2])) for j in range(n) if marks[j, 0]]
    return SpineRealization(path, int(lv), int(total), bool(tr), bool(left) if track_labels else None, labels)


@dataclass
class SpineSample:
    vacant_visits: np.ndarray
    total_population: np.ndarray
    leftmost: np.ndarray
    truncated: np.ndarray
    endpoints: np.ndarray
    n: int
    cap: int

    @property
    def weights(self) -> np.ndarray:
        """``1 / |Z_n|``; truncated replicas contribute ``1 / cap``."""
        w = 1.0 / self.total_population.astype(np.float64)
        w[self.truncated] = 1.0 / self.cap
        return w


def simulate_spines(field: ObstacleField, law: OffspringLaw, n: int, replicates: int, master_seed: int,
                    workers: int = 1, with_bushes: bool = True, cap: int = DEFAULT_CAP) -> SpineSample:
    _require_critical(law)
    if replicates < 1:
        raise ValidationError("replicates must be at least 1")
    if n < 0:
        raise ValidationError("horizon must be nonnegative")
    key, thr, values, cdf, maxk, sb_values, sb_cdf = _args(field, law)
    d = field.d
    vac = np.zeros(replicates, dtype=np.int64)
    tot = np.zeros(replicates, dtype=np.int64)
    left = np.zeros(replicates, dtype=np.bool_)
    trunc = np.zeros(replicates, dtype=np.bool_)
    ends = np.zeros((replicates, d), dtype=np.int64)
    seed = np.uint64(master_seed)

    def job(first, count):
        sl = slice(first, first + count)
        _spine_chunk(first, seed, int(n), d, key, thr, values, cdf, maxk, sb_values, sb_cdf, int(cap),
                     bool(with_bushes), vac[sl], tot[sl], left[sl], trunc[sl], ends[sl])

    run_chunks(replicates, job, workers, chunk=256)
    return SpineSample(vac, tot, left, trunc, ends, int(n), int(cap))


def estimate_survival_is(field: ObstacleField, law: OffspringLaw, n: int, replicates: int, master_seed: int,
                         workers: int = 1, cap: int = DEFAULT_CAP) -> SurvivalEstimate:
    """Importance-sampling survival estimate: mean of ``1/|Z_n|`` under the size-biased law."""
    sample = simulate_spines(field, law, n, replicates, master_seed, workers, True, cap)
    meta = field.metadata()
    meta.update({"n": int(n), "law_id": law.law_id, "replica_seed": int(master_seed),
                 "seed_scheme": "splitmix64-stream(seed,replica)"})
    return mean_estimate(sample.weights, SPINE_IS, meta, int(sample.truncated.sum()))


@dataclass
class OccupationStats:
    mean: float
    stddev: float
    tail_fraction: float
    eps: float
    q: float
    replicates: int


def occupation_frequency_stats(field: ObstacleField, n: int, replicates: int, master_seed: int, eps: float = 0.1,
                               workers: int = 1) -> OccupationStats:
    """Statistics of ``L_n / n`` along the spine.

    The spine's motion does not depend on the bushes, so they are not
    simulated here.  With bushes off the spine consumes its stream exactly as
    :func:`brw_obstacles.walker.srw_occupation` does, hence matched seeds give
    identical visit counts.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    sample = simulate_spines(field, critical_binary(), n, replicates, master_seed, workers, with_bushes=False)
    frac = sample.vacant_visits / n
    sd = float(np.std(frac, ddof=1)) if replicates > 1 else 0.0
    tail = float(np.mean(np.abs(frac - field.q) > eps))
    return OccupationStats(float(np.mean(frac)), sd, tail, eps, field.q, replicates)


@dataclass
class ConditionalCheck:
    is_estimate: float
    stderr: float
    dp_value: float
    accepted: int
    replicates: int
    agree: Optional[bool]
    status: str

    def __str__(self) -> str:
        return (f"E*(|Z_n| | A_n) = {self.is_estimate:.6g} +- {self.stderr:.3g} vs DP {self.dp_value:.6g} "
                f"({self.accepted}/{self.replicates} accepted, {self.status})")


def conditional_population_check(field: ObstacleField, law: OffspringLaw, n: int, replicates: int, master_seed: int,
                                 workers: int = 1, k: float = 3.0) -> ConditionalCheck:
    """Compare ``E*(|Z_n| | spine leftmost)`` by rejection with ``E|Z_n| / P(S_n)`` from the DP.

    Fewer than ``MIN_ACCEPTED`` accepted replicas gives status
    ``"inconclusive"`` and ``agree = None``.
    """
    _require_critical(law)
    dp_value = exact_dp.expected_population(field, law, n) / exact_dp.survival_exact(field, law, n)
    if n == 0:
        return ConditionalCheck(1.0, 0.0, dp_value, replicates, replicates, True, "pass")
    sample = simulate_spines(field, law, n, replicates, master_seed, workers, True)
    kept = sample.total_population[sample.leftmost & ~sample.truncated].astype(np.float64)
    accepted = int(kept.size)
    if accepted < MIN_ACCEPTED:
        est = float(kept.mean()) if accepted else math.nan
        return ConditionalCheck(est, math.nan, dp_value, accepted, replicates, None, "inconclusive")
    mean = float(kept.mean())
    se = float(kept.std(ddof=1) / math.sqrt(accepted))
    agree = abs(mean - dp_value) <= k * se
    return ConditionalCheck(mean, se, dp_value, accepted, replicates, bool(agree), "pass" if agree else "fail")

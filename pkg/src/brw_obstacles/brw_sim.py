"""Forward simulation of the branching random walk among obstacles.

Each generation every particle jumps to a uniform nearest neighbour.  On a
vacant site it is replaced by an offspring count drawn from the law; on an
obstacle nothing happens.  Positions live in flat ``(capacity, d)`` buffers
that are swapped between generations and doubled on demand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from . import rng
from .environment import ObstacleField, site_is_obstacle
from .errors import ValidationError
from .offspring import OffspringLaw, draw
from .parallel import run_chunks
from .results import DIRECT_MC, SurvivalEstimate, mean_estimate, proportion_estimate

DEFAULT_CAP = 10**7
_INITIAL_CAPACITY = 256


@dataclass
class Population:
    generation: int
    positions: np.ndarray
    truncated: bool = False

    @property
    def size(self) -> int:
        return int(self.positions.shape[0])

    @property
    def d(self) -> int:
        return int(self.positions.shape[1])

    @classmethod
    def founder(cls, d: int, site=None) -> "Population":
        pos = np.zeros((1, d), dtype=np.int64)
        if site is not None:
            pos[0] = np.asarray(site, dtype=np.int64)
        return cls(0, pos)


@dataclass
class ReplicaOutcome:
    survived: bool
    final_size: int
    truncated: bool = False


# -- kernels ---------------------------------------------------------------


@nb.njit(cache=True, nogil=True)
def _step(cur, count, nxt, tmp, key, thr, values, cdf, maxk, state):
    """One generation; returns ``(new_count, nxt)`` with ``nxt`` possibly regrown."""
    d = cur.shape[1]
    two_d = 2 * d
    m = 0
    for i in range(count):
        if m + maxk > nxt.shape[0]:
            grown = np.empty((2 * nxt.shape[0] + maxk, d), dtype=np.int64)
            grown[:m] = nxt[:m]
            nxt = grown
        direction = rng.next_below(state, two_d)
        for a in range(d):
            tmp[a] = cur[i, a]
        if direction & 1:
            tmp[direction >> 1] -= 1
        else:
            tmp[direction >> 1] += 1
        if site_is_obstacle(key, thr, tmp):
            k = 1
        else:
            k = draw(values, cdf, state)
        for _ in range(k):
            for a in range(d):
                nxt[m, a] = tmp[a]
            m += 1
    return m, nxt


@nb.njit(cache=True, nogil=True)
def run_brw(x0, horizon, checkpoints, sizes_out, key, thr, values, cdf, maxk, cap, state, cur, nxt):
    """Run one BRW from ``x0`` for ``horizon`` generations.

    ``sizes_out[j]`` receives the population at generation ``checkpoints[j]``
    (sorted, each ``<= horizon``).  Returns ``(truncated, cur, nxt)`` so the
    caller can keep the grown buffers.
    """
    d = x0.shape[0]
    tmp = np.empty(d, dtype=np.int64)
    for a in range(d):
        cur[0, a] = x0[a]
    count = 1
    nc = checkpoints.shape[0]
    ci = 0
    while ci < nc and checkpoints[ci] == 0:
        sizes_out[ci] = 1
        ci += 1
    truncated = False
    for t in range(1, horizon + 1):
        if count == 0:
            break
        count, nxt = _step(cur, count, nxt, tmp, key, thr, values, cdf, maxk, state)
        cur, nxt = nxt, cur
        if count > cap:
            truncated = True
            break
        while ci < nc and checkpoints[ci] == t:
            sizes_out[ci] = count
            ci += 1
    while ci < nc:
        sizes_out[ci] = count
        ci += 1
    return truncated, cur, nxt


@nb.njit(cache=True, nogil=True)
def _brw_chunk(first, sizes, truncated, seed, d, key, thr, values, cdf, maxk, cap, horizon, checkpoints):
    cur = np.empty((_INITIAL_CAPACITY, d), dtype=np.int64)
    nxt = np.empty((_INITIAL_CAPACITY, d), dtype=np.int64)
    x0 = np.zeros(d, dtype=np.int64)
    state = np.empty(1, dtype=np.uint64)
    for r in range(sizes.shape[0]):
        state[0] = rng.stream_key(seed, np.uint64(first + r))
        tr, cur, nxt = run_brw(x0, horizon, checkpoints, sizes[r], key, thr, values, cdf, maxk, cap, state, cur, nxt)
        truncated[r] = tr


@nb.njit(cache=True, nogil=True)
def _step_once(positions, key, thr, values, cdf, maxk, state):
    d = positions.shape[1]
    nxt = np.empty((max(positions.shape[0] * maxk, 1), d), dtype=np.int64)
    tmp = np.empty(d, dtype=np.int64)
    m, nxt = _step(positions, positions.shape[0], nxt, tmp, key, thr, values, cdf, maxk, state)
    return nxt[:m].copy()


# -- public API ------------------------------------------------------------


def _kernel_args(field: ObstacleField, law: OffspringLaw):
    values, cdf = law.arrays()
    return field.key, float(field.threshold), values, cdf, int(law.max_offspring)


def step(pop: Population, field: ObstacleField, law: OffspringLaw, stream: np.ndarray, cap: int = DEFAULT_CAP) -> Population:
    """Advance ``pop`` by one generation using the caller's stream."""
    if pop.positions.ndim != 2 or pop.d != field.d:
        raise ValidationError("population dimension does not match the field")
    if pop.size == 0:
        return Population(pop.generation + 1, pop.positions.copy(), pop.truncated)
    key, thr, values, cdf, maxk = _kernel_args(field, law)
    new = _step_once(np.ascontiguousarray(pop.positions, dtype=np.int64), key, thr, values, cdf, maxk, stream)
    return Population(pop.generation + 1, new, pop.truncated or new.shape[0] > cap)


def run_replica(field: ObstacleField, law: OffspringLaw, n: int, stream: np.ndarray, cap: int = DEFAULT_CAP) -> ReplicaOutcome:
    """Single BRW from the origin; reports survival of generation ``n``."""
    if n < 0:
        raise ValidationError("horizon must be nonnegative")
    key, thr, values, cdf, maxk = _kernel_args(field, law)
    d = field.d
    sizes = np.zeros(1, dtype=np.int64)
    cur = np.empty((_INITIAL_CAPACITY, d), dtype=np.int64)
    nxt = np.empty((_INITIAL_CAPACITY, d), dtype=np.int64)
    truncated, _, _ = run_brw(
        np.zeros(d, dtype=np.int64), int(n), np.array([n], dtype=np.int64), sizes,
        key, thr, values, cdf, maxk, int(cap), stream, cur, nxt,
    )
    size = int(sizes[0])
    return ReplicaOutcome(survived=size >= 1 or bool(truncated), final_size=size, truncated=bool(truncated))


def simulate_sizes(field: ObstacleField, law: OffspringLaw, horizons, replicates: int, master_seed: int,
                   workers: int = 1, cap: int = DEFAULT_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Population sizes of ``replicates`` independent BRWs at each horizon.

    All horizons are read off the same runs.  Replica ``i`` uses the stream
    ``stream_key(master_seed, i)``, so results are independent of ``workers``.

    Returns ``(sizes, truncated)`` with shapes ``(replicates, len(horizons))``
    and ``(replicates,)``.
    """
    horizons = np.asarray(horizons, dtype=np.int64).reshape(-1)
    if replicates < 1:
        raise ValidationError("replicates must be at least 1")
    if horizons.size == 0 or np.any(horizons < 0):
        raise ValidationError("horizons must be nonnegative")
    order = np.argsort(horizons, kind="stable")
    checkpoints = horizons[order]
    key, thr, values, cdf, maxk = _kernel_args(field, law)
    sizes = np.zeros((replicates, horizons.size), dtype=np.int64)
    truncated = np.zeros(replicates, dtype=np.bool_)
    seed = np.uint64(master_seed)

    def job(first, count):
        _brw_chunk(first, sizes[first:first + count], truncated[first:first + count], seed, field.d,
                   key, thr, values, cdf, maxk, int(cap), int(checkpoints[-1]), checkpoints)

    run_chunks(replicates, job, workers)
    out = np.empty_like(sizes)
    out[:, order] = sizes
    return out, truncated


def _metadata(field, law, n, master_seed):
    meta = field.metadata()
    meta.update({"n": int(n), "law_id": law.law_id, "replica_seed": int(master_seed), "seed_scheme": "splitmix64-stream(seed,replica)"})
    return meta


def survival_curve_mc(field, law, horizons, replicates, master_seed, workers=1, cap=DEFAULT_CAP) -> list[SurvivalEstimate]:
    """Direct Monte Carlo survival estimates, one per horizon, from shared runs."""
    sizes, truncated = simulate_sizes(field, law, horizons, replicates, master_seed, workers, cap)
    n_trunc = int(truncated.sum())
    out = []
    for j, n in enumerate(np.asarray(horizons).reshape(-1)):
        alive = int(np.count_nonzero((sizes[:, j] > 0) | truncated))
        out.append(proportion_estimate(alive, replicates, DIRECT_MC, _metadata(field, law, n, master_seed), n_trunc))
    return out


def estimate_survival_mc(field: ObstacleField, law: OffspringLaw, n: int, replicates: int, master_seed: int,
                         workers: int = 1, cap: int = DEFAULT_CAP) -> SurvivalEstimate:
    """Fraction of surviving replicas at generation ``n`` with binomial standard error.

    Truncated replicas are counted as survivors and reported in
    ``truncated_count``.
    """
    return survival_curve_mc(field, law, [n], replicates, master_seed, workers, cap)[0]


def estimate_mean_population_mc(field: ObstacleField, law: OffspringLaw, n: int, replicates: int, master_seed: int,
                                workers: int = 1, cap: int = DEFAULT_CAP) -> SurvivalEstimate:
    """Sample mean of ``|Z_n|``."""
    sizes, truncated = simulate_sizes(field, law, [n], replicates, master_seed, workers, cap)
    return mean_estimate(sizes[:, 0], DIRECT_MC, _metadata(field, law, n, master_seed), int(truncated.sum()))

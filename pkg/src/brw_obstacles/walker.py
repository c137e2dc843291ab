"""Single-walker tools: vacant-site occupation time and soft killing."""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from . import rng
from .environment import ObstacleField, site_is_obstacle
from .errors import ValidationError
from .parallel import run_chunks
from .results import DIRECT_MC, SurvivalEstimate, mean_estimate, proportion_estimate


@dataclass
class WalkOutcome:
    occupation: int
    survived_soft_kill: bool = True


@nb.njit(cache=True, nogil=True)
def _walk(n, key, thr, mu, soft_kill, state, pos):
    """Walk ``n`` steps from the origin; returns ``(T_n, survived)``.

    Exactly one draw per step, plus one kill draw per vacant visit when
    ``soft_kill`` is set.  The kill draw keeps being made after death so the
    path does not depend on ``mu``.
    """
    d = pos.shape[0]
    for a in range(d):
        pos[a] = 0
    two_d = 2 * d
    visits = 0
    alive = True
    for _ in range(n):
        direction = rng.next_below(state, two_d)
        if direction & 1:
            pos[direction >> 1] -= 1
        else:
            pos[direction >> 1] += 1
        if not site_is_obstacle(key, thr, pos):
            visits += 1
            if soft_kill:
                if rng.next_uniform(state) >= mu:
                    alive = False
    return visits, alive


@nb.njit(cache=True, nogil=True)
def _walk_chunk(first, seed, n, d, key, thr, mu, soft_kill, visits_out, alive_out):
    state = np.empty(1, dtype=np.uint64)
    pos = np.empty(d, dtype=np.int64)
    for r in range(visits_out.shape[0]):
        state[0] = rng.stream_key(seed, np.uint64(first + r))
        v, a = _walk(n, key, thr, mu, soft_kill, state, pos)
        visits_out[r] = v
        alive_out[r] = a


def srw_occupation(field: ObstacleField, n: int, stream: np.ndarray) -> WalkOutcome:
    """Number of vacant sites among ``X_1..X_n`` for a walk from the origin."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    v, _ = _walk(int(n), field.key, float(field.threshold), 1.0, False, stream, np.empty(field.d, dtype=np.int64))
    return WalkOutcome(int(v), True)


def simulate_walks(field: ObstacleField, n: int, replicates: int, master_seed: int, mu: float = 1.0,
                   soft_kill: bool = False, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Occupation times and soft-kill survival flags of independent walks."""
    if replicates < 1:
        raise ValidationError("replicates must be at least 1")
    visits = np.zeros(replicates, dtype=np.int64)
    alive = np.ones(replicates, dtype=np.bool_)
    seed = np.uint64(master_seed)
    key, thr = field.key, float(field.threshold)

    def job(first, count):
        sl = slice(first, first + count)
        _walk_chunk(first, seed, int(n), field.d, key, thr, float(mu), bool(soft_kill), visits[sl], alive[sl])

    run_chunks(replicates, job, workers, chunk=4096)
    return visits, alive


def _meta(field, n, master_seed, **extra):
    meta = field.metadata()
    meta.update({"n": int(n), "replica_seed": int(master_seed), "seed_scheme": "splitmix64-stream(seed,replica)"})
    meta.update(extra)
    return meta


def tail_probability_estimate(field: ObstacleField, n: int, eps: float, replicates: int, master_seed: int,
                              workers: int = 1) -> SurvivalEstimate:
    """Fraction of walks with ``|T_n/n - q| > eps``."""
    if not eps > 0:
        raise ValidationError("eps must be positive")
    if n < 1:
        raise ValidationError("n must be at least 1")
    visits, _ = simulate_walks(field, n, replicates, master_seed, workers=workers)
    hits = int(np.count_nonzero(np.abs(visits / n - field.q) > eps))
    return proportion_estimate(hits, replicates, DIRECT_MC, _meta(field, n, master_seed, eps=eps))


def _check_mu(mu):
    if not (0.0 < mu <= 1.0):
        raise ValidationError(f"mu must lie in (0, 1], got {mu}")


def soft_kill_estimates(field: ObstacleField, mu: float, n: int, replicates: int, master_seed: int,
                        workers: int = 1) -> dict:
    """Both soft-kill estimators from the same walks.

    ``"kill"`` is the fraction of walks never killed; ``"weighted"`` is the
    mean of ``mu**T_n`` (conditional expectation of the kill indicator given
    the path, hence never larger in variance).
    """
    _check_mu(mu)
    visits, alive = simulate_walks(field, n, replicates, master_seed, mu, True, workers)
    kill = proportion_estimate(int(alive.sum()), replicates, DIRECT_MC, _meta(field, n, master_seed, mu=mu, estimator="kill"))
    weighted = mean_estimate(np.power(float(mu), visits), DIRECT_MC, _meta(field, n, master_seed, mu=mu, estimator="weighted"))
    return {"kill": kill, "weighted": weighted}


def soft_kill_survival_mc(field: ObstacleField, mu: float, n: int, replicates: int, master_seed: int,
                          workers: int = 1) -> SurvivalEstimate:
    """Survival of a walker killed with probability ``1 - mu`` at each vacant visit.

    Returns the ``mu**T_n`` average; the raw kill-simulation figures are kept
    in ``metadata["kill_estimate"]`` and ``metadata["kill_stderr"]``.
    """
    both = soft_kill_estimates(field, mu, n, replicates, master_seed, workers)
    out = both["weighted"]
    out.metadata["kill_estimate"] = both["kill"].estimate
    out.metadata["kill_stderr"] = both["kill"].stderr
    return out

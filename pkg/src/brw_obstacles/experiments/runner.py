"""Survival-curve runs and their CSV/JSON outputs."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .. import __version__, brw_sim, exact_dp, rng, spine
from ..errors import CapacityError
from ..results import DIRECT_MC, EXACT_DP, SPINE_IS
from .config import ExperimentConfig

ENV_MEAN = "mean"
SEED_SCHEME = "splitmix64-stream(derive(seed,experiment_id,method,env_index),replica)"


@dataclass
class ResultRow:
    n: int
    method: str
    estimate: float
    stderr: float
    replicates: int
    truncated_count: int
    env_seed: str
    p: float
    d: int
    law_id: str
    wall_time_s: float
    q: float = 0.0
    log_estimate: float = math.nan
    replica_seed: str = ""
    seed_scheme: str = SEED_SCHEME
    hash_scheme: str = rng.HASH_SCHEME
    experiment_id: str = ""
    config_hash: str = ""
    version: str = __version__
    status: str = "ok"


COLUMNS = [f.name for f in fields(ResultRow)]
_TYPES = {f.name: f.type for f in fields(ResultRow)}


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row(cfg: ExperimentConfig, n, method, est, se, reps, trunc, env_seed, wall, log_est=math.nan, replica_seed="", status="ok"):
    return ResultRow(
        n=int(n), method=method, estimate=float(est), stderr=float(se), replicates=int(reps),
        truncated_count=int(trunc), env_seed=str(env_seed), p=cfg.p, d=cfg.d, law_id=cfg.law.law_id,
        wall_time_s=round(float(wall), 6), q=cfg.q, log_estimate=float(log_est), replica_seed=str(replica_seed),
        experiment_id=cfg.experiment_id, config_hash=cfg.content_hash, status=status,
    )


def _exact_rows(cfg, field, env_seed):
    rows = []
    for n in cfg.horizons:
        t0 = time.perf_counter()
        try:
            if cfg.log_space:
                log_p = exact_dp.log_survival_exact(field, cfg.law, n, cfg.memory_budget)
                p = math.exp(log_p)
            else:
                p = exact_dp.survival_exact(field, cfg.law, n, cfg.memory_budget)
                log_p = math.log(p) if p > 0 else -math.inf
            rows.append(_row(cfg, n, EXACT_DP, p, 0.0, 1, 0, env_seed, time.perf_counter() - t0, log_p))
        except CapacityError:
            rows.append(_row(cfg, n, EXACT_DP, math.nan, math.nan, 0, 0, env_seed, time.perf_counter() - t0,
                             status="capacity_error"))
    return rows


def run_survival_curve(cfg: ExperimentConfig) -> list[ResultRow]:
    """One row per (environment, horizon, method), plus environment averages.

    Monte Carlo methods reuse one batch of replicas for every horizon.
    Rows are returned in canonical order: environment, method, horizon.
    """
    rows: list[ResultRow] = []
    for env_index, field in enumerate(cfg.fields()):
        env_seed = field.spec.master_seed
        for method in cfg.methods:
            if method == EXACT_DP:
                rows.extend(_exact_rows(cfg, field, env_seed))
            elif method == DIRECT_MC:
                seed = cfg.replica_seed(method, env_index)
                t0 = time.perf_counter()
                ests = brw_sim.survival_curve_mc(field, cfg.law, cfg.horizons, cfg.mc_replicates, seed, cfg.workers, cfg.cap)
                wall = time.perf_counter() - t0
                for n, e in zip(cfg.horizons, ests):
                    rows.append(_row(cfg, n, method, e.estimate, e.stderr, e.replicates, e.truncated_count,
                                     env_seed, wall, replica_seed=seed))
            elif method == SPINE_IS:
                if not cfg.law.is_critical:
                    continue
                seed = cfg.replica_seed(method, env_index)
                for n in cfg.horizons:
                    t0 = time.perf_counter()
                    e = spine.estimate_survival_is(field, cfg.law, n, cfg.is_replicates, seed, cfg.workers, cfg.cap)
                    rows.append(_row(cfg, n, method, e.estimate, e.stderr, e.replicates, e.truncated_count,
                                     env_seed, time.perf_counter() - t0, replica_seed=seed))
    if cfg.average and len(cfg.env_seeds) > 1:
        rows.extend(environment_average(cfg, rows))
    return rows


def environment_average(cfg: ExperimentConfig, rows: list[ResultRow]) -> list[ResultRow]:
    """Average over environments; stderr is the spread across environments."""
    out = []
    for method in cfg.methods:
        for n in cfg.horizons:
            sel = [r for r in rows if r.method == method and r.n == n and r.status == "ok" and r.env_seed != ENV_MEAN]
            if not sel:
                continue
            vals = np.array([r.estimate for r in sel])
            se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
            mean = float(np.sum(vals) / len(vals))
            out.append(_row(cfg, n, method, mean, se, sum(r.replicates for r in sel),
                            sum(r.truncated_count for r in sel), ENV_MEAN, sum(r.wall_time_s for r in sel),
                            math.log(mean) if mean > 0 else -math.inf))
    return out


# -- files -----------------------------------------------------------------


def output_paths(cfg: ExperimentConfig, out_dir) -> tuple[Path, Path]:
    stem = f"{cfg.experiment_id}-{cfg.kind}-{cfg.content_hash}"
    out = Path(out_dir)
    return out / f"{stem}.csv", out / f"{stem}.json"


def write_csv(rows: list[ResultRow], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for r in rows:
            writer.writerow([_fmt(getattr(r, c)) for c in COLUMNS])


def read_csv(path) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            kwargs = {}
            for c in COLUMNS:
                t = _TYPES[c]
                v = rec[c]
                kwargs[c] = int(v) if t in (int, "int") else float(v) if t in (float, "float") else v
            rows.append(ResultRow(**kwargs))
    return rows


def write_summary(summary: dict, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(summary, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "__dataclass_fields__"):
        return asdict(obj)
    raise TypeError(f"cannot serialise {type(obj)}")


def provenance(cfg: ExperimentConfig) -> dict:
    return {
        "experiment_id": cfg.experiment_id,
        "kind": cfg.kind,
        "config_hash": cfg.content_hash,
        "version": __version__,
        "seed": cfg.seed,
        "seed_scheme": SEED_SCHEME,
        "hash_scheme": rng.HASH_SCHEME,
        "d": cfg.d,
        "p": cfg.p,
        "q": cfg.q,
        "env_seeds": cfg.env_seeds,
        "law_masses": {str(k): v for k, v in cfg.law.masses.items()},
        "law_id": cfg.law.law_id,
    }


def survival_curve(cfg: ExperimentConfig, out_dir=None) -> tuple[list[ResultRow], bool]:
    """Run (or resume) a survival curve.

    When ``out_dir`` already holds the CSV for this config hash, the stored
    rows are returned and nothing is recomputed or appended.  Returns
    ``(rows, resumed)``.
    """
    if out_dir is not None:
        csv_path, json_path = output_paths(cfg, out_dir)
        if csv_path.exists():
            return read_csv(csv_path), True
    rows = run_survival_curve(cfg)
    if out_dir is not None:
        write_csv(rows, csv_path)
        write_summary({"provenance": provenance(cfg), "rows": len(rows)}, json_path)
    return rows, False

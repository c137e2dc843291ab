"""Experiment kinds beyond the plain survival curve."""

from __future__ import annotations

import numpy as np

from .. import brw_sim, environment, spine
from ..errors import CapacityError, ValidationError
from ..results import DIRECT_MC, EXACT_DP, SPINE_IS
from . import fits
from .config import ExperimentConfig
from .runner import ENV_MEAN, provenance, survival_curve


def _fit_method(cfg: ExperimentConfig, preferred: tuple) -> str:
    for m in preferred:
        if m in cfg.methods:
            return m
    raise ValidationError(f"none of {preferred} selected in methods")


def _require_rows(rows, method: str, env: str) -> None:
    """Raise when capacity errors left a fit with no usable rows."""
    sel = [r for r in rows if r.method == method and str(r.env_seed) == env]
    if sel and all(r.status == "capacity_error" for r in sel):
        raise CapacityError(f"every {method} row for environment {env} exceeded the memory budget")


def fit_critical(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Survival curve plus ``c_n = n q P(S_n) / 2`` per environment and for the average."""
    if not cfg.law.is_critical:
        raise ValidationError("fit-critical needs a critical law")
    rows, resumed = survival_curve(cfg, out_dir)
    out = {"provenance": provenance(cfg), "resumed": resumed, "fits": {}}
    envs = [str(s) for s in cfg.env_seeds] + ([ENV_MEAN] if cfg.average and len(cfg.env_seeds) > 1 else [])
    for method in cfg.methods:
        for env in envs:
            _require_rows(rows, method, env)
            ns, est, _ = fits.series(rows, method, env)
            if ns.size:
                out["fits"][f"{method}/{env}"] = fits.fit_critical_constant(ns, est, cfg.q).as_dict()
    per_env = [out["fits"].get(f"{_fit_method(cfg, (DIRECT_MC, EXACT_DP, SPINE_IS))}/{e}") for e in map(str, cfg.env_seeds)]
    per_env = [f for f in per_env if f]
    if per_env:
        first = np.mean([f["deviation"][0] for f in per_env])
        last = np.mean([f["deviation"][-1] for f in per_env])
        out["environment_averaged_deviation"] = {"first_n": float(first), "last_n": float(last),
                                                 "shrinks": bool(last <= first)}
    return out


def fit_subcritical(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Exact log-space survival and the ``a_n / n`` and ``r_n`` sequences."""
    if cfg.law.is_critical:
        raise ValidationError("fit-subcritical needs a subcritical law")
    rows, resumed = survival_curve(cfg, out_dir)
    out = {"provenance": provenance(cfg), "resumed": resumed, "fits": {}}
    method = _fit_method(cfg, (EXACT_DP, DIRECT_MC))
    for env in map(str, cfg.env_seeds):
        _require_rows(rows, method, env)
        ns, _, log_est = fits.series(rows, method, env)
        if ns.size:
            out["fits"][f"{method}/{env}"] = fits.fit_subcritical_rate(ns, log_est, cfg.d).as_dict()
    return out


def spine_stats(cfg: ExperimentConfig) -> dict:
    """Occupation frequency, conditional-law check and IS-vs-MC variance per environment.

    Also emits the empirical distribution of ``|Z_n| / n`` given survival as
    a diagnostic only.
    """
    law = cfg.law if cfg.law.is_critical else None
    if law is None:
        raise ValidationError("spine-stats needs a critical law")
    sp = cfg.spine
    out = {"provenance": provenance(cfg), "environments": {}}
    n_var = cfg.horizons[-1]
    for i, field in enumerate(cfg.fields()):
        env = {}
        occ = spine.occupation_frequency_stats(field, int(sp["occupation_n"]), int(sp["occupation_replicates"]),
                                               cfg.replica_seed("occupation", i), float(sp["eps"]), cfg.workers)
        env["occupation"] = {"n": int(sp["occupation_n"]), "mean": occ.mean, "stddev": occ.stddev,
                             "tail_fraction": occ.tail_fraction, "eps": occ.eps, "q": occ.q}
        chk = spine.conditional_population_check(field, law, int(sp["conditional_n"]), int(sp["conditional_replicates"]),
                                                 cfg.replica_seed("conditional", i), cfg.workers)
        env["conditional"] = {"n": int(sp["conditional_n"]), "is_estimate": chk.is_estimate, "stderr": chk.stderr,
                              "dp_value": chk.dp_value, "accepted": chk.accepted, "agree": chk.agree, "status": chk.status}
        is_est = spine.estimate_survival_is(field, law, n_var, cfg.is_replicates, cfg.replica_seed(SPINE_IS, i), cfg.workers, cfg.cap)
        sizes, trunc = brw_sim.simulate_sizes(field, law, [n_var], cfg.mc_replicates, cfg.replica_seed(DIRECT_MC, i), cfg.workers, cfg.cap)
        alive = sizes[:, 0] > 0
        p_mc = float(alive.mean())
        env["variance"] = {"n": n_var, "is_per_replica_variance": is_est.stderr**2 * is_est.replicates,
                           "mc_per_replica_variance": p_mc * (1 - p_mc), "is_estimate": is_est.estimate,
                           "mc_estimate": p_mc}
        if alive.any() and n_var > 0:
            scaled = sizes[alive, 0] / n_var
            env["size_given_survival_diagnostic"] = {
                "mean": float(scaled.mean()),
                "exponential_mean_guess": field.q / 2,
                "quantiles": {str(qq): float(np.quantile(scaled, qq)) for qq in (0.1, 0.25, 0.5, 0.75, 0.9)},
            }
        out["environments"][str(field.spec.master_seed)] = env
    return out


def env_inspect(cfg: ExperimentConfig) -> dict:
    r = cfg.inspect_radius
    out = {"provenance": provenance(cfg), "environments": {}}
    for field in cfg.fields():
        info = {"vacancy_fraction": environment.vacancy_fraction(field, r), "radius": r, **field.metadata()}
        if field.d <= 2:
            mask = environment.obstacle_mask(field, min(r, 20))
            rows = mask[None, :] if field.d == 1 else mask
            info["map"] = ["".join("#" if x else "." for x in row) for row in rows]
        out["environments"][str(field.spec.master_seed)] = info
    return out

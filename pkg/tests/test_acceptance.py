"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (outside pytest's output
capture) before asserting, so a plain ``pytest -v`` log records the verdict
and the measured numbers for each criterion.
"""

import math
import time

import numpy as np
import pytest

from brw_obstacles import EnvironmentSpec, brw_sim, critical_binary, exact_dp, from_masses, make_field, spine
from brw_obstacles.experiments import config_from_dict, fit_subcritical_rate, survival_curve
from brw_obstacles.experiments.runner import output_paths
from brw_obstacles.experiments.tasks import fit_critical
from brw_obstacles.rng import derive_seed

LAW = critical_binary()
SEED = 20240607


@pytest.fixture
def verdict(capsys):
    start = time.perf_counter()

    def report(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'} criterion {number} ({title}): {detail} [{time.perf_counter() - start:.1f}s]"
        with capsys.disabled():
            print("\n" + line)
        assert passed, line

    return report


def d1(seed, p=0.5):
    return make_field(EnvironmentSpec(1, p, seed))


def test_criterion_01_cross_method_exactness(verdict):
    field = d1(1)
    bad, parts = [], []
    for n in (5, 10, 20):
        exact = exact_dp.survival_exact(field, LAW, n)
        mc = brw_sim.estimate_survival_mc(field, LAW, n, 10**6, derive_seed(SEED, "c1", "mc", n))
        is_ = spine.estimate_survival_is(field, LAW, n, 10**5, derive_seed(SEED, "c1", "is", n))
        for label, e in (("MC", mc), ("IS", is_)):
            z = (e.estimate - exact) / e.stderr
            parts.append(f"n={n} {label} z={z:+.2f}")
            if abs(z) > 3:
                bad.append(parts[-1])
    verdict(1, "cross-method exactness", not bad, "; ".join(parts))


def test_criterion_02_martingale(verdict):
    worst = 0.0
    laws = (LAW, from_masses({0: 0.25, 1: 0.5, 2: 0.25}))
    for i in range(10):
        d = 1 + i % 2
        field = make_field(EnvironmentSpec(d, 0.5, derive_seed(SEED, "c2", i)))
        for law in laws:
            for n in range(51):
                worst = max(worst, abs(exact_dp.expected_population(field, law, n) - 1.0))
    mc = brw_sim.estimate_mean_population_mc(d1(1), LAW, 20, 10**6, derive_seed(SEED, "c2", "mc"))
    z = (mc.estimate - 1.0) / mc.stderr
    ok = worst <= 1e-12 and abs(z) <= 3
    verdict(2, "martingale", ok, f"max |E|Z_n| - 1| = {worst:.2e} over 10 envs, n<=50; MC mean {mc.estimate:.4f} (z={z:+.2f})")


def test_criterion_03_kolmogorov_baseline(verdict):
    flat = d1(0, p=0.0)
    c = 1000 * exact_dp.survival_exact(flat, LAW, 1000) / 2
    verdict(3, "Kolmogorov p=0", 0.95 <= c <= 1.05, f"n P(S_n)/2 at n=1000 = {c:.5f}")


@pytest.mark.slow
def test_criterion_04_critical_spatial_constant(verdict, tmp_path):
    cfg = config_from_dict({
        "kind": "fit-critical",
        "experiment_id": "acceptance-critical",
        "seed": SEED,
        "environment": {"d": 1, "p": 0.5, "env_seeds": [1, 2, 3]},
        "horizons": [250, 500, 1000, 2000],
        "methods": ["DIRECT_MC"],
        "replicates": {"mc": 2 * 10**6},
    })
    summary = fit_critical(cfg, tmp_path)
    per_env = [summary["fits"][f"DIRECT_MC/{s}"] for s in cfg.env_seeds]
    c_last = [f["values"][-1] for f in per_env]
    dev = summary["environment_averaged_deviation"]
    ok = all(0.7 <= c <= 1.3 for c in c_last) and dev["last_n"] <= dev["first_n"]
    verdict(4, "critical spatial constant", ok,
            "c_2000 = " + ", ".join(f"{c:.3f}" for c in c_last)
            + f"; mean |c_n - 1|: n=250 {dev['first_n']:.3f}, n=2000 {dev['last_n']:.3f}")


def test_criterion_05_subcritical_sandwich(verdict):
    law = from_masses({0: 0.6, 1: 0.2, 2: 0.2})
    worst, failures = math.inf, 0
    for s in range(1, 21):
        field = d1(s)
        for n in range(31):
            r = exact_dp.sandwich_check(field, law, n)
            failures += not r.holds
            worst = min(worst, r.exact - r.lower, r.upper - r.exact)
    verdict(5, "subcritical sandwich", failures == 0,
            f"{20 * 31 - failures}/{20 * 31} instances hold; smallest margin {worst:.3e}")


@pytest.mark.slow
def test_criterion_06_subcritical_sublinear_decay(verdict):
    law = from_masses({0: 0.75, 2: 0.25})
    ns = [200, 500, 1000, 2000]
    ok, parts = True, []
    for s in (1, 2, 3):
        field = d1(s)
        logs = [exact_dp.log_survival_exact(field, law, n) for n in ns]
        fit = fit_subcritical_rate(ns, logs, 1)
        a = fit.extra["a_over_n"]
        this = fit.verdict["a_over_n_strictly_decreasing"] and a[-1] < 0.9 * a[0]
        ok &= this
        parts.append(f"env {s}: a_n/n = " + ", ".join(f"{x:.4f}" for x in a))
    verdict(6, "subcritical sub-linear decay", ok, "; ".join(parts))


def test_criterion_07_quenched_monotonicity(verdict):
    laws = (LAW, from_masses({0: 0.6, 1: 0.2, 2: 0.2}))
    flat = d1(0, p=0.0)
    worst = math.inf
    for s in range(1, 21):
        field = d1(s)
        for law in laws:
            for n in range(31):
                worst = min(worst, exact_dp.survival_exact(field, law, n) - exact_dp.survival_exact(flat, law, n))
    means, ses = [], []
    for p in (0.2, 0.5, 0.8):
        vals = np.array([exact_dp.survival_exact(d1(derive_seed(SEED, "c7", p, s), p), LAW, 20) for s in range(50)])
        means.append(vals.mean())
        ses.append(vals.std(ddof=1) / math.sqrt(vals.size))
    mono = all(means[i + 1] >= means[i] - 2 * math.hypot(ses[i], ses[i + 1]) for i in range(2))
    ok = worst >= -1e-12 and mono
    verdict(7, "quenched monotonicity", ok,
            f"min P_omega - P_flat = {worst:.3e}; averaged P(S_20) at p=.2/.5/.8 = "
            + ", ".join(f"{m:.4f}+-{e:.4f}" for m, e in zip(means, ses)))


def test_criterion_08_spine_occupation(verdict):
    field = make_field(EnvironmentSpec(2, 0.5, 1))
    stats = spine.occupation_frequency_stats(field, 10**4, 200, derive_seed(SEED, "c8"))
    verdict(8, "spine occupation frequency", abs(stats.mean - 0.5) < 0.05,
            f"mean L_n/n = {stats.mean:.4f} (sd {stats.stddev:.4f}) over {stats.replicates} spines")


def test_criterion_09_conditional_law(verdict):
    field = d1(1)
    r = spine.conditional_population_check(field, LAW, 8, 20_000, derive_seed(SEED, "c9"))
    ok = r.accepted >= 500 and bool(r.agree)
    verdict(9, "conditional-law identity", ok,
            f"{r.is_estimate:.4f}+-{r.stderr:.4f} vs DP {r.dp_value:.4f}, {r.accepted} accepted")


def test_criterion_10_determinism(verdict, tmp_path):
    base = {
        "experiment_id": "acceptance-determinism",
        "seed": SEED,
        "environment": {"d": 2, "p": 0.3, "env_seeds": [4, 5]},
        "horizons": [0, 5, 25, 60],
        "methods": ["EXACT_DP", "DIRECT_MC", "SPINE_IS"],
        "replicates": {"mc": 20_000, "is": 5_000},
    }

    def rows_without_wall(workers, run):
        cfg = config_from_dict({**base, "workers": workers})
        out = tmp_path / f"w{workers}-{run}"
        survival_curve(cfg, out)
        lines = output_paths(cfg, out)[0].read_text().splitlines()
        idx = lines[0].split(",").index("wall_time_s")
        return [",".join(c for i, c in enumerate(line.split(",")) if i != idx) for line in lines]

    ref = rows_without_wall(1, 0)
    others = [rows_without_wall(w, r) for w, r in ((1, 1), (2, 0), (4, 0))]
    ok = all(o == ref for o in others)
    verdict(10, "determinism", ok, f"{len(ref) - 1} rows identical across reruns and workers 1/2/4")

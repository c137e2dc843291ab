"""Cross-method and invariant checks run by ``brw-obstacles validate``."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import SimpleNamespace
from typing import Callable, Optional

import numpy as np

from .. import brw_sim, exact_dp, rng, spine
from ..environment import EnvironmentSpec, make_field
from ..offspring import critical_binary, from_masses
from .config import ExperimentConfig

TOL = 1e-12
K_SIGMA = 3.0


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        return [c.line() for c in self.checks]


@dataclass
class Profile:
    d: int = 1
    p: float = 0.5
    env_seeds: tuple = (1, 2, 3)
    seed: int = 2024
    mc_replicates: int = 200_000
    is_replicates: int = 20_000
    cross_n: int = 10
    dp_n: int = 20
    conditional_n: int = 6
    conditional_replicates: int = 20_000
    subcritical_masses: dict = field(default_factory=lambda: {0: 0.6, 1: 0.2, 2: 0.2})

    @classmethod
    def from_config(cls, cfg: ExperimentConfig) -> "Profile":
        prof = cls(d=cfg.d, p=cfg.p, env_seeds=tuple(cfg.env_seeds), seed=cfg.seed,
                   mc_replicates=cfg.mc_replicates, is_replicates=cfg.is_replicates,
                   conditional_n=int(cfg.spine["conditional_n"]),
                   conditional_replicates=int(cfg.spine["conditional_replicates"]))
        if not cfg.law.is_critical:
            prof.subcritical_masses = dict(cfg.law.masses)
        return prof


def _guard(name: str, fn: Callable[[], Check]) -> Check:
    try:
        return fn()
    except Exception as exc:  # a crashing check is a failed check
        return Check(name, False, f"raised {type(exc).__name__}: {exc}")


def validate(cfg: Optional[ExperimentConfig] = None, recursions=None, workers: int = 1) -> ValidationReport:
    """Run every check on the profile derived from ``cfg`` (default profile when None).

    ``recursions`` may replace ``expected_population``, ``survival_exact``
    and ``dv_exact`` from :mod:`brw_obstacles.exact_dp`; checks then run
    against the replacements.  This is how corrupted recursions are shown to
    be caught.
    """
    prof = Profile() if cfg is None else Profile.from_config(cfg)
    rec = SimpleNamespace(
        expected_population=getattr(recursions, "expected_population", exact_dp.expected_population),
        survival_exact=getattr(recursions, "survival_exact", exact_dp.survival_exact),
        dv_exact=getattr(recursions, "dv_exact", exact_dp.dv_exact),
    )
    crit = critical_binary()
    sub = from_masses(prof.subcritical_masses)
    fields = [make_field(EnvironmentSpec(prof.d, prof.p, s)) for s in prof.env_seeds]
    flat = make_field(EnvironmentSpec(prof.d, 0.0, 0))
    report = ValidationReport()

    def martingale_dp():
        worst = max(abs(rec.expected_population(f, crit, n) - 1.0) for f in fields for n in (1, 5, prof.dp_n))
        return Check("martingale_dp", worst <= TOL, f"max |E|Z_n| - 1| = {worst:.3g}")

    def martingale_mc():
        bad = []
        for i, f in enumerate(fields):
            seed = rng.derive_seed(prof.seed, "validate", "mean", i)
            e = brw_sim.estimate_mean_population_mc(f, crit, prof.cross_n, prof.mc_replicates, seed, workers)
            target = rec.expected_population(f, crit, prof.cross_n)
            if not e.within(target, K_SIGMA):
                bad.append(f"env {f.spec.master_seed}: {e.estimate:.5f}+-{e.stderr:.5f} vs {target:.5f}")
        return Check("martingale_mc", not bad, "; ".join(bad) or f"{len(fields)} environments within 3 stderr")

    def cross_method():
        bad = []
        n = prof.cross_n
        for i, f in enumerate(fields):
            exact = rec.survival_exact(f, crit, n)
            mc = brw_sim.estimate_survival_mc(f, crit, n, prof.mc_replicates, rng.derive_seed(prof.seed, "validate", "mc", i), workers)
            is_ = spine.estimate_survival_is(f, crit, n, prof.is_replicates, rng.derive_seed(prof.seed, "validate", "is", i), workers)
            for label, e in (("mc", mc), ("is", is_)):
                if not e.within(exact, K_SIGMA):
                    bad.append(f"env {f.spec.master_seed} {label}: {e.estimate:.5f}+-{e.stderr:.5f} vs {exact:.5f}")
        return Check("cross_method", not bad, "; ".join(bad) or f"MC and spine-IS agree with exact DP at n={n}")

    def sandwich():
        bad = []
        for f in fields:
            for n in range(0, 31, 5):
                r = exact_dp.sandwich_check(f, sub, n, recursions=rec)
                if not r.holds:
                    bad.append(f"env {f.spec.master_seed} n={n}: {r.lower:.4g} <= {r.exact:.4g} <= {r.upper:.4g} violated")
        return Check("sandwich", not bad, "; ".join(bad[:3]) or "DV(mu*) <= P(S_n) <= DV(mu) for n <= 30")

    def quenched_bound():
        worst = min(rec.survival_exact(f, law, n) - rec.survival_exact(flat, law, n)
                    for f in fields for law in (crit, sub) for n in (1, 5, 10, prof.dp_n))
        return Check("quenched_monotonicity", worst >= -TOL, f"min P_omega - P_(p=0) = {worst:.3g}")

    def monotone_in_n():
        ok = True
        for f in fields:
            s = [rec.survival_exact(f, crit, n) for n in range(prof.dp_n + 1)]
            ok &= all(b <= a + TOL for a, b in zip(s, s[1:]))
        return Check("survival_nonincreasing_in_n", ok, f"n = 0..{prof.dp_n}")

    def extinction_bounds():
        ok = True
        for f in fields:
            e = [exact_dp.extinction_field(f, crit, k).at_origin() for k in range(prof.dp_n + 1)]
            ok &= all(0.0 <= x <= 1.0 for x in e) and all(b >= a - TOL for a, b in zip(e, e[1:]))
        return Check("extinction_bounds", ok, "e_k in [0,1], nondecreasing in k")

    def conditional_mean():
        worst = min(rec.expected_population(f, crit, n) / rec.survival_exact(f, crit, n)
                    for f in fields for n in (1, 5, prof.dp_n))
        return Check("conditional_mean_at_least_one", worst >= 1.0 - TOL, f"min E(|Z_n| | S_n) = {worst:.5f}")

    def spine_immortal():
        s = spine.simulate_spines(fields[0], crit, prof.cross_n, 2000, rng.derive_seed(prof.seed, "validate", "immortal"), workers)
        ok = bool(np.all(s.total_population >= 1))
        return Check("spine_immortality", ok, f"min |Z_n| = {int(s.total_population.min())}")

    def conditional_law():
        f = fields[0]
        r = spine.conditional_population_check(f, crit, prof.conditional_n, prof.conditional_replicates,
                                               rng.derive_seed(prof.seed, "validate", "conditional"), workers)
        dp_value = rec.expected_population(f, crit, prof.conditional_n) / rec.survival_exact(f, crit, prof.conditional_n)
        agree = r.agree is not False and (r.agree is None or abs(r.is_estimate - dp_value) <= K_SIGMA * r.stderr)
        return Check("conditional_law", bool(agree), f"{r.is_estimate:.4f}+-{r.stderr:.4f} vs {dp_value:.4f} ({r.status})")

    for name, fn in [
        ("martingale_dp", martingale_dp),
        ("martingale_mc", martingale_mc),
        ("cross_method", cross_method),
        ("sandwich", sandwich),
        ("quenched_monotonicity", quenched_bound),
        ("survival_nonincreasing_in_n", monotone_in_n),
        ("extinction_bounds", extinction_bounds),
        ("conditional_mean_at_least_one", conditional_mean),
        ("spine_immortality", spine_immortal),
        ("conditional_law", conditional_law),
    ]:
        report.checks.append(_guard(name, fn))
    return report

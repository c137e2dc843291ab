"""Experiment configuration.

Configs are YAML key-value files.  Every field and its default::

    kind: survival-curve        # survival-curve | fit-critical | fit-subcritical
                                # | spine-stats | validate | env-inspect
    experiment_id: default      # mixed into every derived replica seed
    seed: 1                     # master seed (u64); --seed overrides it
    environment:
      d: 1                      # lattice dimension
      p: 0.5                    # obstacle probability, 0 <= p < 1
      env_seeds: [1]            # one quenched environment per seed
      n_env: null               # alternative to env_seeds: derive this many from `seed`
      average: true             # add environment-average rows when several seeds
    law: critical_binary        # or {masses: {0: 0.6, 1: 0.2, 2: 0.2}}
    horizons: [10, 20]          # strictly increasing, nonnegative
    methods: [EXACT_DP, DIRECT_MC, SPINE_IS]
    replicates:
      mc: 100000                # DIRECT_MC replicas per environment
      is: 10000                 # SPINE_IS replicas per environment
    log_space: false            # EXACT_DP in log space (subcritical, large n)
    cap: 10000000               # population cap per replica
    memory_budget: 20000000     # EXACT_DP cell budget
    workers: 1                  # does not affect results
    spine:                      # used by spine-stats
      occupation_n: 1000
      occupation_replicates: 200
      eps: 0.1
      conditional_n: 8
      conditional_replicates: 20000
    inspect_radius: 20          # used by env-inspect

``workers`` and the output directory are excluded from the content hash, so
they never change which result file a run maps to.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .. import rng
from ..environment import EnvironmentSpec, ObstacleField, make_field
from ..errors import ValidationError
from ..offspring import OffspringLaw, critical_binary, from_masses
from ..results import METHODS

KINDS = ("survival-curve", "fit-critical", "fit-subcritical", "spine-stats", "validate", "env-inspect")


class ConfigError(ValueError):
    """Malformed or incomplete experiment configuration."""


DEFAULTS: dict[str, Any] = {
    "kind": "survival-curve",
    "experiment_id": "default",
    "seed": 1,
    "environment": {"d": 1, "p": 0.5, "env_seeds": None, "n_env": None, "average": True},
    "law": "critical_binary",
    "horizons": [10, 20],
    "methods": list(METHODS),
    "replicates": {"mc": 100_000, "is": 10_000},
    "log_space": False,
    "cap": 10**7,
    "memory_budget": 2 * 10**7,
    "workers": 1,
    "spine": {
        "occupation_n": 1000,
        "occupation_replicates": 200,
        "eps": 0.1,
        "conditional_n": 8,
        "conditional_replicates": 20_000,
    },
    "inspect_radius": 20,
}

_HASH_EXCLUDED = ("workers",)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(base[key], dict) and isinstance(value, dict):
            for sub in value:
                if sub not in base[key]:
                    raise ConfigError(f"unknown config key {key}.{sub}")
            out[key] = {**base[key], **value}
        else:
            out[key] = value
    return out


@dataclass
class ExperimentConfig:
    kind: str
    experiment_id: str
    seed: int
    d: int
    p: float
    env_seeds: list
    average: bool
    law: OffspringLaw
    horizons: list
    methods: list
    mc_replicates: int
    is_replicates: int
    log_space: bool
    cap: int
    memory_budget: int
    workers: int
    spine: dict
    inspect_radius: int
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    def fields(self) -> list[ObstacleField]:
        """One environment per seed; reused for every horizon."""
        return [make_field(EnvironmentSpec(self.d, self.p, s)) for s in self.env_seeds]

    def replica_seed(self, method: str, env_index: int) -> int:
        return rng.derive_seed(self.seed, self.experiment_id, method, env_index)

    @property
    def content_hash(self) -> str:
        payload = {k: v for k, v in self.raw.items() if k not in _HASH_EXCLUDED}
        blob = json.dumps(payload, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _parse_law(spec) -> OffspringLaw:
    if spec == "critical_binary":
        return critical_binary()
    if isinstance(spec, dict) and "masses" in spec:
        try:
            return from_masses({int(k): float(v) for k, v in spec["masses"].items()})
        except (ValidationError, TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"bad offspring law: {exc}") from exc
    raise ConfigError(f"law must be 'critical_binary' or {{masses: {{k: p_k}}}}, got {spec!r}")


def config_from_dict(data: Optional[dict], seed: Optional[int] = None, methods: Optional[list] = None) -> ExperimentConfig:
    """Validate a raw mapping, fill defaults and apply CLI overrides."""
    if not data:
        raise ConfigError("empty config")
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    raw = _merge(DEFAULTS, data)
    if seed is not None:
        raw["seed"] = int(seed)
    if methods is not None:
        raw["methods"] = list(methods)

    if raw["kind"] not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {raw['kind']!r}")
    env = raw["environment"]
    try:
        seed_val = int(raw["seed"])
        if not 0 <= seed_val < 2**64:
            raise ValueError
        EnvironmentSpec(int(env["d"]), float(env["p"]), 0)
    except (ValidationError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad environment or seed: {exc}") from exc

    if env["env_seeds"] is not None:
        env_seeds = [int(s) for s in env["env_seeds"]]
    elif env["n_env"] is not None:
        env_seeds = [rng.derive_seed(seed_val, "env", i) for i in range(int(env["n_env"]))]
    else:
        env_seeds = [1]
    if not env_seeds:
        raise ConfigError("at least one environment seed is required")

    horizons = [int(n) for n in raw["horizons"]]
    if not horizons or any(n < 0 for n in horizons) or any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise ConfigError("horizons must be nonnegative and strictly increasing")
    methods_ = [str(m).upper() for m in raw["methods"]]
    for m in methods_:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; choose from {METHODS}")
    reps = raw["replicates"]
    if int(reps["mc"]) < 1 or int(reps["is"]) < 1:
        raise ConfigError("replicate counts must be at least 1")

    raw["methods"] = methods_
    raw["horizons"] = horizons
    raw["environment"] = {**env, "env_seeds": env_seeds}
    return ExperimentConfig(
        kind=raw["kind"],
        experiment_id=str(raw["experiment_id"]),
        seed=seed_val,
        d=int(env["d"]),
        p=float(env["p"]),
        env_seeds=env_seeds,
        average=bool(env["average"]),
        law=_parse_law(raw["law"]),
        horizons=horizons,
        methods=methods_,
        mc_replicates=int(reps["mc"]),
        is_replicates=int(reps["is"]),
        log_space=bool(raw["log_space"]),
        cap=int(raw["cap"]),
        memory_budget=int(raw["memory_budget"]),
        workers=max(1, int(raw["workers"])),
        spine=dict(raw["spine"]),
        inspect_radius=int(raw["inspect_radius"]),
        raw=raw,
    )


def load_config(path, seed: Optional[int] = None, methods: Optional[list] = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return config_from_dict(data, seed, methods)

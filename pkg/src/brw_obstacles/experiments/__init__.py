"""Config-driven orchestration: survival curves, scaling fits, validation."""

from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .fits import ScalingFit, fit_critical_constant, fit_subcritical_rate
from .runner import ResultRow, run_survival_curve, survival_curve
from .validation import validate

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ResultRow",
    "ScalingFit",
    "config_from_dict",
    "fit_critical_constant",
    "fit_subcritical_rate",
    "load_config",
    "run_survival_curve",
    "survival_curve",
    "validate",
]

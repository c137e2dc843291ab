"""Branching random walks among IID Bernoulli obstacles on Z^d.

Direct Monte Carlo, spine importance sampling and exact lattice recursions
for quenched survival probabilities.
"""

__version__ = "0.1.0"

from .environment import EnvironmentSpec, ObstacleField, is_obstacle, is_vacant, make_field, vacancy_fraction
from .errors import CapacityError, ValidationError
from .offspring import OffspringLaw, critical_binary, from_masses, llogl, pgf, size_biased
from .results import DIRECT_MC, EXACT_DP, SPINE_IS, SurvivalEstimate

__all__ = [
    "CapacityError",
    "DIRECT_MC",
    "EXACT_DP",
    "EnvironmentSpec",
    "ObstacleField",
    "OffspringLaw",
    "SPINE_IS",
    "SurvivalEstimate",
    "ValidationError",
    "critical_binary",
    "from_masses",
    "is_obstacle",
    "is_vacant",
    "llogl",
    "make_field",
    "pgf",
    "size_biased",
    "vacancy_fraction",
]

"""Adaptive trigonometric shrinkage for heteroscedastic nonparametric regression.

The package fits ``y_j = S(j/n) + g(j/n, S) xi_j`` with a data-driven choice
among Pinsker-type shrinkage weights, measures quadratic risk by Monte Carlo
and evaluates the matching Bayes-risk lower bound construction.
"""

from .basis import DesignGrid, FourierCoeffs, SobolevBall, fourier_transform, phi
from .estimators import AdaptiveTrigRegressor, FixedWeightRegressor, OracleTrigRegressor
from .models import ModelSpec, NoiseDensity, ScaleFamily, library_function, simulate
from .risk import efficiency_curve, gamma_k, mc_risk, oracle_gap
from .selector import select
from .weights import WeightIndex, weight_grid, weight_vector

__version__ = "0.1.0"

__all__ = [
    "AdaptiveTrigRegressor",
    "DesignGrid",
    "FixedWeightRegressor",
    "FourierCoeffs",
    "ModelSpec",
    "NoiseDensity",
    "OracleTrigRegressor",
    "ScaleFamily",
    "SobolevBall",
    "WeightIndex",
    "efficiency_curve",
    "fourier_transform",
    "gamma_k",
    "library_function",
    "mc_risk",
    "oracle_gap",
    "phi",
    "select",
    "simulate",
    "weight_grid",
    "weight_vector",
    "__version__",
]

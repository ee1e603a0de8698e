"""Multivariate Hawkes estimation of cross-platform URL influence in retweet cascades."""

__version__ = "0.1.0"

from .adm4 import FitConfig, FitResult, check_convergence, fit_adm4, prox_l1_nonneg, prox_nuclear, select_decay
from .core import (
    EventSequence,
    ExpKernel,
    HawkesParams,
    branching_spectral_radius,
    compensator,
    intensity_1d,
    intensity_mv,
    log_likelihood,
    nuclear_norm,
    objective,
    pooled_rescaled_residuals,
    rescaled_residuals,
)
from .simulate import SimConfig, StabilityError, TruncationError, simulate, simulate_batch

__all__ = [
    "EventSequence", "ExpKernel", "FitConfig", "FitResult", "HawkesParams", "SimConfig",
    "StabilityError", "TruncationError", "branching_spectral_radius", "check_convergence",
    "compensator", "fit_adm4", "intensity_1d", "intensity_mv", "log_likelihood", "nuclear_norm",
    "objective", "pooled_rescaled_residuals", "prox_l1_nonneg", "prox_nuclear", "rescaled_residuals", "select_decay",
    "simulate", "simulate_batch",
]

"""Completion and imputation methods."""
from .admm import AdmmConfig, SolverState, admm_complete
from .als import AlsConfig, als_complete, als_objective
from .common import RecoveryResult
from .persistent import persistent_fill

__all__ = [
    "AdmmConfig",
    "AlsConfig",
    "RecoveryResult",
    "SolverState",
    "admm_complete",
    "als_complete",
    "als_objective",
    "persistent_fill",
]

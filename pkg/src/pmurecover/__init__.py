"""Low-rank completion of PMU-style measurement matrices."""

__version__ = "0.1.0"

from .datagen import EventSpec, ScenarioSpec, apply_burst_mask, apply_random_mask, apply_row_mask, generate_synthetic
from .errors import (
    DegenerateInputError,
    DivergenceError,
    MatrixFileError,
    ParameterError,
    PmuRecoverError,
    ShapeError,
    UndefinedMetricError,
)
from .matcore import (
    ObservedMatrix,
    approximate_rank,
    frobenius_norm,
    mae_missing,
    masked_residual,
    singular_values,
)
from .reshape import ReshapePlan, ccrm_inverse, ccrm_reshape, select_cut_factor
from .solvers import AdmmConfig, AlsConfig, RecoveryResult, admm_complete, als_complete, persistent_fill

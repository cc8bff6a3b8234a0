from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateInputError, DivergenceError
from ..matcore import ObservedMatrix

#: any iterate entry above this magnitude counts as a blow-up
DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    """Output of a completion run.

    ``residual_history[k]`` is the Frobenius norm of the change in the
    reconstruction between consecutive iterations. ``objective_history`` is
    only filled by solvers with an explicit objective (ALS).
    """

    Xhat: np.ndarray
    converged: bool
    iterations: int
    residual_history: tuple
    elapsed: float
    method: str = ""
    objective_history: tuple = field(default_factory=tuple)

    @property
    def final_residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else float("nan")


def check_observed(observed: ObservedMatrix) -> None:
    if not isinstance(observed, ObservedMatrix):
        raise TypeError("expected an ObservedMatrix")
    if not observed.mask.any():
        raise DegenerateInputError("nothing is observed: the mask is all zero")


def guard(name: str, hint: str, *arrays: np.ndarray) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)) or np.max(np.abs(arr)) > DIVERGENCE_LIMIT:
            raise DivergenceError(f"{name} iterates diverged; {hint}")

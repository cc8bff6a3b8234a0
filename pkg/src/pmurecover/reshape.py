"""Cut-column reshaping (CCRM).

Each length-``n1`` column is cut into ``n_star`` consecutive segments of
length ``L = n1 / n_star``; the segments of one original column sit next to
each other in the output. A row that is missing across every channel then
becomes ``n2`` missing entries spread over a row that is otherwise observed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .matcore import ObservedMatrix, as_dense


@dataclass(frozen=True)
class ReshapePlan:
    n1: int
    n2: int
    n_star: int

    def __post_init__(self):
        if min(self.n1, self.n2, self.n_star) < 1:
            raise ParameterError(f"invalid reshape plan {self}")
        if self.n1 % self.n_star:
            raise ParameterError(f"n_star={self.n_star} does not divide n1={self.n1}")

    @property
    def seg_len(self) -> int:
        return self.n1 // self.n_star

    @property
    def reshaped_shape(self) -> tuple[int, int]:
        return self.seg_len, self.n2 * self.n_star


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def select_cut_factor(n1: int, n2: int) -> int:
    """Largest divisor ``n*`` of ``n1`` whose segment length ``n1 / n*`` is
    at least ``n2``; 1 when there is none.

    Equality is allowed so that the 6-by-2 example cuts with ``n* = 3``;
    for 1800-by-86 this gives 20 (segments of 90).
    """
    if n1 < 1 or n2 < 1:
        return 1
    fits = [d for d in _divisors(n1) if n1 // d >= n2]
    return max(fits) if fits else 1


def _forward(X: np.ndarray, plan: ReshapePlan) -> np.ndarray:
    # (n_star*L, n2) -> (n_star, L, n2) -> (L, n2, n_star) -> (L, n2*n_star)
    return X.reshape(plan.n_star, plan.seg_len, plan.n2).transpose(1, 2, 0).reshape(
        plan.reshaped_shape
    )


def _backward(Y: np.ndarray, plan: ReshapePlan) -> np.ndarray:
    return Y.reshape(plan.seg_len, plan.n2, plan.n_star).transpose(2, 0, 1).reshape(
        plan.n1, plan.n2
    )


def ccrm_reshape(observed: ObservedMatrix, n_star: int) -> tuple[ObservedMatrix, ReshapePlan]:
    """Reshape ``observed`` to ``(n1/n_star, n2*n_star)``.

    Output column ``c`` (0-based) holds segment ``c % n_star`` of original
    column ``c // n_star``; entry ``(i, c)`` is original entry
    ``((c % n_star) * L + i, c // n_star)``. The mask follows the same map.
    """
    n1, n2 = observed.shape
    plan = ReshapePlan(n1, n2, int(n_star))
    out = ObservedMatrix._trusted(_forward(observed.values, plan), _forward(observed.mask, plan))
    return out, plan


def ccrm_inverse(X, plan: ReshapePlan) -> np.ndarray:
    """Map a matrix in reshaped layout back to the original ``n1 x n2`` layout."""
    X = as_dense(X)
    if X.shape != plan.reshaped_shape:
        raise ShapeError(f"matrix shape {X.shape} does not match plan {plan.reshaped_shape}")
    return np.ascontiguousarray(_backward(X, plan))


def ccrm_inverse_mask(mask, plan: ReshapePlan) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.shape != plan.reshaped_shape:
        raise ShapeError(f"mask shape {mask.shape} does not match plan {plan.reshaped_shape}")
    return np.ascontiguousarray(_backward(mask, plan))

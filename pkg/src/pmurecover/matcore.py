"""Dense matrices, structural masks and the small linear-algebra kernel.

Matrices are plain 2-D ``float64`` numpy arrays; masks are 2-D ``uint8``
arrays holding 0 (missing) or 1 (observed).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError, UndefinedMetricError

#: singular values below ``ZERO_SV_RTOL * sigma_1`` count as zero
ZERO_SV_RTOL = 1e-12


def as_dense(X, name: str = "matrix") -> np.ndarray:
    """Validate ``X`` as a finite 2-D real matrix and return it as float64."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"{name} contains NaN or Inf entries")
    return arr


def as_mask(mask, shape=None, name: str = "mask") -> np.ndarray:
    arr = np.asarray(mask)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.dtype == bool:
        arr = arr.astype(np.uint8)
    elif not np.all((arr == 0) | (arr == 1)):
        raise ParameterError(f"{name} entries must be exactly 0 or 1")
    else:
        arr = arr.astype(np.uint8)
    if shape is not None and arr.shape != tuple(shape):
        raise ShapeError(f"{name} shape {arr.shape} does not match {tuple(shape)}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ObservedMatrix:
    """Observed values ``M`` paired with the structural mask ``I_s``.

    The mask is the only source of truth for what is missing. Values under
    a zero mask bit are forced to 0 on construction, so a genuine zero
    measurement is distinguishable from a missing one only through the mask.
    """

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        mask = as_mask(self.mask)
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != mask.shape:
            raise ShapeError(f"values shape {values.shape} != mask shape {mask.shape}")
        values = np.where(mask == 1, values, 0.0)
        values = as_dense(values, "values")
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "mask", _frozen(mask))

    @classmethod
    def _trusted(cls, values: np.ndarray, mask: np.ndarray) -> "ObservedMatrix":
        # caller guarantees a validated pair, e.g. a permutation of one
        obj = object.__new__(cls)
        for name, arr in (("values", values), ("mask", mask)):
            arr = np.ascontiguousarray(arr)
            arr.flags.writeable = False
            object.__setattr__(obj, name, arr)
        return obj

    @classmethod
    def fully_observed(cls, X) -> "ObservedMatrix":
        X = as_dense(X)
        return cls(X, np.ones(X.shape, dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def n_missing(self) -> int:
        return int(self.mask.size - np.count_nonzero(self.mask))

    def missing_rows(self) -> np.ndarray:
        """Indices (0-based) of rows with no observed entry."""
        return np.flatnonzero(~self.mask.any(axis=1))

    def transpose(self) -> "ObservedMatrix":
        return ObservedMatrix(self.values.T, self.mask.T)


def masked_residual(X, M, mask) -> np.ndarray:
    """Return ``(X - M) * mask`` (Hadamard product with the mask)."""
    X = as_dense(X, "X")
    M = as_dense(M, "M")
    if X.shape != M.shape:
        raise ShapeError(f"X shape {X.shape} != M shape {M.shape}")
    mask = as_mask(mask, X.shape)
    return (X - M) * mask


def frobenius_norm(X) -> float:
    return float(np.linalg.norm(as_dense(X), "fro"))


def singular_values(X) -> np.ndarray:
    """All ``min(rows, cols)`` singular values of ``X`` in descending order."""
    return np.linalg.svd(as_dense(X), compute_uv=False)


def approximate_rank(spectrum, beta: float) -> int:
    """Smallest ``r`` whose leading singular values hold a ``beta`` share of
    the Frobenius norm.

    Parameters
    ----------
    spectrum : array_like
        Singular values, descending.
    beta : float
        Proportion factor in ``(0, 1]``.

    Returns
    -------
    int
        The approximate rank; 0 for an all-zero spectrum. With ``beta = 1``
        this is the count of singular values above ``ZERO_SV_RTOL * sigma_1``.
    """
    if not (0.0 < beta <= 1.0):
        raise ParameterError(f"beta must lie in (0, 1], got {beta!r}")
    s = np.asarray(spectrum, dtype=np.float64).ravel()
    if s.size == 0:
        raise ParameterError("spectrum is empty")
    if np.any(s < 0) or np.any(np.diff(s) > 0):
        raise ParameterError("spectrum must be nonnegative and sorted descending")
    if s[0] == 0.0:
        return 0
    s = np.where(s < ZERO_SV_RTOL * s[0], 0.0, s)
    energy = np.cumsum(s**2)
    total = energy[-1]
    if beta == 1.0:
        return int(np.count_nonzero(s))
    # compare squared proportions to avoid a sqrt on every prefix
    r = int(np.searchsorted(energy, beta**2 * total * (1 - 1e-15), side="left")) + 1
    return min(r, int(np.count_nonzero(s)))


def mae_missing(Xhat, X, mask) -> float:
    """Mean absolute error over the missing positions (``mask == 0``)."""
    Xhat = as_dense(Xhat, "Xhat")
    X = as_dense(X, "X")
    if Xhat.shape != X.shape:
        raise ShapeError(f"Xhat shape {Xhat.shape} != X shape {X.shape}")
    mask = as_mask(mask, X.shape)
    missing = mask == 0
    n = int(np.count_nonzero(missing))
    if n == 0:
        raise UndefinedMetricError("MAE is undefined: no missing entries")
    return float(np.abs(Xhat[missing] - X[missing]).sum() / n)

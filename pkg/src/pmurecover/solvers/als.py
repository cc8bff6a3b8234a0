"""Alternating least squares baseline at a fixed rank.

Minimizes ``0.5 ||(A^T B - M)*I||_F^2 + 0.5 lam (||A||_F^2 + ||B||_F^2)``
with ``A`` of shape ``(r, n1)`` and ``B`` of shape ``(r, n2)``. Each half
update solves one ridge system per column of the free factor, restricted
to that row's (or column's) observed entries, so the objective never
increases.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..errors import ParameterError
from ..matcore import ObservedMatrix
from .common import RecoveryResult, check_observed, guard


@dataclass(frozen=True)
class AlsConfig:
    rank_r: int = 20
    lam: float = 1.5
    max_iters: int = 500
    tol: float = 1e-4
    init_seed: int = 0
    init: str = "random"

    def __post_init__(self):
        if int(self.rank_r) < 1:
            raise ParameterError(f"rank_r must be >= 1, got {self.rank_r!r}")
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam!r}")
        if int(self.max_iters) < 1:
            raise ParameterError(f"max_iters must be >= 1, got {self.max_iters!r}")
        if not self.tol > 0:
            raise ParameterError(f"tol must be positive, got {self.tol!r}")
        if self.init not in ("svd", "random"):
            raise ParameterError(f"init must be 'svd' or 'random', got {self.init!r}")


def als_objective(A, B, M, mask, lam) -> float:
    R = (A.T @ B - M) * mask
    return 0.5 * float(np.sum(R * R)) + 0.5 * lam * float(np.sum(A * A) + np.sum(B * B))


def _ridge_columns(F, M, mask, lam):
    """Solve, for every row i of ``M``, the ridge problem for the factor
    column that multiplies ``F`` (shape ``(r, n)``) over observed entries."""
    r = F.shape[0]
    outer = (F[:, None, :] * F[None, :, :]).reshape(r * r, -1)
    gram = (mask @ outer.T).reshape(-1, r, r)
    gram[:, np.arange(r), np.arange(r)] += lam
    rhs = (M * mask) @ F.T
    return np.linalg.solve(gram, rhs[:, :, None])[:, :, 0].T


def _initial_factors(M, mask, r, cfg):
    if cfg.init == "random":
        rng = np.random.default_rng(cfg.init_seed)
        return (rng.standard_normal((r, M.shape[0])) / np.sqrt(r),
                rng.standard_normal((r, M.shape[1])) / np.sqrt(r))
    # top-r SVD of the zero-filled matrix rescaled by the observed fraction
    U, s, Vt = np.linalg.svd(M / mask.mean(), full_matrices=False)
    root = np.sqrt(s[:r])
    return (U[:, :r] * root).T, root[:, None] * Vt[:r]


def als_complete(observed: ObservedMatrix, cfg: AlsConfig = AlsConfig()) -> RecoveryResult:
    """Complete ``observed`` by alternating ridge least squares.

    Stops when the relative objective change over one full sweep falls
    below ``cfg.tol`` or after ``cfg.max_iters`` sweeps.
    ``objective_history`` holds the initial objective followed by the value
    after every half update.
    """
    check_observed(observed)
    M = observed.values
    mask = observed.mask.astype(np.float64)
    n1, n2 = M.shape
    r = int(cfg.rank_r)
    if r > min(n1, n2):
        raise ParameterError(f"rank_r={r} exceeds min(n1, n2)={min(n1, n2)}")
    t0 = time.perf_counter()
    A, B = _initial_factors(M, mask, r, cfg)
    hint = f"check the regularization lambda (currently {cfg.lam:g})"

    objective = [als_objective(A, B, M, mask, cfg.lam)]
    history = []
    X_prev = A.T @ B
    converged = False
    for _ in range(int(cfg.max_iters)):
        A = _ridge_columns(B, M, mask, cfg.lam)
        objective.append(als_objective(A, B, M, mask, cfg.lam))
        B = _ridge_columns(A, M.T, mask.T, cfg.lam)
        objective.append(als_objective(A, B, M, mask, cfg.lam))
        guard("ALS", hint, A, B)
        X = A.T @ B
        history.append(float(np.linalg.norm(X - X_prev)))
        X_prev = X
        before, after = objective[-3], objective[-1]
        if abs(before - after) <= cfg.tol * max(abs(before), np.finfo(float).tiny):
            converged = True
            break

    return RecoveryResult(
        Xhat=X_prev,
        converged=converged,
        iterations=len(history),
        residual_history=tuple(history),
        elapsed=time.perf_counter() - t0,
        method="als",
        objective_history=tuple(objective),
    )

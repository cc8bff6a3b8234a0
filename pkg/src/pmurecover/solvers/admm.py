"""ADMM for maximum-margin matrix factorization with a masked equality
constraint.

The recovered matrix is ``Xhat = A.T @ B`` with ``A`` of shape ``(n2, n1)``
and ``B`` of shape ``(n2, n2)`` where ``n1 >= n2`` after orientation, so no
rank estimate is needed. Every update is a matrix product; there is no
linear solve.

Each primal block is a relaxed fixed-point step on the zero-gradient
condition of the augmented Lagrangian::

    A <- (1 - eta) A + eta (-B (w*I)^T - rho B ((A^T B - M)*I)^T)
    B <- (1 - eta) B + eta (-A (w*I)   - rho A ((A^T B - M)*I))
    w <- w + rho ((A^T B - M)*I)

``eta = 1`` is the undamped substitution. Left undamped, the iteration is
a power-iteration on ``B`` whose gain is ``||w + rho R||_2 ** 2``; it either
collapses to the zero fixed point or grows without bound, so the default
``eta = 0.5`` damps it.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import ParameterError
from ..matcore import ObservedMatrix
from .common import RecoveryResult, check_observed, guard

DEFAULT_RHO = 7.5e-4


@dataclass(frozen=True)
class AdmmConfig:
    """Parameters of :func:`admm_complete`.

    By default the run stops once ``||X_k+1 - X_k||_F < rel_eps * ||X_k+1||_F``.
    Setting ``eps`` switches to the absolute test ``||X_k+1 - X_k||_F < eps``.
    """

    rho: float = DEFAULT_RHO
    eps: Optional[float] = None
    rel_eps: float = 1e-4
    k_max: int = 5000
    init_seed: int = 0
    init_scale: float = 1.0
    relaxation: float = 0.5
    clamp_observed: bool = False

    def __post_init__(self):
        if not self.rho > 0:
            raise ParameterError(f"rho must be positive, got {self.rho!r}")
        if self.eps is not None and not self.eps > 0:
            raise ParameterError(f"eps must be positive, got {self.eps!r}")
        if not self.rel_eps > 0:
            raise ParameterError(f"rel_eps must be positive, got {self.rel_eps!r}")
        if int(self.k_max) < 1:
            raise ParameterError(f"k_max must be >= 1, got {self.k_max!r}")
        if not self.init_scale > 0:
            raise ParameterError("init_scale must be positive (zero is a fixed point)")
        if not 0 < self.relaxation <= 1:
            raise ParameterError(f"relaxation must lie in (0, 1], got {self.relaxation!r}")

    def tolerance(self, X: np.ndarray) -> float:
        if self.eps is not None:
            return float(self.eps)
        # relative to the iterate: the early shrink toward zero must not
        # read as convergence
        return self.rel_eps * float(np.linalg.norm(X))


@dataclass
class SolverState:
    """Iterates of one ADMM run, in the internal (tall) orientation."""

    A: np.ndarray
    B: np.ndarray
    w: np.ndarray
    k: int = 0


def initial_state(n1: int, n2: int, cfg: AdmmConfig) -> SolverState:
    rng = np.random.default_rng(cfg.init_seed)
    sd = cfg.init_scale / np.sqrt(n2)
    A = sd * rng.standard_normal((n2, n1))
    B = sd * rng.standard_normal((n2, n2))
    return SolverState(A=A, B=B, w=np.zeros((n1, n2)))


def admm_complete(
    observed: ObservedMatrix,
    cfg: AdmmConfig = AdmmConfig(),
    callback: Optional[Callable[[SolverState], None]] = None,
) -> RecoveryResult:
    """Complete ``observed`` with the ADMM iteration.

    The matrix is transposed internally when it has fewer rows than
    columns and transposed back on return. Iteration stops once the
    Frobenius norm of the change in ``A.T @ B`` drops below the tolerance
    (see :class:`AdmmConfig`),
    or after ``k_max`` iterations.

    ``callback`` receives the live :class:`SolverState` after each iteration
    and must not modify it.
    """
    check_observed(observed)
    t0 = time.perf_counter()
    flip = observed.shape[0] < observed.shape[1]
    M = observed.values.T if flip else observed.values
    mask = (observed.mask.T if flip else observed.mask).astype(np.float64)
    n1, n2 = M.shape
    rho, eta = cfg.rho, cfg.relaxation
    hint = f"reduce the penalty weight rho (currently {rho:g})"

    state = initial_state(n1, n2, cfg)
    A, B, w = state.A, state.B, state.w
    X_prev = A.T @ B
    history = []
    converged = False
    for k in range(1, int(cfg.k_max) + 1):
        wI = w * mask
        # -B (w*I)^T - rho B R^T  ==  -B (w*I + rho R)^T
        Z = wI + rho * ((X_prev - M) * mask)
        A = (1 - eta) * A - eta * (B @ Z.T)
        Z = wI + rho * ((A.T @ B - M) * mask)
        B = (1 - eta) * B - eta * (A @ Z)
        X = A.T @ B
        w = w + rho * ((X - M) * mask)
        guard("ADMM", hint, A, B, w)
        step = float(np.linalg.norm(X - X_prev))
        history.append(step)
        X_prev = X
        state.A, state.B, state.w, state.k = A, B, w, k
        if callback is not None:
            callback(state)
        if step < cfg.tolerance(X):
            converged = True
            break

    Xhat = X_prev
    if cfg.clamp_observed:
        Xhat = np.where(mask == 1, M, Xhat)
    if flip:
        Xhat = Xhat.T
    return RecoveryResult(
        Xhat=np.ascontiguousarray(Xhat),
        converged=converged,
        iterations=len(history),
        residual_history=tuple(history),
        elapsed=time.perf_counter() - t0,
        method="admm",
    )

"""Synthetic PMU-like matrices and the masking regimes used in experiments.

Rows are sampling instants (30 per second), columns are channels. All
randomness comes from numpy's ``PCG64`` bit generator seeded with the given
integer; Gaussian draws use ``Generator.standard_normal`` (ziggurat).
User-facing instants and channels are 1-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError
from .matcore import ObservedMatrix, as_dense

SAMPLES_PER_SECOND = 30
#: amplitude ratio between consecutive signal components
COMPONENT_DECAY = 0.05
#: standard deviation of the channel gains around 1
GAIN_SPREAD = 0.05


@dataclass(frozen=True)
class EventSpec:
    """Damped sinusoid ``a exp(-z tau) sin(2 pi f tau)`` added to the
    temporal profile for ``tau = t - onset >= 0``."""

    onset: int = 4
    damping: float = 0.02
    frequency: float = 0.02
    amplitude: float = 0.05


@dataclass(frozen=True)
class ScenarioSpec:
    rows: int = 1800
    cols: int = 86
    signal_rank: int = 1
    noise_var: float = 0.001
    event: Optional[EventSpec] = field(default_factory=EventSpec)
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ParameterError(f"rows and cols must be positive, got {self.rows}x{self.cols}")
        if not 1 <= self.signal_rank <= min(self.rows, self.cols):
            raise ParameterError(
                f"signal_rank must lie in [1, {min(self.rows, self.cols)}], got {self.signal_rank}"
            )
        if not self.noise_var >= 0:
            raise ParameterError(f"noise_var must be >= 0, got {self.noise_var!r}")
        if self.event is not None:
            if not 1 <= self.event.onset <= self.rows:
                raise ParameterError(f"event onset {self.event.onset} outside [1, {self.rows}]")
            if self.event.damping < 0 or self.event.frequency < 0:
                raise ParameterError("event damping and frequency must be >= 0")


def temporal_profile(n1: int, event: Optional[EventSpec]) -> np.ndarray:
    u = np.ones(n1)
    if event is not None:
        tau = np.arange(n1) - (event.onset - 1)
        on = tau >= 0
        tau = tau[on]
        u[on] += (
            event.amplitude
            * np.exp(-event.damping * tau)
            * np.sin(2 * np.pi * event.frequency * tau)
        )
    return u


def generate_synthetic(spec: ScenarioSpec = ScenarioSpec()) -> np.ndarray:
    """Ground-truth matrix: a sum of ``signal_rank`` outer products plus
    white Gaussian noise of variance ``noise_var``.

    The leading component is the temporal profile (level 1 plus the event
    transient) times channel gains near 1. Component ``p`` (1-based, p >= 2)
    is a standard Gaussian outer product scaled by ``COMPONENT_DECAY**(p-1)``.
    """
    n1, n2 = spec.rows, spec.cols
    rng = np.random.default_rng(spec.seed)
    gains = 1.0 + GAIN_SPREAD * rng.standard_normal(n2)
    X = np.outer(temporal_profile(n1, spec.event), gains)
    for p in range(2, spec.signal_rank + 1):
        u = rng.standard_normal(n1)
        v = rng.standard_normal(n2)
        X += COMPONENT_DECAY ** (p - 1) * np.outer(u, v)
    X += np.sqrt(spec.noise_var) * rng.standard_normal((n1, n2))
    return X


def _check_probability(p: float, name: str) -> None:
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"{name} must lie in [0, 1], got {p!r}")


def apply_random_mask(X, p_observe: float, seed: int) -> ObservedMatrix:
    """Observe each entry independently with probability ``p_observe``."""
    X = as_dense(X)
    _check_probability(p_observe, "p_observe")
    rng = np.random.default_rng(seed)
    return ObservedMatrix(X, rng.random(X.shape) < p_observe)


def apply_row_mask(X, p_row_observe: float, seed: int) -> ObservedMatrix:
    """Keep each row (all channels at one instant) with probability
    ``p_row_observe``; dropped rows are missing on every channel."""
    X = as_dense(X)
    _check_probability(p_row_observe, "p_row_observe")
    rng = np.random.default_rng(seed)
    keep = rng.random(X.shape[0]) < p_row_observe
    return ObservedMatrix(X, np.repeat(keep[:, None], X.shape[1], axis=1))


def apply_burst_mask(X, channels: Sequence[int], t_start: int, t_end: int) -> ObservedMatrix:
    """Drop instants ``t_start..t_end`` (inclusive) on ``channels``; all
    indices are 1-based."""
    X = as_dense(X)
    n1, n2 = X.shape
    if not 1 <= t_start <= t_end <= n1:
        raise ParameterError(f"burst window [{t_start}, {t_end}] invalid for {n1} instants")
    channels = [int(c) for c in channels]
    if len(set(channels)) != len(channels):
        raise ParameterError("burst channels must be distinct")
    bad = [c for c in channels if not 1 <= c <= n2]
    if bad:
        raise ParameterError(f"channel {bad[0]} outside [1, {n2}]")
    mask = np.ones(X.shape, dtype=np.uint8)
    if channels:
        mask[t_start - 1 : t_end, np.asarray(channels) - 1] = 0
    return ObservedMatrix(X, mask)

"""Monte Carlo experiments: MAE against observed-data probability, the
row-loss (all channels missing) study and the burst comparison.

Trial seeds are derived from indices, never drawn sequentially, so a trial's
result does not depend on how many other trials run or in which order::

    trial_seed = mix_seed(base_seed, cell_index, trial_index)

``cell_index`` is the position of the probability in the grid. It does not
depend on the method, so every method sees the same masks (paired design).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .datagen import ScenarioSpec, apply_burst_mask, apply_random_mask, apply_row_mask, generate_synthetic
from .errors import ParameterError, PmuRecoverError
from .matcore import ObservedMatrix, mae_missing
from .reshape import ccrm_inverse, ccrm_reshape, select_cut_factor
from .solvers import AdmmConfig, AlsConfig, admm_complete, als_complete, persistent_fill

METHODS = ("admm", "als", "persistent")
REGIMES = ("random", "rows", "burst")
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer (Steele, Lea and Flood 2014) on a 64-bit word."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(*words: int) -> int:
    """Fold integers into one 64-bit seed: ``h = splitmix64(h ^ word)``
    starting from ``h = 0``."""
    h = 0
    for word in words:
        h = splitmix64(h ^ (int(word) & _MASK64))
    return h


@dataclass(frozen=True)
class BurstSpec:
    """Channels (1-based) losing instants ``t_start..t_end`` inclusive."""

    channels: tuple = tuple(range(1, 10))
    t_start: int = 90
    t_end: int = 200


@dataclass(frozen=True)
class TrialOutcome:
    status: str  # "ok", "no-missing" or "failed"
    mae: Optional[float] = None
    iterations: int = 0
    converged: bool = False
    elapsed: float = 0.0
    n_star: int = 1
    error: str = ""


@lru_cache(maxsize=8)
def _truth(spec: ScenarioSpec) -> np.ndarray:
    X = generate_synthetic(spec)
    X.flags.writeable = False
    return X


def make_observed(X, regime: str, p: float, seed: int, burst: BurstSpec = BurstSpec()) -> ObservedMatrix:
    if regime == "random":
        return apply_random_mask(X, p, seed)
    if regime == "rows":
        return apply_row_mask(X, p, seed)
    if regime == "burst":
        return apply_burst_mask(X, burst.channels, burst.t_start, burst.t_end)
    raise ParameterError(f"unknown mask regime {regime!r}; expected one of {REGIMES}")


def resolve_cut_factor(observed: ObservedMatrix, reshape: Union[str, int]) -> int:
    """``"auto"`` cuts only when some row is missing on every channel."""
    if reshape == "off":
        return 1
    n1, n2 = observed.shape
    if reshape == "auto":
        return select_cut_factor(n1, n2) if observed.missing_rows().size else 1
    n_star = int(reshape)
    if n_star < 1 or n1 % n_star:
        raise ParameterError(f"cut factor {n_star} does not divide {n1}")
    return n_star


def recover(
    observed: ObservedMatrix,
    method: str,
    *,
    reshape: Union[str, int] = "auto",
    admm: AdmmConfig = AdmmConfig(),
    als: AlsConfig = AlsConfig(),
):
    """Run one method, with CCRM around the matrix solvers when requested.

    Returns ``(Xhat, RecoveryResult or None, n_star)``.
    """
    if method == "persistent":
        return persistent_fill(observed), None, 1
    if method not in METHODS:
        raise ParameterError(f"unknown method {method!r}; expected one of {METHODS}")
    n_star = resolve_cut_factor(observed, reshape)
    work, plan = ccrm_reshape(observed, n_star) if n_star > 1 else (observed, None)
    result = admm_complete(work, admm) if method == "admm" else als_complete(work, als)
    Xhat = ccrm_inverse(result.Xhat, plan) if plan is not None else result.Xhat
    return Xhat, result, n_star


def run_trial(
    spec: ScenarioSpec,
    regime: str,
    p: float,
    method: str,
    trial_seed: int,
    *,
    reshape: Union[str, int] = "auto",
    admm: AdmmConfig = AdmmConfig(),
    als: AlsConfig = AlsConfig(),
    burst: BurstSpec = BurstSpec(),
) -> TrialOutcome:
    """One experiment: truth from ``spec``, a mask at level ``p`` seeded by
    ``trial_seed``, one recovery and its MAE over the missing entries.

    Solver failures are reported in the outcome instead of raised.
    """
    X = _truth(spec)
    observed = make_observed(X, regime, p, mix_seed(trial_seed, 1), burst)
    if observed.n_missing == 0:
        return TrialOutcome(status="no-missing", error="no missing entries; MAE undefined")
    solver_seed = mix_seed(trial_seed, 2)
    admm = _with_seed(admm, solver_seed)
    als = _with_seed(als, solver_seed)
    try:
        Xhat, result, n_star = recover(observed, method, reshape=reshape, admm=admm, als=als)
    except PmuRecoverError as exc:
        return TrialOutcome(status="failed", error=f"{type(exc).__name__}: {exc}")
    mae = mae_missing(Xhat, X, observed.mask)
    if result is None:
        return TrialOutcome(status="ok", mae=mae, converged=True)
    return TrialOutcome(
        status="ok",
        mae=mae,
        iterations=result.iterations,
        converged=result.converged,
        elapsed=result.elapsed,
        n_star=n_star,
    )


def _with_seed(cfg, seed):
    return replace(cfg, init_seed=seed)


@dataclass(frozen=True)
class BenchmarkGrid:
    spec: ScenarioSpec = ScenarioSpec()
    probabilities: tuple = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))
    methods: tuple = ("admm", "als")
    trials: int = 50
    base_seed: int = 0
    regime: str = "random"
    reshape: Union[str, int] = "auto"
    admm: AdmmConfig = AdmmConfig()
    als: AlsConfig = AlsConfig()

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        for p in self.probabilities:
            if not 0.0 <= p <= 1.0:
                raise ParameterError(f"probability {p!r} outside [0, 1]")
        for m in self.methods:
            if m not in METHODS:
                raise ParameterError(f"unknown method {m!r}")
        if self.regime not in ("random", "rows"):
            raise ParameterError(f"benchmark regime must be 'random' or 'rows', got {self.regime!r}")


@dataclass(frozen=True)
class MaeStats:
    """Aggregate over one (method, probability) cell.

    ``per_trial`` has one entry per trial, NaN where the trial failed or had
    nothing missing; ``mean``, ``min`` and ``max`` ignore those entries and
    are NaN when no trial succeeded.
    """

    method: str
    scenario: str
    observed_probability: float
    trials: int
    mean: float
    min: float
    max: float
    per_trial: tuple = field(repr=False)
    failures: int = 0
    undefined: int = 0
    mean_iterations: float = math.nan
    mean_elapsed: float = field(default=math.nan, compare=False)  # wall time varies

    @property
    def succeeded(self) -> int:
        return self.trials - self.failures - self.undefined


def _aggregate(method, grid, p, outcomes) -> MaeStats:
    maes = np.array([o.mae if o.status == "ok" else np.nan for o in outcomes])
    ok = [o for o in outcomes if o.status == "ok"]
    good = maes[~np.isnan(maes)]
    if good.size:
        mean, lo, hi = float(good.mean()), float(good.min()), float(good.max())
        iters = float(np.mean([o.iterations for o in ok]))
        elapsed = float(np.mean([o.elapsed for o in ok]))
    else:
        mean = lo = hi = iters = elapsed = math.nan
    return MaeStats(
        method=method,
        scenario=grid.regime,
        observed_probability=float(p),
        trials=grid.trials,
        mean=mean,
        min=lo,
        max=hi,
        per_trial=tuple(float(m) for m in maes),
        failures=sum(o.status == "failed" for o in outcomes),
        undefined=sum(o.status == "no-missing" for o in outcomes),
        mean_iterations=iters,
        mean_elapsed=elapsed,
    )


def _task(args):
    grid, method, p, seed = args
    return run_trial(
        grid.spec, grid.regime, p, method, seed,
        reshape=grid.reshape, admm=grid.admm, als=grid.als,
    )


def run_monte_carlo(grid: BenchmarkGrid, workers: int = 1) -> list[MaeStats]:
    """Run every (method, probability) cell of ``grid``.

    Output is ordered by method (grid order) then probability. With
    ``workers > 1`` trials run in a process pool; results are identical to a
    sequential run because each trial depends only on its own seed.
    """
    tasks = [
        (grid, method, p, mix_seed(grid.base_seed, cell, trial))
        for method in grid.methods
        for cell, p in enumerate(grid.probabilities)
        for trial in range(grid.trials)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_task, tasks, chunksize=max(1, grid.trials // 4)))
    else:
        outcomes = [_task(t) for t in tasks]
    stats = []
    i = 0
    for method in grid.methods:
        for p in grid.probabilities:
            stats.append(_aggregate(method, grid, p, outcomes[i : i + grid.trials]))
            i += grid.trials
    return stats


@dataclass(frozen=True)
class Comparison:
    """Truth and reconstructions over a window of instants.

    ``traces[name][c]`` is the series for 1-based channel ``c`` over
    ``instants``; ``name`` is ``"truth"`` or a method. ``burst_mae[method]``
    is None when the burst removes nothing.
    """

    instants: np.ndarray
    channels: tuple
    traces: dict
    burst_mae: dict
    iterations: dict


def compare_methods(
    spec: ScenarioSpec = ScenarioSpec(),
    burst: BurstSpec = BurstSpec(),
    *,
    window: tuple = (1, 300),
    methods: Sequence[str] = METHODS,
    admm: AdmmConfig = AdmmConfig(),
    als: AlsConfig = AlsConfig(),
) -> Comparison:
    """Recover a burst outage with each method and tabulate the traces."""
    X = _truth(spec)
    observed = apply_burst_mask(X, burst.channels, burst.t_start, burst.t_end)
    lo, hi = window
    if not 1 <= lo <= hi <= X.shape[0]:
        raise ParameterError(f"window {window} outside [1, {X.shape[0]}]")
    rows = slice(lo - 1, hi)
    channels = tuple(burst.channels)
    traces = {"truth": {c: X[rows, c - 1].copy() for c in channels}}
    burst_mae, iterations = {}, {}
    for method in methods:
        if observed.n_missing == 0:
            burst_mae[method] = None
            iterations[method] = 0
            traces[method] = {c: X[rows, c - 1].copy() for c in channels}
            continue
        Xhat, result, _ = recover(observed, method, reshape="off", admm=admm, als=als)
        burst_mae[method] = mae_missing(Xhat, X, observed.mask)
        iterations[method] = result.iterations if result is not None else 0
        traces[method] = {c: Xhat[rows, c - 1].copy() for c in channels}
    return Comparison(
        instants=np.arange(lo, hi + 1),
        channels=channels,
        traces=traces,
        burst_mae=burst_mae,
        iterations=iterations,
    )

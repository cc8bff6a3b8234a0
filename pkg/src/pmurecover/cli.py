"""Command-line interface.

Exit codes: 0 success, 2 parameter error, 3 degenerate input,
4 solver divergence, 5 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import asdict, replace

import numpy as np

from . import __version__
from .datagen import EventSpec, ScenarioSpec, generate_synthetic
from .errors import MatrixFileError, ParameterError, PmuRecoverError
from .fileio import (
    RunReport,
    grid_from_kv,
    parse_reshape,
    read_kv_file,
    read_matrix_csv,
    scenario_from_kv,
    write_benchmark_csv,
    write_comparison_csv,
    write_mask_csv,
    write_matrix_csv,
    write_report,
)
from .harness import BurstSpec, compare_methods, make_observed, recover, run_monte_carlo
from .matcore import ObservedMatrix, approximate_rank, as_dense, mae_missing, singular_values
from .reshape import ReshapePlan
from .solvers import AdmmConfig, AlsConfig

log = logging.getLogger("pmurecover")


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _channels(text):
    """``1-9`` or ``1,3,5`` or a mix (``1-3,7``); empty string for none."""
    out = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _add_solver_args(p):
    g = p.add_argument_group("ADMM")
    g.add_argument("--rho", type=float, default=7.5e-4, help="penalty weight (default 0.00075)")
    g.add_argument("--eps", type=float, default=None, help="absolute stopping threshold")
    g.add_argument("--rel-eps", type=float, default=1e-4, help="relative stopping threshold (default 1e-4)")
    g.add_argument("--k-max", type=int, default=5000, help="iteration cap (default 5000)")
    g.add_argument("--relaxation", type=float, default=0.5, help="primal relaxation in (0,1] (default 0.5)")
    g.add_argument("--init-scale", type=float, default=1.0)
    g.add_argument("--clamp-observed", action="store_true", help="copy observed entries into the output")
    g = p.add_argument_group("ALS")
    g.add_argument("--rank", type=int, default=20, help="factor rank r (default 20)")
    g.add_argument("--lambda", dest="lam", type=float, default=1.5, help="ridge weight (default 1.5)")
    g.add_argument("--max-iters", type=int, default=500)
    g.add_argument("--tol", type=float, default=1e-4, help="relative objective change (default 1e-4)")
    g.add_argument("--als-init", choices=("random", "svd"), default="random")
    p.add_argument("--seed", type=int, default=0, help="solver initialization seed")


def _solver_configs(args):
    admm = AdmmConfig(
        rho=args.rho, eps=args.eps, rel_eps=args.rel_eps, k_max=args.k_max,
        init_seed=args.seed, init_scale=args.init_scale, relaxation=args.relaxation,
        clamp_observed=args.clamp_observed,
    )
    als = AlsConfig(
        rank_r=args.rank, lam=args.lam, max_iters=args.max_iters, tol=args.tol,
        init_seed=args.seed, init=args.als_init,
    )
    return admm, als


def _add_scenario_args(p):
    g = p.add_argument_group("scenario (override --config)")
    g.add_argument("--config", help="key = value file with scenario/grid settings")
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--signal-rank", type=int)
    g.add_argument("--noise-var", type=float)
    g.add_argument("--scenario-seed", type=int)
    g.add_argument("--no-event", action="store_true")
    g.add_argument("--event-onset", type=int)
    g.add_argument("--event-damping", type=float)
    g.add_argument("--event-frequency", type=float)
    g.add_argument("--event-amplitude", type=float)


def _config_kv(args) -> dict:
    kv = read_kv_file(args.config) if args.config else {}
    pairs = {
        "rows": args.rows, "cols": args.cols, "signal_rank": args.signal_rank,
        "noise_var": args.noise_var, "seed": args.scenario_seed,
        "event_onset": args.event_onset, "event_damping": args.event_damping,
        "event_frequency": args.event_frequency, "event_amplitude": args.event_amplitude,
    }
    kv.update({k: str(v) for k, v in pairs.items() if v is not None})
    if args.no_event:
        kv["event"] = "none"
    return kv


def cmd_simulate(args):
    spec = scenario_from_kv(_config_kv(args))
    X = generate_synthetic(spec)
    write_matrix_csv(X, args.output)
    log.info("wrote %dx%d matrix to %s", *X.shape, args.output)
    return 0


def cmd_mask(args):
    X = as_dense(read_matrix_csv(args.input, missing_policy="strict"), "input")
    burst = BurstSpec(_channels(args.channels), args.t_start, args.t_end)
    observed = make_observed(X, args.regime, args.p, args.seed, burst)
    write_matrix_csv(observed, args.output)
    if args.mask_output:
        write_mask_csv(observed.mask, args.mask_output)
    print(f"missing entries: {observed.n_missing} of {observed.mask.size}")
    return 0


def cmd_svdrank(args):
    loaded = read_matrix_csv(args.input)
    X = loaded.values if isinstance(loaded, ObservedMatrix) else loaded
    s = singular_values(X)
    shown = s if args.top is None else s[: args.top]
    for i, v in enumerate(shown, start=1):
        print(f"sigma_{i} = {float(v)!r}")
    print(f"approximate_rank(beta={args.beta}) = {approximate_rank(s, args.beta)}")
    return 0


def cmd_complete(args):
    loaded = read_matrix_csv(args.input, missing_policy=args.missing_policy, mask_path=args.mask)
    observed = loaded if isinstance(loaded, ObservedMatrix) else ObservedMatrix.fully_observed(loaded)
    admm, als = _solver_configs(args)
    reshape = parse_reshape(args.reshape)
    t0 = time.perf_counter()
    Xhat, result, n_star = recover(observed, args.method, reshape=reshape, admm=admm, als=als)
    elapsed = time.perf_counter() - t0
    write_matrix_csv(Xhat, args.output)

    mae = None
    if args.truth:
        truth = as_dense(read_matrix_csv(args.truth, missing_policy="strict"), "truth")
        mae = mae_missing(Xhat, truth, observed.mask)
    config = {"input": args.input, "mask": args.mask, "missing_policy": args.missing_policy,
              "reshape": args.reshape, "truth": args.truth}
    if args.method == "admm":
        config.update({f"admm.{k}": v for k, v in asdict(admm).items()})
    elif args.method == "als":
        config.update({f"als.{k}": v for k, v in asdict(als).items()})
    report = RunReport(
        method=args.method,
        config=config,
        converged=result.converged if result else True,
        iterations=result.iterations if result else 0,
        final_residual=result.final_residual if result else 0.0,
        elapsed_ms=elapsed * 1e3,
        mae=mae,
        reshape=ReshapePlan(*observed.shape, n_star) if n_star > 1 else None,
    )
    if args.report:
        write_report(report, args.report)
    for k, v in report.items():
        if not k.startswith("config."):
            print(f"{k} = {v}")
    return 0


def cmd_benchmark(args):
    kv = _config_kv(args)
    overrides = {
        "probabilities": args.probabilities, "methods": args.methods, "trials": args.trials,
        "base_seed": args.base_seed, "regime": args.regime, "reshape": args.reshape,
        "rho": args.rho, "lambda": args.lam, "rank": args.rank, "als_init": args.als_init,
    }
    kv.update({k: str(v) for k, v in overrides.items() if v is not None})
    grid = grid_from_kv(kv)
    stats = run_monte_carlo(grid, workers=args.workers)
    write_benchmark_csv(stats, args.output)
    for s in stats:
        print(f"{s.method:10s} p={s.observed_probability:.2f} mean={s.mean:.5f} "
              f"min={s.min:.5f} max={s.max:.5f} failed={s.failures}")
    return 0


def cmd_compare(args):
    spec = scenario_from_kv(_config_kv(args))
    admm, als = _solver_configs(args)
    burst = BurstSpec(_channels(args.channels), args.t_start, args.t_end)
    comp = compare_methods(spec, burst, window=(args.window_start, args.window_end),
                           admm=admm, als=als)
    write_comparison_csv(comp, args.output)
    for method, mae in comp.burst_mae.items():
        print(f"{method} burst_mae = {'undefined' if mae is None else repr(mae)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmurecover", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complete", help="fill missing entries of a matrix file")
    p.add_argument("input")
    p.add_argument("--mask", help="0/1 sidecar mask (authoritative)")
    p.add_argument("--missing-policy", choices=("empty-or-nan", "strict"), default="empty-or-nan")
    p.add_argument("--method", choices=("admm", "als", "persistent"), default="admm")
    p.add_argument("--reshape", default="auto", help="auto | off | n=<k> (default auto)")
    p.add_argument("--truth", help="ground-truth matrix; adds MAE to the report")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", help="write a key = value run report here")
    _add_solver_args(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("simulate", help="write a synthetic ground-truth matrix")
    _add_scenario_args(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mask", help="remove entries from a matrix file")
    p.add_argument("input")
    p.add_argument("--regime", choices=("random", "rows", "burst"), default="random")
    p.add_argument("--p", type=float, default=0.9, help="observed probability (entries or rows)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--channels", default="1-9", help="burst channels, 1-based (default 1-9)")
    p.add_argument("--t-start", type=int, default=90)
    p.add_argument("--t-end", type=int, default=200)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--mask-output", help="also write the 0/1 mask sidecar")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("svdrank", help="singular values and approximate rank")
    p.add_argument("input")
    p.add_argument("--beta", type=float, default=0.995)
    p.add_argument("--top", type=int, default=None, help="print only the leading values")
    p.set_defaults(func=cmd_svdrank)

    p = sub.add_parser("benchmark", help="Monte Carlo MAE against observed probability")
    _add_scenario_args(p)
    p.add_argument("--probabilities", help="comma list (default 0.5,0.55,...,0.95)")
    p.add_argument("--methods", help="comma list of admm,als,persistent (default admm,als)")
    p.add_argument("--trials", type=int, help="trials per cell (default 50)")
    p.add_argument("--base-seed", type=int)
    p.add_argument("--regime", choices=("random", "rows"))
    p.add_argument("--reshape", help="auto | off | n=<k>")
    p.add_argument("--rho", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--rank", type=int)
    p.add_argument("--als-init", choices=("random", "svd"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("compare", help="burst outage: truth vs every method")
    _add_scenario_args(p)
    p.add_argument("--channels", default="1-9")
    p.add_argument("--t-start", type=int, default=90)
    p.add_argument("--t-end", type=int, default=200)
    p.add_argument("--window-start", type=int, default=1)
    p.add_argument("--window-end", type=int, default=300)
    _add_solver_args(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except PmuRecoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return MatrixFileError.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ParameterError.exit_code


if __name__ == "__main__":
    sys.exit(main())

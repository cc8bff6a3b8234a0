"""Matrix, mask, report and configuration files.

Matrix CSV
    One row per line, comma separated, no header. Floats are written with
    ``repr`` (shortest text that parses back to the same double). Missing
    cells are written blank. On read, blank cells and the token ``NaN``
    mark missing entries unless ``missing_policy="strict"``.
Mask sidecar
    Same shape, cells ``0`` (missing) or ``1`` (observed). When given it
    is authoritative: value cells under a 0 are zeroed whatever they hold.
Report
    ``key = value`` lines; the first is ``schema_version = 1``.
Config
    ``key = value`` lines; ``#`` starts a comment; blank lines ignored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import (
    MaskShapeError,
    MaskValueError,
    MatrixFileError,
    NonNumericTokenError,
    ParameterError,
    RaggedRowsError,
)
from .matcore import ObservedMatrix, as_dense
from .reshape import ReshapePlan

REPORT_SCHEMA_VERSION = 1
MISSING_POLICIES = ("empty-or-nan", "strict")


def _read_rows(path) -> list[list[str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc.strerror or exc}") from exc
    rows = [line.split(",") for line in text.splitlines() if line.strip()]
    if not rows:
        raise MatrixFileError(f"{path}: file holds no rows")
    width = len(rows[0])
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise RaggedRowsError(f"{path}: line {i} has {len(row)} fields, expected {width}")
    return rows


def read_mask_csv(path) -> np.ndarray:
    rows = _read_rows(path)
    mask = np.empty((len(rows), len(rows[0])), dtype=np.uint8)
    for i, row in enumerate(rows):
        for j, tok in enumerate(row):
            tok = tok.strip()
            if tok not in ("0", "1"):
                raise MaskValueError(
                    f"{path}: line {i + 1}, field {j + 1}: mask value {tok!r} is not 0 or 1"
                )
            mask[i, j] = tok == "1"
    return mask


def read_matrix_csv(
    path,
    missing_policy: str = "empty-or-nan",
    mask_path=None,
) -> Union[np.ndarray, ObservedMatrix]:
    """Load a matrix file.

    Returns a plain array when nothing is missing and no mask sidecar is
    given, otherwise an :class:`ObservedMatrix`.
    """
    if missing_policy not in MISSING_POLICIES:
        raise ParameterError(f"missing_policy must be one of {MISSING_POLICIES}")
    rows = _read_rows(path)
    shape = (len(rows), len(rows[0]))
    sidecar = read_mask_csv(mask_path) if mask_path is not None else None
    if sidecar is not None and sidecar.shape != shape:
        raise MaskShapeError(f"mask {mask_path} has shape {sidecar.shape}, values {path} {shape}")

    values = np.zeros(shape)
    mask = np.ones(shape, dtype=np.uint8)
    for i, row in enumerate(rows):
        for j, raw in enumerate(row):
            tok = raw.strip()
            where = f"{path}: line {i + 1}, field {j + 1}"
            if sidecar is not None and not sidecar[i, j]:
                mask[i, j] = 0
                continue
            if tok == "" or tok.lower() == "nan":
                if sidecar is not None:
                    raise NonNumericTokenError(f"{where}: missing value where the mask says observed")
                if missing_policy == "strict":
                    raise NonNumericTokenError(f"{where}: missing value under the strict policy")
                mask[i, j] = 0
                continue
            try:
                x = float(tok)
            except ValueError:
                raise NonNumericTokenError(f"{where}: {tok!r} is not a number") from None
            if not math.isfinite(x):
                raise NonNumericTokenError(f"{where}: {tok!r} is not finite")
            values[i, j] = x
    if sidecar is None and mask.all():
        return values
    return ObservedMatrix(values, mask)


def _write_text(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise MatrixFileError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_matrix_csv(matrix, path) -> None:
    """Write an array, or an ObservedMatrix with blank missing cells."""
    if isinstance(matrix, ObservedMatrix):
        values, mask = matrix.values, matrix.mask
    else:
        values = as_dense(matrix)
        mask = np.ones(values.shape, dtype=np.uint8)
    lines = [
        ",".join(repr(float(x)) if m else "" for x, m in zip(vrow, mrow))
        for vrow, mrow in zip(values, mask)
    ]
    _write_text(path, "\n".join(lines) + "\n")


def write_mask_csv(mask, path) -> None:
    mask = np.asarray(mask)
    _write_text(path, "\n".join(",".join("1" if b else "0" for b in row) for row in mask) + "\n")


@dataclass
class RunReport:
    """Summary of one ``complete`` run, enough to repeat it."""

    method: str
    config: dict = field(default_factory=dict)
    converged: bool = True
    iterations: int = 0
    final_residual: float = math.nan
    elapsed_ms: float = 0.0
    mae: Optional[float] = None
    reshape: Optional[ReshapePlan] = None

    def items(self) -> list[tuple[str, str]]:
        out = [
            ("schema_version", str(REPORT_SCHEMA_VERSION)),
            ("method", self.method),
            ("converged", "true" if self.converged else "false"),
            ("iterations", str(self.iterations)),
            ("final_residual", repr(float(self.final_residual))),
            ("elapsed_ms", f"{self.elapsed_ms:.3f}"),
        ]
        if self.mae is not None:
            out.append(("mae", repr(float(self.mae))))
        if self.reshape is not None:
            p = self.reshape
            out += [
                ("reshape.n1", str(p.n1)),
                ("reshape.n2", str(p.n2)),
                ("reshape.n_star", str(p.n_star)),
                ("reshape.seg_len", str(p.seg_len)),
            ]
        out += [(f"config.{k}", _fmt(v)) for k, v in sorted(self.config.items())]
        return out


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return "none"
    return str(v)


def write_report(report: RunReport, path) -> None:
    _write_text(path, "".join(f"{k} = {v}\n" for k, v in report.items()))


def read_kv_file(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file into a dict of strings."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc.strerror or exc}") from exc
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}: line {n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


read_report = read_kv_file


_SCENARIO_KEYS = {
    "rows": int,
    "cols": int,
    "signal_rank": int,
    "noise_var": float,
    "seed": int,
}
_EVENT_KEYS = {
    "event_onset": ("onset", int),
    "event_damping": ("damping", float),
    "event_frequency": ("frequency", float),
    "event_amplitude": ("amplitude", float),
}


def _parse(conv, key, value):
    try:
        return conv(value)
    except ValueError:
        raise ParameterError(f"config key {key!r}: cannot parse {value!r}") from None


def scenario_from_kv(kv: dict):
    """Build a ScenarioSpec from config keys; unknown keys are ignored so
    one file can also carry benchmark settings. ``event = none`` drops the
    transient."""
    from .datagen import EventSpec, ScenarioSpec

    args = {k: _parse(conv, k, kv[k]) for k, conv in _SCENARIO_KEYS.items() if k in kv}
    if kv.get("event", "on").lower() in ("none", "off", "false", "0"):
        args["event"] = None
    else:
        ev = {name: _parse(conv, k, kv[k]) for k, (name, conv) in _EVENT_KEYS.items() if k in kv}
        args["event"] = EventSpec(**ev)
    return ScenarioSpec(**args)


def _split(value, conv, key):
    return tuple(_parse(conv, key, v.strip()) for v in value.split(",") if v.strip())


def grid_from_kv(kv: dict):
    """Build a BenchmarkGrid (scenario keys included) from config keys."""
    from dataclasses import replace

    from .harness import BenchmarkGrid
    from .solvers import AdmmConfig, AlsConfig

    args = {"spec": scenario_from_kv(kv)}
    if "probabilities" in kv:
        args["probabilities"] = _split(kv["probabilities"], float, "probabilities")
    if "methods" in kv:
        args["methods"] = _split(kv["methods"], str, "methods")
    for key in ("trials", "base_seed"):
        if key in kv:
            args[key] = _parse(int, key, kv[key])
    if "regime" in kv:
        args["regime"] = kv["regime"]
    if "reshape" in kv:
        args["reshape"] = parse_reshape(kv["reshape"])
    admm, als = AdmmConfig(), AlsConfig()
    if "rho" in kv:
        admm = replace(admm, rho=_parse(float, "rho", kv["rho"]))
    if "relaxation" in kv:
        admm = replace(admm, relaxation=_parse(float, "relaxation", kv["relaxation"]))
    if "k_max" in kv:
        admm = replace(admm, k_max=_parse(int, "k_max", kv["k_max"]))
    if "rank" in kv:
        als = replace(als, rank_r=_parse(int, "rank", kv["rank"]))
    if "lambda" in kv:
        als = replace(als, lam=_parse(float, "lambda", kv["lambda"]))
    if "als_init" in kv:
        als = replace(als, init=kv["als_init"])
    args["admm"], args["als"] = admm, als
    return BenchmarkGrid(**args)


def parse_reshape(value: str):
    """``auto``, ``off`` or ``n=<k>``."""
    value = value.strip()
    if value in ("auto", "off"):
        return value
    if value.startswith("n="):
        try:
            k = int(value[2:])
        except ValueError:
            pass
        else:
            if k >= 1:
                return k
    raise ParameterError(f"reshape must be 'auto', 'off' or 'n=<k>', got {value!r}")


def write_benchmark_csv(stats, path) -> None:
    header = (
        "method,regime,observed_probability,trials,succeeded,failures,undefined,"
        "mean_mae,min_mae,max_mae,mean_iterations,mean_elapsed_ms"
    )
    lines = [header]
    for s in stats:
        lines.append(
            ",".join(
                [
                    s.method,
                    s.scenario,
                    repr(s.observed_probability),
                    str(s.trials),
                    str(s.succeeded),
                    str(s.failures),
                    str(s.undefined),
                    repr(s.mean),
                    repr(s.min),
                    repr(s.max),
                    repr(s.mean_iterations),
                    repr(s.mean_elapsed * 1e3),
                ]
            )
        )
    _write_text(path, "\n".join(lines) + "\n")


def write_comparison_csv(comparison, path) -> None:
    names = ["truth"] + [m for m in comparison.traces if m != "truth"]
    lines = ["instant,channel," + ",".join(names)]
    for c in comparison.channels:
        for k, t in enumerate(comparison.instants):
            row = [str(int(t)), str(c)] + [repr(float(comparison.traces[n][c][k])) for n in names]
            lines.append(",".join(row))
    _write_text(path, "\n".join(lines) + "\n")

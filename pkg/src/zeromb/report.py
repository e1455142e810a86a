"""(R, Q) sweeps and CSV/JSON emission.

CSV files start with '#'-prefixed ``key=value`` lines holding the resolved
parameters, followed by one header row and the data rows (LF endings, no
quoting).  Floats are written with 17 significant digits in CSV and with the
shortest round-tripping repr in JSON.
"""
from __future__ import annotations

import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import __version__
from .criteria import DEFAULT_A_MAX, Classification, CriterionReport, Shared, classify, shared_quantities
from .growth import GrowthResult
from .params import BC, Params
from .timedomain import EnergyTrace

WORKERS_ENV = "ZEROMB_WORKERS"

ROW_COLUMNS = ("R", "Q", "classification", "R0", "lambda0", "upsilon1", "upsilon2", "lambda_star",
               "exact_margin", "sufficient_margin", "error")


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    if not raw:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer")
    return n


def parse_values(spec: str | Sequence[float]) -> list[float]:
    """'1,2,3' or 'lo:hi:count' (inclusive linear range) or a sequence of numbers."""
    if not isinstance(spec, str):
        return [float(v) for v in spec]
    s = spec.strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be lo:hi:count, got {spec!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ValueError("range count must be positive")
        return [float(v) for v in np.linspace(lo, hi, n)]
    return [float(v) for v in s.split(",") if v.strip()]


@dataclass
class SweepSpec:
    R_values: list[float]
    Q_values: list[float]
    P_theta: float = 1.0
    tau: float = 1.0
    L1: float = 1.0
    L2: float = 1.0
    bc: BC = BC.RIGID
    N: int = 96
    a_max: float = DEFAULT_A_MAX
    workers: int = 1

    def __post_init__(self):
        self.R_values = parse_values(self.R_values)
        self.Q_values = parse_values(self.Q_values)
        if not self.R_values or not self.Q_values:
            raise ValueError("R_values and Q_values must be nonempty")
        self.bc = BC.parse(self.bc)
        for R in self.R_values:
            self.params(R, 0.0)
        for Q in self.Q_values:
            self.params(self.R_values[0], Q)
        if self.tau != 1.0:
            raise ValueError("classification requires tau = 1")
        if self.N < 2 or self.workers < 1:
            raise ValueError("N must be >= 2 and workers >= 1")

    def params(self, R: float, Q: float) -> Params:
        return Params(R=R, Q=Q, P_theta=self.P_theta, tau=self.tau, L1=self.L1, L2=self.L2, bc=self.bc)

    def header(self) -> dict:
        return {"P_theta": self.P_theta, "tau": self.tau, "L1": self.L1, "L2": self.L2,
                "bc": self.bc.value, "N": self.N, "a_max": self.a_max,
                "R_values": self.R_values, "Q_values": self.Q_values}


@dataclass
class SweepReport:
    rows: list[dict]
    metadata: dict = field(default_factory=dict)


def _row(R: float, Q: float, c: Classification | None, err: str = "") -> dict:
    if c is None:
        return {"R": R, "Q": Q, "classification": "Error", "R0": math.nan, "lambda0": math.nan,
                "upsilon1": math.nan, "upsilon2": math.nan, "lambda_star": None,
                "exact_margin": math.nan, "sufficient_margin": math.nan, "error": err}
    r = c.report
    return {"R": R, "Q": Q, "classification": c.verdict, "R0": c.R0, "lambda0": c.lambda0,
            "upsilon1": r.upsilon1_sup, "upsilon2": r.upsilon2, "lambda_star": c.lambda_star,
            "exact_margin": r.instab_exact_margin, "sufficient_margin": r.instab_sufficient_margin,
            "error": ""}


def _cell(args) -> dict:
    spec, shared, R, Q = args
    try:
        c = classify(spec.params(R, Q), spec.N, spec.a_max, shared=shared, alt=False)
        return _row(R, Q, c)
    except Exception as exc:  # recorded per cell, never aborts the sweep
        return _row(R, Q, None, type(exc).__name__)


def run_sweep(spec: SweepSpec) -> SweepReport:
    """Classify every (R, Q) cell; R0 and xi are computed once and shared with the workers."""
    t0 = time.perf_counter()
    shared: Shared = shared_quantities(spec.params(spec.R_values[0], 0.0), spec.N, spec.a_max)
    cells = [(spec, shared, R, Q) for R in sorted(spec.R_values) for Q in sorted(spec.Q_values)]
    if spec.workers == 1:
        rows = [_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(_cell, cells))
    rows.sort(key=lambda r: (r["R"], r["Q"]))
    meta = {"version": __version__, "params": spec.header(), "R0": shared.R0.value, "xi": shared.xi,
            "wall_time": time.perf_counter() - t0}
    return SweepReport(rows, meta)


# ---------------------------------------------------------------- emission

def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def _comment_lines(header: dict) -> list[str]:
    out = []
    for k, v in header.items():
        if isinstance(v, (list, tuple)):
            v = ";".join(_fmt(x) for x in v)
        else:
            v = _fmt(v)
        out.append(f"# {k}={v}")
    return out


def _csv(header: dict, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    lines = _comment_lines(header) + [",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, BC):
        return v.value
    return v


def to_json(obj: dict) -> str:
    return json.dumps(_jsonable(obj), indent=1, sort_keys=False) + "\n"


def render(obj, fmt: str, params: dict | None = None) -> str:
    """Serialize a report object; ``params`` is embedded when the object lacks its own."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    header = {"version": __version__}
    if isinstance(obj, SweepReport):
        header.update(obj.metadata.get("params", {}))
        if fmt == "json":
            meta = {k: v for k, v in obj.metadata.items()}
            return to_json({"metadata": meta, "rows": obj.rows})
        return _csv(header, ROW_COLUMNS, [[r[c] for c in ROW_COLUMNS] for r in obj.rows])
    if isinstance(obj, EnergyTrace):
        header.update(params or {})
        if fmt == "json":
            return to_json({"params": params or {}, **obj.as_dict()})
        header["identity_residual"] = obj.identity_residual
        header["flags"] = list(obj.flags)
        return _csv(header, ("t", "E", "D", "S"), obj.samples)
    if isinstance(obj, GrowthResult):
        header.update(obj.params)
        if fmt == "json":
            return to_json(obj.as_dict())
        for k in ("lambda", "a_star", "lambda0", "tau", "fixed_point_residual", "precondition_ok",
                  "analytic_condition", "annotation", "bounds"):
            header[k] = obj.as_dict()[k]
        return _csv(header, ("iteration", "s", "alpha"), obj.trace)
    if isinstance(obj, CriterionReport):
        header.update(params or {})
        d = obj.as_dict()
        if fmt == "json":
            return to_json({"params": params or {}, **d})
        return _csv(header, tuple(d), [tuple(d.values())])
    if isinstance(obj, Classification):
        header.update(obj.params)
        d = obj.as_dict()
        if fmt == "json":
            if obj.growth is not None:
                d["growth"] = obj.growth.as_dict()
            return to_json(d)
        flat = {"verdict": obj.verdict, "witnesses": ";".join(obj.witnesses), "R0": obj.R0,
                "lambda0": obj.lambda0, "xi": obj.xi, "lambda_star": obj.lambda_star}
        flat.update(obj.report.as_dict())
        return _csv(header, tuple(flat), [tuple(flat.values())])
    if isinstance(obj, dict):
        merged = dict(params or {})
        if fmt == "json":
            return to_json({"params": merged, **obj} if params else obj)
        header.update(merged)
        return _csv(header, tuple(obj), [tuple(obj.values())])
    raise TypeError(f"cannot emit {type(obj).__name__}")


def emit(obj, fmt: str, path: str | None, params: dict | None = None) -> None:
    """Write ``obj`` as csv or json to ``path`` ('-' or None: stdout)."""
    text = render(obj, fmt, params)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with io.open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc

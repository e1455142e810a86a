"""Command-line front end.

Every subcommand accepts ``--config FILE`` with flat ``key=value`` lines
(``#`` starts a comment); command-line flags override the file.
Exit status: 0 success, 1 error, 2 verification failure.
"""
from __future__ import annotations

import argparse
import math
import sys

from .criteria import DEFAULT_A_MAX, classify, galdi_resistive_threshold
from .growth import fixed_point_lambda
from .params import build_lattice, validate_params
from .report import SweepSpec, default_workers, emit, parse_values, run_sweep
from .timedomain import simulate_and_fit
from .variational import DEFAULT_N, Search, critical_R0, lambda0

PARAM_KEYS = ("R", "Q", "P_theta", "tau", "L1", "L2", "bc")
BUILTIN = {"Q": 0.0, "P_theta": 1.0, "tau": 1.0, "L1": 1.0, "L2": 1.0, "bc": "rigid",
           "N": DEFAULT_N, "a_max": DEFAULT_A_MAX, "format": "json", "out": "-", "search": "continuous",
           "init": "eigen"}


class CLIError(Exception):
    pass


def read_config(path: str) -> dict:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CLIError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CLIError(f"{path}:{n}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _common(p: argparse.ArgumentParser, params=True):
    if params:
        p.add_argument("--R", type=float, help="square root of the Rayleigh number")
        p.add_argument("--Q", type=float, help="Chandrasekhar number")
        p.add_argument("--P_theta", type=float, help="Prandtl number")
        p.add_argument("--tau", type=float, help="viscosity weight in (0, 1]")
        p.add_argument("--L1", type=float, help="horizontal period 2*pi*L1")
        p.add_argument("--L2", type=float, help="horizontal period 2*pi*L2")
        p.add_argument("--bc", help="rigid or stress-free")
        p.add_argument("--N", type=int, help="number of vertical elements")
        p.add_argument("--a_max", type=float, help="lattice cutoff |k| <= a_max")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output path ('-' for stdout)")
    p.add_argument("--config", help="key=value defaults file")


def _search_flag(p):
    p.add_argument("--search", choices=("continuous", "lattice"),
                   help="continuous a-search or lattice modes up to a_max")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zeromb", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("critical", help="critical R0 and wavenumber a_c")
    _common(p)
    _search_flag(p)
    p = sub.add_parser("lambda0", help="largest thermal growth Lambda0")
    _common(p)
    _search_flag(p)
    p = sub.add_parser("growth", help="growth rate Lambda(tau) as a fixed point, with bounds")
    _common(p)
    _search_flag(p)
    p = sub.add_parser("classify", help="stable / unstable / indeterminate with witnesses")
    _common(p)

    p = sub.add_parser("sweep", help="classify an (R, Q) grid")
    _common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--R_values", help="R values: 'a,b,c' or 'lo:hi:count'")
    g.add_argument("--Ra_values", help="Rayleigh numbers R^2: 'a,b,c' or 'lo:hi:count'")
    p.add_argument("--Q_values", help="Q values: 'a,b,c' or 'lo:hi:count'")
    p.add_argument("--workers", type=int, help="worker processes (default from ZEROMB_WORKERS or 1)")

    p = sub.add_parser("simulate", help="integrate one mode in time and fit the growth rate")
    _common(p)
    p.add_argument("--a", type=float, help="horizontal wavenumber magnitude")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--t_end", type=float, help="final time")
    p.add_argument("--init", choices=("eigen", "zero"))

    p = sub.add_parser("galdi", help="resistive stability threshold on R_sigma")
    _common(p, params=False)
    p.add_argument("--R_s", type=float)
    p.add_argument("--Q_sigma", type=float)
    p.add_argument("--P_m", type=float)
    p.add_argument("--P_theta", type=float)

    p = sub.add_parser("verify", help="run the acceptance suite and print a pass/fail table")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--config", help=argparse.SUPPRESS)
    return ap


def resolve(args: argparse.Namespace) -> dict:
    """Flags over config file over built-in defaults."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    known = set(vars(args))
    unknown = set(cfg) - known
    if unknown:
        raise CLIError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    out = dict(BUILTIN)
    out.update(cfg)
    out.update({k: v for k, v in vars(args).items() if v is not None})
    return out


def _params(opts: dict, need_R=True):
    raw = {k: opts[k] for k in PARAM_KEYS if k in opts}
    if "R" not in raw:
        if need_R:
            raise CLIError("--R is required")
        raw["R"] = 1.0
    return validate_params(raw)


def _search(opts, params):
    if opts["search"] == "continuous":
        return Search.continuous()
    return Search.lattice(build_lattice(params, float(opts["a_max"])))


def _float(opts, key):
    if key not in opts:
        raise CLIError(f"--{key} is required")
    try:
        return float(opts[key])
    except ValueError:
        raise CLIError(f"--{key} must be a real number") from None


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = resolve(args)
    cmd = args.command
    if cmd == "verify":
        from .verify import run_checks
        only = {int(x) for x in opts["only"].split(",")} if opts.get("only") else None
        results = run_checks(only)
        print(f"{sum(c.ok for c in results)}/{len(results)} criteria passed")
        return 0 if all(c.ok for c in results) else 2

    fmt, out = opts["format"], opts["out"]
    N = int(opts["N"])
    if cmd == "galdi":
        vals = {k: _float(opts, k) for k in ("R_s", "Q_sigma", "P_m", "P_theta")}
        rhs = galdi_resistive_threshold(**vals)
        emit({"threshold": rhs, "branch": "P_m<=P_theta" if vals["P_m"] <= vals["P_theta"] else "P_m>P_theta"},
             fmt, out, params=vals)
        return 0

    if cmd == "critical":
        p = _params(opts, need_R=False)
        res = critical_R0(p, _search(opts, p), N)
        d = {"R0": res.value, "R0_squared": res.value ** 2, "a_c": res.a_star}
        emit(d, fmt, out, params=_header(p, opts, search=True, R=False))
        return 0
    if cmd == "lambda0":
        p = _params(opts)
        res = lambda0(p.replace(tau=1.0), _search(opts, p), N)
        emit({"lambda0": res.value, "a_star": res.a_star}, fmt, out, params=_header(p, opts, search=True))
        return 0
    if cmd == "growth":
        p = _params(opts)
        g = fixed_point_lambda(p, _search(opts, p), N)
        g.params = _header(p, opts, search=True)
        emit(g, fmt, out)
        return 0
    if cmd == "classify":
        p = _params(opts)
        c = classify(p, N, float(opts["a_max"]))
        c.params = _header(p, opts)
        emit(c, fmt, out)
        return 0
    if cmd == "sweep":
        if "Ra_values" in opts:
            R_values = [math.sqrt(v) for v in parse_values(opts["Ra_values"])]
        elif "R_values" in opts:
            R_values = opts["R_values"]
        else:
            raise CLIError("--R_values or --Ra_values is required")
        if "Q_values" not in opts:
            raise CLIError("--Q_values is required")
        spec = SweepSpec(R_values=R_values, Q_values=opts["Q_values"], P_theta=float(opts["P_theta"]),
                         tau=float(opts["tau"]), L1=float(opts["L1"]), L2=float(opts["L2"]),
                         bc=opts["bc"], N=N,
                         a_max=float(opts["a_max"]), workers=int(opts.get("workers") or default_workers()))
        emit(run_sweep(spec), fmt, out)
        return 0
    if cmd == "simulate":
        p = _params(opts)
        a, dt, t_end = _float(opts, "a"), _float(opts, "dt"), _float(opts, "t_end")
        fit, trace = simulate_and_fit(p, a, N, dt, t_end, init=opts["init"])
        hdr = _header(p, opts)
        hdr.update({"a": a, "dt": dt, "t_end": t_end, "init": opts["init"], "fitted_lambda": fit})
        emit(trace, fmt, out, params=hdr)
        return 0
    raise CLIError(f"unknown command {cmd}")


def _header(p, opts, search=False, R=True) -> dict:
    d = p.as_dict()
    if not R:
        d.pop("R")
    d["N"] = int(opts["N"])
    d["a_max"] = float(opts["a_max"])
    if search:
        d["search"] = opts["search"]
    return d


def main(argv=None) -> int:
    try:
        code = run(argv)
    except SystemExit as exc:  # argparse usage errors
        code = 1 if exc.code not in (0, None) else 0
    except Exception as exc:
        print(f"zeromb: error: {exc}", file=sys.stderr)
        code = 1
    return code


if __name__ == "__main__":
    sys.exit(main())

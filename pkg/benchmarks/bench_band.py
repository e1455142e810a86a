"""Compiled vs pure-Python banded kernels: top eigenpair of the critical pencil and a critical search.

Run: python benchmarks/bench_band.py [--N 128] [--repeat 5]
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_backend(N: int, repeat: int) -> dict:
    """Time the kernels of the backend selected at import (see ZEROMB_BACKEND)."""
    from zeromb import band
    from zeromb.eigen import max_banded_eigenpair
    from zeromb.params import Params
    from zeromb.pencils import convection_pencils
    from zeromb.variational import Search, critical_R0

    impl = band.get_backend()
    p = Params(R=1.0)
    pen = convection_pencils(N, p.bc).critical(3.117)
    A, B = pen.A, pen.B
    x = band.start_vector(A.shape[1]).copy()
    shifted = np.ascontiguousarray(10.0 * B - A)
    t_chol, _ = _time(lambda: impl.cholesky(shifted), repeat)
    t_eig, res = _time(lambda: max_banded_eigenpair(A, B), repeat)
    t_rq, _ = _time(lambda: impl.rayleigh_quotient(A, B, x), repeat)
    t_crit, crit = _time(lambda: critical_R0(p, Search.continuous(), N), 1)
    return {"backend": band.BACKEND, "cholesky": t_chol, "max_eig": t_eig, "rayleigh": t_rq,
            "critical": t_crit, "value": res.value, "R0sq": crit.value ** 2}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=128)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        r = bench_backend(args.N, args.repeat)
        print(" ".join(f"{k}={v!r}" for k, v in r.items()))
        return
    rows = {}
    for name in ("cython", "python"):
        env = dict(os.environ, ZEROMB_BACKEND=name)
        out = subprocess.run([sys.executable, __file__, "--child", "--N", str(args.N),
                              "--repeat", str(args.repeat)], env=env, capture_output=True, text=True)
        if out.returncode != 0:
            print(f"{name}: unavailable ({out.stderr.strip().splitlines()[-1] if out.stderr else 'error'})")
            continue
        row = dict(kv.split("=", 1) for kv in out.stdout.split())
        if row["backend"].strip("'") != name:
            print(f"{name}: unavailable (extension not built)")
            continue
        rows[name] = row
    keys = ("cholesky", "max_eig", "rayleigh", "critical")
    print(f"N={args.N}, best of {args.repeat}")
    print(f"{'kernel':<10}" + "".join(f"{k:>14}" for k in rows) + f"{'speedup':>10}")
    for k in keys:
        vals = [rows[n][k] for n in rows]
        line = f"{k:<10}" + "".join(f"{float(v) * 1e3:>12.3f}ms" for v in vals)
        if len(vals) == 2:
            line += f"{float(vals[1]) / float(vals[0]):>9.1f}x"
        print(line)
    if len(rows) == 2:
        c, p = rows["cython"], rows["python"]
        print(f"top eigenvalue difference {abs(float(c['value']) - float(p['value'])):.2e}, "
              f"R0^2 difference {abs(float(c['R0sq']) - float(p['R0sq'])):.2e}")


if __name__ == "__main__":
    main()

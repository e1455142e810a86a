"""Self-verification suite: one check per acceptance criterion, shared by the CLI and the tests."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .criteria import (INDETERMINATE, STABLE, UNSTABLE, classify, galdi_resistive_threshold,
                       instability_criterion, shared_quantities, stability_threshold_Q,
                       upsilon1_bound, upsilon1_limit, upsilon1_scan, upsilon2_scan)
from .eigen import rightmost_eigen_companion
from .fem import assemble_mode_forms
from .growth import fixed_point_lambda, lambda_star_bounds
from .params import BC, Params, build_lattice
from .report import SweepSpec, render, run_sweep
from .timedomain import linear_system, simulate_and_fit
from .variational import Search, alpha, critical_R0, lambda0, xi

RIGID_RC = 1707.76
STRESS_FREE_RC = 27.0 * math.pi ** 4 / 4.0

# (R^2, Q, P_theta): rigid walls, R > R0, alpha(Lambda0/2) > Lambda0/2
FIXED_POINT_SETS = [(2000, 0.0, 1.0), (3000, 0.0, 0.7), (2500, 0.01, 1.0), (3000, 0.05, 1.0),
                    (4000, 0.1, 2.0), (5000, 0.2, 1.0), (6000, 0.3, 7.0), (8000, 0.5, 1.0),
                    (3500, 0.02, 0.5), (10000, 0.8, 1.0)]


@dataclass
class Check:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0


def _fp_params():
    return [Params(R=math.sqrt(r2), Q=q, P_theta=p) for r2, q, p in FIXED_POINT_SETS]


def check_stress_free(N: int = 128) -> tuple[bool, str]:
    t0 = time.perf_counter()
    res = critical_R0(Params(R=1.0, bc=BC.STRESS_FREE), Search.continuous(), N)
    dt = time.perf_counter() - t0
    rc, ac = res.value ** 2, res.a_star
    err_r = abs(rc - STRESS_FREE_RC) / STRESS_FREE_RC
    err_a = abs(ac - math.pi / math.sqrt(2)) / (math.pi / math.sqrt(2))
    ok = err_r <= 1.5e-3 and err_a <= 1e-2 and dt < 10
    return ok, f"R0^2={rc:.6f} (rel err {err_r:.1e}), a_c={ac:.6f} (rel err {err_a:.1e}), {dt:.2f}s"


def richardson(values: list[float]) -> tuple[float, float]:
    """Extrapolated limit and observed order from values at N, 2N, 4N."""
    f1, f2, f3 = values
    d1, d2 = f1 - f2, f2 - f3
    if d2 == 0.0 or d1 / d2 <= 1.0:
        return f3, math.inf
    p = math.log2(d1 / d2)
    return f3 - d2 / (2.0 ** p - 1.0), p


def check_rigid() -> tuple[bool, str]:
    t0 = time.perf_counter()
    p = Params(R=1.0)
    res = {N: critical_R0(p, Search.continuous(), N) for N in (64, 128, 256)}
    dt = time.perf_counter() - t0
    rc = {N: r.value ** 2 for N, r in res.items()}
    lim, order = richardson([rc[64], rc[128], rc[256]])
    alim, _ = richardson([res[N].a_star for N in (64, 128, 256)])
    ac = res[128].a_star
    ok = (abs(rc[128] - RIGID_RC) <= 2.0 and abs(ac - 3.117) <= 0.01 * 3.117
          and abs(rc[128] - lim) <= 2.0 and abs(lim - RIGID_RC) <= 2.0
          and abs(ac - alim) <= 0.01 * alim and dt < 30)
    return ok, (f"R0^2(128)={rc[128]:.5f}, Richardson {lim:.5f} (order {order:.2f}), "
                f"a_c={ac:.5f} (extrap {alim:.5f}), {dt:.2f}s")


def _growth_all():
    return [(p, fixed_point_lambda(p)) for p in _fp_params()]


def check_fixed_point(results=None) -> tuple[bool, str]:
    results = results or _growth_all()
    worst, worst_q0 = 0.0, 0.0
    for p, g in results:
        worst = max(worst, g.fixed_point_residual / g.lam)
        if p.Q == 0:
            worst_q0 = max(worst_q0, abs(g.lam - g.lambda0) / g.lambda0)
    ok = worst <= 1e-9 and worst_q0 <= 1e-10
    return ok, f"{len(results)} sets: max |alpha-L|/L={worst:.1e}, Q=0 max |L-L0|/L0={worst_q0:.1e}"


def check_bounds(results=None) -> tuple[bool, str]:
    results = results or _growth_all()
    worst = math.inf
    for p, g in results:
        lo, hi = lambda_star_bounds(p, g.lambda0, math.nan)
        eps = 1e-6 * g.lambda0
        worst = min(worst, (g.lam - lo + eps) / g.lambda0, (hi + eps - g.lam) / g.lambda0)
    return worst >= 0, f"{len(results)} sets: min relative slack to the bounds {worst:.3e}"


def _nondecreasing(v, strict=False, rtol=1e-10):
    d = np.diff(v)
    if strict:
        return bool(np.all(d > 0))
    return bool(np.all(d >= -rtol * np.maximum(1.0, np.abs(v[1:]))))


def check_monotone(n: int = 20, n_frontier: int = 50, N: int = 64) -> tuple[bool, str]:
    base = Params(R=math.sqrt(3000.0), Q=0.3)
    search = Search.continuous()
    parts, ok = [], True

    s_grid = np.linspace(0.5, 20.0, n)
    a_s = np.array([alpha(base, s, search, N).value for s in s_grid])
    r = _nondecreasing(a_s, strict=True)
    ok &= r
    parts.append(f"alpha(s) strict-up {r}")

    q_grid = np.linspace(0.0, 2.0, n)
    a_q = np.array([alpha(base.replace(Q=q), 5.0, search, N).value for q in q_grid])
    r = _nondecreasing(-a_q)
    ok &= r
    parts.append(f"alpha(Q) down {r}")

    t_grid = np.linspace(0.05, 1.0, n)
    a_t = np.array([alpha(base.replace(tau=t), 5.0, search, N).value for t in t_grid])
    r = _nondecreasing(-a_t)
    ok &= r
    parts.append(f"alpha(tau) down {r}")

    r_grid = np.sqrt(np.linspace(1000.0, 6000.0, n))
    l0 = np.array([lambda0(base.replace(R=R, Q=0.0), search, N).value for R in r_grid])
    r = _nondecreasing(l0, strict=True)
    ok &= r
    parts.append(f"Lambda0(R) strict-up {r}")

    qs = np.linspace(0.0, 0.5, n)
    ls = np.array([fixed_point_lambda(base.replace(R=math.sqrt(5000.0), Q=q), search, N).lam for q in qs])
    r = _nondecreasing(-ls)
    ok &= r
    parts.append(f"Lambda*(Q) down {r}")

    R = math.sqrt(2500.0)
    p0 = Params(R=R)
    shared = shared_quantities(p0, N)
    thr = stability_threshold_Q(p0)
    q_front = np.concatenate([[0.0], np.geomspace(1e-3, 4.0 * thr, n_frontier - 1)])
    rank = {UNSTABLE: 0, INDETERMINATE: 1, STABLE: 2}
    verdicts = [classify(p0.replace(Q=float(q)), N, shared=shared, alt=False).verdict for q in q_front]
    ranks = [rank[v] for v in verdicts]
    r = all(b >= a for a, b in zip(ranks, ranks[1:])) and ranks[0] == 0 and ranks[-1] == 2
    ok &= r
    counts = {v: verdicts.count(v) for v in rank}
    parts.append(f"frontier {r} {counts}")
    return ok, "; ".join(parts)


TD_CASES = [(2500.0, 0.0, 1.0, 3.117), (2500.0, 0.3, 1.0, 3.117), (4000.0, 0.1, 2.0, 3.0)]


def check_timedomain(N: int = 64) -> tuple[bool, str]:
    worst_fit, worst_res, worst_comp, ratios = 0.0, 0.0, 0.0, []
    for r2, Q, P, a in TD_CASES:
        p = Params(R=math.sqrt(r2), Q=Q, P_theta=P)
        L = fixed_point_lambda(p, Search.single(a), N).lam
        dt = 1e-3 / L
        fit, tr = simulate_and_fit(p, a, N, dt, 3.0 / L)
        _, tr2 = simulate_and_fit(p, a, N, dt / 2, 3.0 / L)
        forms = assemble_mode_forms(a, N, p.bc)
        comp = rightmost_eigen_companion(*linear_system(forms, p, include_eta=Q != 0)).real
        worst_fit = max(worst_fit, abs(fit - L) / L)
        worst_comp = max(worst_comp, abs(fit - comp) / abs(comp))
        worst_res = max(worst_res, tr.identity_residual)
        ratios.append(tr.identity_residual / tr2.identity_residual)
    ok = worst_fit <= 1e-2 and worst_res <= 1e-4 and all(3 <= q <= 5 for q in ratios) and worst_comp <= 1e-4
    return ok, (f"fit vs Lambda {worst_fit:.1e}, vs companion {worst_comp:.1e}, "
                f"residual {worst_res:.1e}, halving ratios {', '.join(f'{q:.3f}' for q in ratios)}")


def check_criteria(N: int = 128, a_max: float = 8.0, draws: int = 50, seed: int = 7) -> tuple[bool, str]:
    parts, ok = [], True
    # Q just above the closed-form threshold: both functionals below one
    worst = 0.0
    for r2, P in [(2500.0, 1.0), (5000.0, 2.0), (1000.0, 0.5)]:
        p = Params(R=math.sqrt(r2), P_theta=P)
        p = p.replace(Q=1.01 * stability_threshold_Q(p))
        lat = build_lattice(p, a_max)
        u1 = max(upsilon1_scan(p, lat, N).value, upsilon1_limit(p, N))
        u2 = upsilon2_scan(p, lat, N).value
        worst = max(worst, u1, u2)
    r = worst < 1.0
    ok &= r
    parts.append(f"threshold => max(U1,U2)={worst:.4f}")

    slack = math.inf
    for r2, Q, P in [(2500, 0.0, 1.0), (2500, 10.0, 1.0), (5000, 100.0, 2.0), (1000, 1e4, 0.5), (3000, 1.0, 7.0)]:
        p = Params(R=math.sqrt(r2), Q=Q, P_theta=P)
        u1 = max(upsilon1_scan(p, build_lattice(p, a_max), N).value, upsilon1_limit(p, N))
        slack = min(slack, upsilon1_bound(p) + 1e-8 - u1)
    r = slack >= 0
    ok &= r
    parts.append(f"U1<=bound slack {slack:.2e}")

    p = Params(R=math.sqrt(2500.0), Q=0.0)
    u1_0 = upsilon1_scan(p, build_lattice(p, a_max), N).value
    r = abs(u1_0 - math.sqrt(2)) <= 0.01 * math.sqrt(2)
    ok &= r
    parts.append(f"U1(Q=0)={u1_0:.8f}")

    rng = np.random.default_rng(seed)
    n_impl, n_suff, xi_ok = 0, 0, True
    shared = {}
    for _ in range(draws):
        bc = BC.RIGID if rng.random() < 0.7 else BC.STRESS_FREE
        if bc not in shared:
            shared[bc] = critical_R0(Params(R=1.0, bc=bc), Search.continuous(), N)
        crit = shared[bc]
        R0 = crit.value
        R = R0 * (1.0 + 2.0 * rng.random())
        P = float(10 ** rng.uniform(-1, 1))
        Q = float(10 ** rng.uniform(-6, 0))
        pr = Params(R=R, Q=Q, P_theta=P, bc=bc)
        x = xi(pr, Search.continuous(), N, critical=crit)
        L0 = lambda0(pr, Search.continuous(), N).value
        v = instability_criterion(pr, L0, R0, x)
        n_suff += v.sufficient
        n_impl += (not v.sufficient) or v.exact
        xi_ok &= 2 * (R - R0) * x <= L0 + 1e-6 and x <= 1 / (2 * math.sqrt(P))
    r = n_impl == draws and xi_ok
    ok &= r
    parts.append(f"sufficient=>exact {n_impl}/{draws} ({n_suff} sufficient), xi bounds {xi_ok}")
    return ok, "; ".join(parts)


def check_galdi() -> tuple[bool, str]:
    Rs, Pt = 1708.0, 1.0
    c0 = [galdi_resistive_threshold(Rs, 0.0, Pm, Pt) for Pm in (0.5, 2.0)]
    b1 = galdi_resistive_threshold(Rs, 2 * Rs / math.pi ** 2, 0.5, Pt)
    b2 = galdi_resistive_threshold(Rs, 8 * Rs / math.pi ** 2, 2.0, Pt)
    ok = all(abs(c - Rs) <= 1e-12 * Rs for c in c0) and abs(b1 - 2 * Rs) <= 1e-12 * Rs \
        and abs(b2 - 2 * Rs) <= 1e-12 * Rs
    return ok, f"Q=0: {c0[0]!r}, {c0[1]!r}; branches: {b1!r}, {b2!r} (R_s={Rs})"


def sweep_spec(workers: int, N: int = 96) -> SweepSpec:
    R_values = [math.sqrt(v) for v in np.linspace(1000.0, 4000.0, 10)]
    Q_values = [0.0] + [float(q) for q in np.geomspace(1e-2, 1e6, 9)]
    return SweepSpec(R_values=R_values, Q_values=Q_values, N=N, workers=workers)


def stable_region_consistent(report) -> bool:
    """Cells with Q above the closed-form threshold or R below R0 must be classified stable."""
    P = report.metadata["params"]["P_theta"]
    R0 = report.metadata["R0"]
    for r in report.rows:
        thr = r["R"] ** 2 * (1.0 + 4.0 / P) ** 2 / 8.0
        if (r["Q"] > thr or r["R"] < R0) and r["classification"] != STABLE:
            return False
    return True


def check_determinism(N: int = 96) -> tuple[bool, str]:
    t0 = time.perf_counter()
    rep = run_sweep(sweep_spec(1, N))
    one = render(rep, "csv")
    t1 = time.perf_counter()
    eight = render(run_sweep(sweep_spec(8, N)), "csv")
    t2 = time.perf_counter()
    region = stable_region_consistent(rep)
    errors = sum(1 for r in rep.rows if r["error"])
    ok = one == eight and t1 - t0 < 300 and t2 - t1 < 300 and region and errors == 0
    return ok, (f"identical={one == eight}, 1 worker {t1 - t0:.1f}s, 8 workers {t2 - t1:.1f}s, "
                f"{len(rep.rows)} rows, stable region consistent={region}, cell errors={errors}")


CHECKS: list[tuple[int, str, Callable[[], tuple[bool, str]]]] = [
    (1, "stress-free critical Rayleigh number", check_stress_free),
    (2, "rigid critical Rayleigh number", check_rigid),
    (3, "fixed-point consistency", check_fixed_point),
    (4, "Lambda* bounds", check_bounds),
    (5, "monotonicity suites", check_monotone),
    (6, "time-domain oracle", check_timedomain),
    (7, "criterion consistency", check_criteria),
    (8, "resistive threshold formula", check_galdi),
    (9, "sweep determinism", check_determinism),
]


def run_checks(only=None, out=print) -> list[Check]:
    """Run the selected checks (all by default) and print one pass/fail line each."""
    results = []
    growth = None
    for number, name, fn in CHECKS:
        if only and number not in only:
            continue
        t0 = time.perf_counter()
        try:
            if number in (3, 4):
                growth = growth or _growth_all()
                ok, detail = fn(growth)
            else:
                ok, detail = fn()
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        c = Check(number, name, ok, detail, time.perf_counter() - t0)
        results.append(c)
        if out is not None:
            out(format_check(c))
    return results


def format_check(c: Check) -> str:
    return f"[{'PASS' if c.ok else 'FAIL'}] {c.number}. {c.name}: {c.detail} ({c.seconds:.1f}s)"

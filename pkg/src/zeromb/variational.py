"""Variational scalars: critical R0, largest thermal growth Lambda0, xi and alpha(s, tau).

Every quantity is a supremum of a ratio of quadratic forms.  Per horizontal
mode it is the top eigenvalue of a banded pencil; the supremum over modes is
taken over a lattice, or over a continuous bracket of wavenumber magnitudes
(log-spaced scan, then golden-section refinement around the best point).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize_scalar

from .band import sbmv
from .eigen import EigenResult, solve_pencil, top_eigenspace
from .fem import assemble_mode_forms
from .params import Params, Wavenumber
from .pencils import convection_pencils

DEFAULT_N = 128
DEFAULT_BRACKET = (0.3, 12.0)
N_SCAN = 64
A_RTOL = 1e-9
TIE_RTOL = 1e-8


@dataclass(frozen=True)
class Search:
    """Where to look for the extremizing wavenumber.

    kind='continuous' searches a in [a_lo, a_hi]; kind='lattice' enumerates the
    given wavenumbers (see ``params.build_lattice``).
    """

    kind: str = "continuous"
    a_lo: float = DEFAULT_BRACKET[0]
    a_hi: float = DEFAULT_BRACKET[1]
    n_scan: int = N_SCAN
    rtol: float = A_RTOL
    wavenumbers: tuple[Wavenumber, ...] = ()

    def __post_init__(self):
        if self.kind not in ("continuous", "lattice"):
            raise ValueError(f"unknown search kind {self.kind!r}")
        if self.kind == "continuous":
            if not 0 < self.a_lo <= self.a_hi:
                raise ValueError("continuous search needs 0 < a_lo <= a_hi")
            if self.n_scan < 3 and self.a_lo < self.a_hi:
                raise ValueError("continuous search needs at least 3 scan points")
        elif not self.wavenumbers:
            raise ValueError("empty search set")

    @classmethod
    def continuous(cls, a_lo=DEFAULT_BRACKET[0], a_hi=DEFAULT_BRACKET[1], n_scan=N_SCAN, rtol=A_RTOL):
        return cls("continuous", float(a_lo), float(a_hi), int(n_scan), float(rtol))

    @classmethod
    def lattice(cls, wavenumbers: Sequence[Wavenumber]):
        return cls("lattice", wavenumbers=tuple(wavenumbers))

    @classmethod
    def single(cls, a: float):
        return cls("lattice", wavenumbers=(Wavenumber.continuous(a),))

    def describe(self) -> dict:
        if self.kind == "continuous":
            return {"kind": "continuous", "a_lo": self.a_lo, "a_hi": self.a_hi,
                    "n_scan": self.n_scan, "rtol": self.rtol}
        return {"kind": "lattice", "count": len(self.wavenumbers),
                "a_max": max(w.a for w in self.wavenumbers)}


@dataclass
class VariationalResult:
    value: float
    a_star: float
    k_star: Wavenumber | None
    profile: tuple[np.ndarray, np.ndarray]
    per_mode_curve: list[tuple[float, float]]
    eig: EigenResult | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class _Best:
    a: float
    value: float
    eig: EigenResult
    curve: list
    ties: list = field(default_factory=list)  # other a achieving the max within TIE_RTOL


def maximize_over_modes(mode_value: Callable[[float, EigenResult | None], EigenResult], search: Search) -> _Best:
    """Maximize a per-mode top eigenvalue over the search set.

    ``mode_value(a, prev)`` returns the EigenResult at wavenumber magnitude a;
    ``prev`` is the previously computed result (a warm start), or None.
    Ties are broken toward smaller a.
    """
    cache: dict[float, EigenResult] = {}
    prev = None

    def evaluate(a):
        nonlocal prev
        a = float(a)
        r = cache.get(a)
        if r is None:
            r = mode_value(a, prev)
            cache[a] = r
            prev = r
        return r

    if search.kind == "lattice":
        mags = sorted({w.a for w in search.wavenumbers})
        for a in mags:
            evaluate(a)
    else:
        if search.a_lo == search.a_hi:
            mags = [search.a_lo]
        else:
            mags = list(np.geomspace(search.a_lo, search.a_hi, search.n_scan))
        vals = [evaluate(a).value for a in mags]
        i = int(np.argmax(vals))
        if len(mags) > 1:
            _refine(evaluate, mags, i, search.rtol)

    pts = sorted(cache.items())
    best_a, best = pts[0]
    for a, r in pts[1:]:
        if r.value > best.value:
            best_a, best = a, r
    band_ = TIE_RTOL * max(1.0, abs(best.value))
    ties = [a for a, r in pts if a != best_a and abs(r.value - best.value) <= band_]
    return _Best(best_a, best.value, best, [(a, r.value) for a, r in pts], ties)


def _refine(evaluate, mags, i, rtol):
    f = lambda a: -evaluate(a).value
    n = len(mags)
    if 0 < i < n - 1:
        try:
            minimize_scalar(f, bracket=(mags[i - 1], mags[i], mags[i + 1]), method="golden", tol=rtol)
            return
        except ValueError:  # flat bracket; fall through to a bounded search
            pass
    lo, hi = (mags[max(i - 1, 0)], mags[min(i + 1, n - 1)])
    minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": rtol * hi})


def _lattice_match(search: Search, a: float) -> Wavenumber | None:
    if search.kind != "lattice":
        return None
    for w in search.wavenumbers:
        if w.a == a:
            return w
    return None


def _result(search, best: _Best, layout, extra=None) -> VariationalResult:
    W, Th = layout.split(best.eig.vector)
    return VariationalResult(value=best.value, a_star=best.a, k_star=_lattice_match(search, best.a),
                             profile=(W, Th), per_mode_curve=best.curve, eig=best.eig,
                             extra=dict(extra or {}, ties=best.ties))


def default_search(search: Search | None) -> Search:
    return Search.continuous() if search is None else search


def _solve(pencil, prev: EigenResult | None) -> EigenResult:
    if prev is None:
        return solve_pencil(pencil)
    return solve_pencil(pencil, prev.value, x0=prev.vector)


def critical_R0(params: Params, search: Search | None = None, N: int = DEFAULT_N) -> VariationalResult:
    """R0 from 1/R0 = sup 2 int w3 th / ||grad (w, th)||^2.

    ``value`` is R0 (so R0**2 is the classical critical Rayleigh number);
    ``extra['mu']`` is the maximal per-mode ratio 1/R0.
    """
    search = default_search(search)
    pen = convection_pencils(N, params.bc)

    def mode(a, prev):
        return _solve(pen.critical(a), prev)

    best = maximize_over_modes(mode, search)
    if not best.value > 0:
        raise ArithmeticError("internal error: no mode with positive coupling ratio")
    res = _result(search, best, pen.layout, {"mu": best.value})
    W, Th = res.profile
    J = _J(pen, best.a, params.P_theta, best.eig.vector)
    res.profile = (W / math.sqrt(J), Th / math.sqrt(J))
    res.value = 1.0 / best.value
    return res


def _J(pen, a, P_theta, x):
    return float(x @ sbmv(pen.mass(a, P_theta), x))


def _growth_search(params: Params, search: Search, N: int, tau: float, Q_over_s: float):
    pen = convection_pencils(N, params.bc)

    def mode(a, prev):
        return _solve(pen.growth(a, params.R, params.P_theta, tau, Q_over_s), prev)

    return pen, maximize_over_modes(mode, search)


def lambda0(params: Params, search: Search | None = None, N: int = DEFAULT_N) -> VariationalResult:
    """Lambda0 = sup over J = 1 of 2R int w3 th - ||grad w||^2 - ||grad th||^2."""
    search = default_search(search)
    pen, best = _growth_search(params, search, N, 1.0, 0.0)
    return _result(search, best, pen.layout)


def alpha(params: Params, s: float, search: Search | None = None, N: int = DEFAULT_N) -> VariationalResult:
    """alpha(s, tau) = sup over J = 1 of D_R(., tau) - Q ||d3 w||^2 / s, with tau = params.tau."""
    if not s > 0:
        raise ValueError("s must be positive")
    search = default_search(search)
    pen, best = _growth_search(params, search, N, params.tau, params.Q / s)
    return _result(search, best, pen.layout, {"s": s})


def mode_alpha(params: Params, a: float, s: float, N: int = DEFAULT_N) -> EigenResult:
    """alpha restricted to a single wavenumber magnitude."""
    pen = convection_pencils(N, params.bc)
    return solve_pencil(pen.growth(a, params.R, params.P_theta, params.tau, params.Q / s))


def xi(params: Params, search: Search | None = None, N: int = DEFAULT_N,
       critical: VariationalResult | None = None) -> float:
    """sup of int w3 th over J-normalized maximizers of the R0 problem.

    All eigenvectors at the maximizing wavenumber(s) whose ratio lies within
    1e-8 (relative) of 1/R0 form the maximizer set; the supremum of the coupling
    over that span, under J = 1, is itself a small eigenproblem.
    """
    search = default_search(search)
    crit = critical if critical is not None else critical_R0(params, search, N)
    best = 0.0
    for a in [crit.a_star] + list(crit.extra.get("ties", [])):
        f = assemble_mode_forms(a, N, params.bc)
        nw = f.dof_W
        n = nw + f.dof_Theta
        C = np.zeros((n, n))
        C[:nw, nw:] = 0.5 * f.C
        C[nw:, :nw] = 0.5 * f.C.T
        G = np.zeros((n, n))
        G[:nw, :nw] = f.G_W
        G[nw:, nw:] = f.G_Theta
        J = np.zeros((n, n))
        J[:nw, :nw] = f.M_W
        J[nw:, nw:] = params.P_theta * f.M_Theta
        _, V = top_eigenspace(2.0 * C, G, rtol=TIE_RTOL)
        # maximize the coupling over the maximizer span subject to J = 1
        small_A = V.T @ C @ V
        small_B = V.T @ J @ V
        best = max(best, float(sla.eigh(small_A, small_B, eigvals_only=True)[-1]))
    return best

"""Stability functionals Upsilon_1, Upsilon_2, the closed-form thresholds, instability tests and classify."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .eigen import solve_pencil
from .growth import GrowthResult, fixed_point_lambda, script_R
from .params import Params, Wavenumber, build_lattice
from .pencils import Pencil, upsilon1_pencils, upsilon2_pencils
from .variational import DEFAULT_N, Search, VariationalResult, critical_R0, lambda0, xi

DEFAULT_A_MAX = 16.0

STABLE = "ProvablyStable"
UNSTABLE = "ProvablyUnstable"
INDETERMINATE = "Indeterminate"


@dataclass
class ModeScan:
    """Supremum of a per-mode functional over a lattice, with the per-mode samples."""

    value: float
    k_star: Wavenumber | None
    per_mode: list[tuple[float, float, float, float]]  # (k1, k2, a, value)
    a_max: float
    tail_decreasing: bool
    retried: bool = False
    cache: dict = field(default_factory=dict, repr=False)  # per-mode values, reused on retry

    def tail(self) -> list[float]:
        """Largest per-mode value at each of the three largest magnitudes."""
        best: dict[float, float] = {}
        for _, _, a, v in self.per_mode:
            best[a] = max(best.get(a, -math.inf), v)
        return [best[a] for a in sorted(best)[-3:]]


def _scan(lattice: Sequence[Wavenumber], pencil_at: Callable[[Wavenumber], Pencil],
          key: Callable[[Wavenumber], tuple], cache: dict) -> tuple[float, Wavenumber | None, list]:
    if not lattice:
        raise ValueError("empty lattice")
    prev = None
    per_mode = []
    best, k_best = -math.inf, None
    for w in lattice:
        kk = key(w)
        v = cache.get(kk)
        if v is None:
            if prev is None:
                prev = solve_pencil(pencil_at(w))
            else:
                prev = solve_pencil(pencil_at(w), prev.value, x0=prev.vector)
            v = prev.value
            cache[kk] = v
        per_mode.append((w.k1, w.k2, w.a, v))
        if v > best:  # lattice is sorted by a, so ties keep the smaller a
            best, k_best = v, w
    return best, k_best, per_mode


def _tail_ok(scan: ModeScan) -> bool:
    t = scan.tail()
    return len(t) < 3 or (t[0] > t[1] > t[2])


def _with_tail_retry(params: Params, a_max: float, run: Callable[..., ModeScan]) -> ModeScan:
    """Evaluate on build_lattice(a_max); if the tail is not decreasing, double a_max once."""
    scan = run(build_lattice(params, a_max))
    if scan.tail_decreasing:
        return scan
    again = run(build_lattice(params, 2.0 * a_max), cache=scan.cache)
    again.retried = True
    return again


def upsilon1_bound(params: Params) -> float:
    """2R / sqrt(2R^2 + Q pi^2 P), from Wirtinger's inequality."""
    R, Q, P = params.R, params.Q, params.P_theta
    return 2.0 * R / math.sqrt(2.0 * R * R + Q * math.pi ** 2 * P)


def upsilon1_scan(params: Params, lattice: Sequence[Wavenumber], N: int = DEFAULT_N,
                  cache: dict | None = None) -> ModeScan:
    pen = upsilon1_pencils(N, params.bc)
    R, Q, P = params.R, params.Q, params.P_theta
    cache = {} if cache is None else cache
    value, k, per_mode = _scan(lattice, lambda w: pen.upsilon1(w.a, R, Q, P), lambda w: (w.a,), cache)
    scan = ModeScan(value, k, per_mode, max(w.a for w in lattice), True, cache=cache)
    scan.tail_decreasing = _tail_ok(scan)
    return scan


def upsilon1(params: Params, lattice: Sequence[Wavenumber], N: int = DEFAULT_N) -> tuple[float, float]:
    """(sup over the lattice of the per-mode Upsilon_1, analytic bound)."""
    return upsilon1_scan(params, lattice, N).value, upsilon1_bound(params)


def upsilon1_limit(params: Params, N: int = DEFAULT_N) -> float:
    """Per-mode Upsilon_1 as a -> infinity.

    The denominator term ||d3 phi||^2 = int W'^2 + W''^2/a^2 decreases in a while
    nothing else depends on a, so the per-mode value increases to this limit,
    which is therefore the supremum over all horizontal modes.
    """
    pen = upsilon1_pencils(N, params.bc)
    R, Q, P = params.R, params.Q, params.P_theta
    den = ((2.0 * R * R / P, pen.K00), (P, pen.P00))
    if Q != 0.0:
        den = ((Q, pen.K11),) + den
    return solve_pencil(Pencil(((2.0 * R, pen.Esym),), den)).value


def e1_positive_definite(params: Params, a: float, N: int = DEFAULT_N) -> bool:
    """Whether the discrete E1 form is positive definite on the mode-a trial space."""
    from .band import is_positive_definite
    return is_positive_definite(upsilon1_pencils(N, params.bc).e1(a, params.R, params.Q, params.P_theta))


def upsilon2_scan(params: Params, lattice: Sequence[Wavenumber], N: int = DEFAULT_N,
                  underlined: bool = True, cache: dict | None = None) -> ModeScan:
    if not lattice:
        raise ValueError("empty lattice")
    if params.Q == 0:
        return ModeScan(math.inf, None, [], max(w.a for w in lattice), True)
    pen = upsilon2_pencils(N, params.bc)
    R, Q, P = params.R, params.Q, params.P_theta
    # the weights are symmetric in (k1, k2), so swapped pairs share a value
    cache = {} if cache is None else cache
    value, k, per_mode = _scan(lattice, lambda w: pen.upsilon2(w.k1, w.k2, R, Q, P, underlined),
                               lambda w: tuple(sorted((w.k1, w.k2))), cache)
    scan = ModeScan(value, k, per_mode, max(w.a for w in lattice), True, cache=cache)
    scan.tail_decreasing = _tail_ok(scan)
    return scan


def upsilon2(params: Params, lattice: Sequence[Wavenumber], N: int = DEFAULT_N) -> float:
    """sup over the lattice of the per-mode Upsilon_2 (cumulative weights); +inf when Q = 0."""
    return upsilon2_scan(params, lattice, N).value


def stability_threshold_Q(params: Params) -> float:
    """R^2 (1 + 4/P)^2 / 8: above it both stability functionals are below one."""
    return params.R ** 2 * (1.0 + 4.0 / params.P_theta) ** 2 / 8.0


@dataclass
class InstabilityVerdict:
    exact: bool
    sufficient: bool
    exact_margin: float
    sufficient_margin: float
    reason: str = ""


def _ratio(num: float, den: float) -> float:
    return math.inf if den == 0.0 else num / den


def instability_criterion(params: Params, lambda0: float, R0: float, xi: float) -> InstabilityVerdict:
    """Exact test with scriptR and the sufficient test with H = R/sqrt(P) - 2(R - R0) xi.

    Margins are min{...} - sqrt(Q); a zero denominator drops that constraint.
    """
    R, Q, P = params.R, params.Q, params.P_theta
    if not R > R0:
        return InstabilityVerdict(False, False, math.nan, math.nan, "convection condition fails")
    sq = math.sqrt(Q)
    sr = script_R(params, lambda0)
    exact_min = min(1.0, _ratio(lambda0, sr + 2.0 * math.sqrt(sr)), _ratio(lambda0, 1.0 + math.sqrt(sr)))
    low = 2.0 * (R - R0) * xi
    H = max(R / math.sqrt(P) - low, 0.0)
    suff_min = min(1.0, _ratio(low, H + 2.0 * math.sqrt(H)), _ratio(low, 1.0 + math.sqrt(H)))
    exact_margin = exact_min - sq
    suff_margin = suff_min - sq
    reason = "" if lambda0 > 0 else "Lambda0 <= 0"
    return InstabilityVerdict(exact_margin >= 0 and lambda0 > 0, suff_margin >= 0 and low > 0,
                              exact_margin, suff_margin, reason)


def galdi_resistive_threshold(R_s: float, Q_sigma: float, P_m: float, P_theta: float) -> float:
    """Right-hand side of the resistive stability condition on R_sigma.

    R_s/2 + sqrt(R_s^2/4 + pi^2 R_s Q_sigma), with Q_sigma divided by
    (P_m/P_theta)^2 when P_m > P_theta.
    """
    if not (R_s > 0 and P_m > 0 and P_theta > 0):
        raise ValueError("R_s, P_m and P_theta must be positive")
    if Q_sigma < 0:
        raise ValueError("Q_sigma must be nonnegative")
    q = Q_sigma if P_m <= P_theta else Q_sigma / (P_m / P_theta) ** 2
    return R_s / 2.0 + math.sqrt(R_s * R_s / 4.0 + math.pi ** 2 * R_s * q)


@dataclass
class CriterionReport:
    upsilon1: float
    upsilon1_bound: float
    upsilon1_sup: float
    upsilon2: float
    upsilon2_alt: float
    Q_stab_threshold: float
    instab_exact: bool
    instab_exact_margin: float
    instab_sufficient: bool
    instab_sufficient_margin: float
    lattice_cutoff: float
    upsilon1_tail_decreasing: bool = True
    upsilon2_tail_decreasing: bool = True
    upsilon2_flag: str = ""

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Shared:
    """Quantities that depend only on (bc, N, lattice): computed once per sweep."""

    R0: VariationalResult
    xi: float
    lattice: tuple[Wavenumber, ...]


def shared_quantities(params: Params, N: int = DEFAULT_N, a_max: float = DEFAULT_A_MAX) -> Shared:
    lattice = tuple(build_lattice(params, a_max))
    if not lattice:
        raise ValueError(f"no lattice wavenumber with a <= {a_max}")
    search = Search.lattice(lattice)
    crit = critical_R0(params, search, N)
    return Shared(crit, xi(params, search, N, critical=crit), lattice)


@dataclass
class Classification:
    verdict: str
    witnesses: list[str]
    R0: float
    lambda0: float
    xi: float
    report: CriterionReport
    lambda_star: float | None = None
    growth: GrowthResult | None = None
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "witnesses": list(self.witnesses), "R0": self.R0,
                "lambda0": self.lambda0, "xi": self.xi, "lambda_star": self.lambda_star,
                "report": self.report.as_dict(), "params": self.params}


def classify(params: Params, N: int = DEFAULT_N, a_max: float = DEFAULT_A_MAX,
             shared: Shared | None = None, alt: bool = True) -> Classification:
    """ProvablyStable / ProvablyUnstable / Indeterminate with witness values.

    Stable when R < R0, or Upsilon_1 < 1 and Upsilon_2 < 1, or Q exceeds the
    closed-form threshold; unstable when R > R0 and the exact instability test
    holds.  All suprema are over the lattice up to a_max (tail-checked).
    ``alt`` also evaluates Upsilon_2 with single-order weights (sensitivity only).
    """
    if params.tau != 1.0:
        raise ValueError("classify requires tau = 1")
    sh = shared if shared is not None else shared_quantities(params, N, a_max)
    R0 = sh.R0.value
    search = Search.lattice(sh.lattice)
    L0 = lambda0(params, search, N).value

    u1 = _with_tail_retry(params, a_max, lambda lat, cache=None: upsilon1_scan(params, lat, N, cache))
    u1_sup = max(u1.value, upsilon1_limit(params, N))
    u2 = _with_tail_retry(params, a_max, lambda lat, cache=None: upsilon2_scan(params, lat, N, cache=cache))
    flag = "Q=0: phi-block unconstrained" if params.Q == 0 else ""
    u2_alt = math.nan
    if alt:
        u2_alt = math.inf if params.Q == 0 else \
            upsilon2_scan(params, build_lattice(params, u2.a_max), N, underlined=False).value

    thr = stability_threshold_Q(params)
    inst = instability_criterion(params, L0, R0, sh.xi)
    report = CriterionReport(
        upsilon1=u1.value, upsilon1_bound=upsilon1_bound(params), upsilon1_sup=u1_sup,
        upsilon2=u2.value, upsilon2_alt=u2_alt, Q_stab_threshold=thr,
        instab_exact=inst.exact, instab_exact_margin=inst.exact_margin,
        instab_sufficient=inst.sufficient, instab_sufficient_margin=inst.sufficient_margin,
        lattice_cutoff=max(u1.a_max, u2.a_max),
        upsilon1_tail_decreasing=u1.tail_decreasing, upsilon2_tail_decreasing=u2.tail_decreasing,
        upsilon2_flag=flag)

    stable = []
    if params.R < R0:
        stable.append("R<R0")
    if u1_sup < 1.0 and u2.value < 1.0:
        stable.append("upsilon1<1&upsilon2<1")
    if params.Q > thr:
        stable.append("Q>threshold")
    unstable = ["exact instability test"] if (params.R > R0 and inst.exact) else []
    if stable and unstable:
        raise ArithmeticError(f"internal error: both stable {stable} and unstable {unstable} witnesses")

    lam_star, growth = None, None
    if unstable:
        verdict = UNSTABLE
        try:
            growth = fixed_point_lambda(params, search, N)
            lam_star = growth.lam
        except ArithmeticError:
            pass
    elif stable:
        verdict = STABLE
    else:
        verdict = INDETERMINATE
    return Classification(verdict, stable or unstable, R0, L0, sh.xi, report, lam_star, growth,
                          params.as_dict())

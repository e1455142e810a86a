"""Growth rate Lambda(tau) as the least fixed point of s -> alpha(s, tau), and bounds for Lambda(1)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import Params
from .variational import DEFAULT_N, Search, VariationalResult, alpha, lambda0 as compute_lambda0

MAX_ITER = 200
DEFAULT_TOL = 1e-10


class PreconditionFailed(ArithmeticError):
    """alpha(Lambda0/2) <= Lambda0/2, or Lambda0 <= 0: no fixed point is guaranteed."""


class NoConvergence(ArithmeticError):
    def __init__(self, msg, trace):
        super().__init__(msg)
        self.trace = trace


@dataclass
class GrowthResult:
    lam: float
    a_star: float
    profile: tuple[np.ndarray, np.ndarray]
    trace: list[tuple[int, float, float]]
    fixed_point_residual: float
    precondition_ok: bool
    lambda0: float = math.nan
    tau: float = 1.0
    analytic_condition: bool = True
    annotation: str = ""
    bounds: tuple[float, float] | None = None
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam, "a_star": self.a_star, "lambda0": self.lambda0, "tau": self.tau,
            "fixed_point_residual": self.fixed_point_residual,
            "precondition_ok": self.precondition_ok,
            "analytic_condition": self.analytic_condition, "annotation": self.annotation,
            "bounds": list(self.bounds) if self.bounds is not None else None,
            "trace": [[i, s, a] for i, s, a in self.trace],
            "params": self.params,
        }


def script_R(params: Params, lambda0: float) -> float:
    """R/sqrt(P) - Lambda0, clipped at 0 against roundoff."""
    return max(params.R / math.sqrt(params.P_theta) - lambda0, 0.0)


def analytic_precondition(params: Params, lambda0: float) -> bool:
    """sqrt(Q) <= Lambda0 / (2 sqrt(scriptR)); infinite right-hand side when scriptR = 0."""
    sr = script_R(params, lambda0)
    if sr == 0.0:
        return lambda0 > 0
    return math.sqrt(params.Q) <= lambda0 / (2.0 * math.sqrt(sr))


def fixed_point_lambda(params: Params, search: Search | None = None, N: int = DEFAULT_N,
                       tol: float = DEFAULT_TOL, lambda0_result: VariationalResult | None = None) -> GrowthResult:
    """Iterate s0 = Lambda0/2, s_{n+1} = alpha(s_n, tau) up to the least fixed point.

    alpha is nondecreasing in s and bounded by R/sqrt(P), so the iterates rise
    monotonically.  Stops when |s_{n+1} - s_n| <= tol * max(1, s_n).
    """
    base = params.replace(tau=1.0)
    l0 = lambda0_result if lambda0_result is not None else compute_lambda0(base, search, N)
    L0 = l0.value
    if not L0 > 0:
        raise PreconditionFailed(f"Lambda0 = {L0:.6g} <= 0: convection condition R > R0 fails")
    s = 0.5 * L0
    first = alpha(params, s, search, N)
    trace = [(0, s, first.value)]
    if not first.value > s:
        raise PreconditionFailed(f"alpha(Lambda0/2) = {first.value:.12g} <= Lambda0/2 = {s:.12g}")
    analytic = analytic_precondition(params, L0)
    cur = first
    for it in range(1, MAX_ITER + 1):
        s_new = cur.value
        if abs(s_new - s) <= tol * max(1.0, s):
            break
        s = s_new
        cur = alpha(params, s, search, N)
        trace.append((it, s, cur.value))
    else:
        raise NoConvergence(f"fixed-point iteration did not converge in {MAX_ITER} steps", trace)

    lam = s
    check = alpha(params, lam, search, N)
    residual = abs(check.value - lam)
    bounds = None
    if params.tau == 1.0 and params.Q < 1.0:
        bounds = lambda_star_bounds(params, L0, math.nan)
    return GrowthResult(
        lam=lam, a_star=check.a_star, profile=check.profile, trace=trace,
        fixed_point_residual=residual, precondition_ok=True, lambda0=L0, tau=params.tau,
        analytic_condition=analytic, annotation="" if analytic else "beyond-lemma",
        bounds=bounds, params=params.as_dict())


def lambda_star_bounds(params: Params, lambda0: float, R0: float) -> tuple[float, float]:
    """(Lambda0 - sqrt(Q scriptR), (1 - sqrt(Q)) Lambda0 + R sqrt(Q/P)) for Q in [0, 1).

    ``R0`` is only used to check the convection condition when it is finite.
    """
    Q = params.Q
    if not 0.0 <= Q < 1.0:
        raise ValueError("Q must lie in [0,1) for the Lambda* bounds")
    if not lambda0 > 0:
        raise ValueError("Lambda0 must be positive")
    if math.isfinite(R0) and not params.R > R0:
        raise ValueError("R must exceed R0")
    sq = math.sqrt(Q)
    lower = lambda0 - math.sqrt(Q * script_R(params, lambda0))
    upper = (1.0 - sq) * lambda0 + params.R * math.sqrt(Q / params.P_theta)
    return lower, upper

import json
import math

import pytest

from zeromb.growth import (PreconditionFailed, analytic_precondition, fixed_point_lambda,
                           lambda_star_bounds, script_R)
from zeromb.params import Params
from zeromb.variational import lambda0

N = 48


def test_q0_returns_lambda0():
    p = Params(R=50.0)
    g = fixed_point_lambda(p, None, N)
    assert g.lam == pytest.approx(g.lambda0, rel=1e-12)
    assert len(g.trace) == 2
    assert g.bounds == pytest.approx((g.lambda0, g.lambda0))


def test_fixed_point_residual_and_bounds():
    p = Params(R=math.sqrt(4000.0), Q=0.1, P_theta=2.0)
    g = fixed_point_lambda(p, None, N)
    assert g.fixed_point_residual <= 1e-9 * g.lam
    lo, hi = g.bounds
    eps = 1e-6 * g.lambda0
    assert lo - eps <= g.lam <= hi + eps
    assert g.lam < g.lambda0
    s = [t[1] for t in g.trace]
    assert all(b >= a for a, b in zip(s, s[1:]))
    d = json.loads(json.dumps(g.as_dict()))
    assert d["trace"][0] == list(g.trace[0])


def test_tau_below_one_grows_faster():
    p = Params(R=50.0, Q=0.05)
    assert fixed_point_lambda(p.replace(tau=0.5), None, N).lam > fixed_point_lambda(p, None, N).lam


@pytest.mark.parametrize("p", [Params(R=30.0), Params(R=45.0, Q=0.3, P_theta=0.5), Params(R=50.0, Q=2.0)])
def test_precondition_failures(p):
    with pytest.raises(PreconditionFailed):
        fixed_point_lambda(p, None, N)


def test_analytic_condition_and_script_R():
    p = Params(R=50.0, Q=0.0)
    assert script_R(p, 60.0) == 0.0
    assert analytic_precondition(p, 5.0)
    assert not analytic_precondition(p.replace(Q=0.9), 5.0)


def test_bounds_errors():
    with pytest.raises(ValueError):
        lambda_star_bounds(Params(R=50.0, Q=1.0), 5.0, math.nan)
    with pytest.raises(ValueError):
        lambda_star_bounds(Params(R=50.0, Q=0.1), -1.0, math.nan)
    with pytest.raises(ValueError):
        lambda_star_bounds(Params(R=40.0, Q=0.1), 1.0, 41.3)

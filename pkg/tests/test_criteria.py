import math

import pytest
from hypothesis import given, settings, strategies as st

from zeromb.criteria import (INDETERMINATE, STABLE, UNSTABLE, classify, e1_positive_definite,
                             galdi_resistive_threshold, instability_criterion, shared_quantities,
                             stability_threshold_Q, upsilon1, upsilon1_bound, upsilon1_limit,
                             upsilon2, upsilon2_scan)
from zeromb.params import Params, build_lattice

N = 32
A_MAX = 8.0


def test_closed_forms():
    assert upsilon1_bound(Params(R=10.0, Q=200 / math.pi ** 2)) == pytest.approx(1.0)
    assert stability_threshold_Q(Params(R=2.0, P_theta=4.0)) == pytest.approx(2.0)
    assert stability_threshold_Q(Params(R=10.0)) == pytest.approx(312.5)


def test_galdi():
    Rs = 100.0
    assert galdi_resistive_threshold(Rs, 0.0, 0.5, 1.0) == Rs
    assert galdi_resistive_threshold(Rs, 0.0, 3.0, 1.0) == Rs
    assert galdi_resistive_threshold(Rs, 2 * Rs / math.pi ** 2, 1.0, 1.0) == pytest.approx(2 * Rs, rel=1e-15)
    assert galdi_resistive_threshold(Rs, 8 * Rs / math.pi ** 2, 2.0, 1.0) == pytest.approx(2 * Rs, rel=1e-15)
    with pytest.raises(ValueError):
        galdi_resistive_threshold(-1.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        galdi_resistive_threshold(1.0, -1.0, 1.0, 1.0)


def test_upsilon1_q0_and_bound():
    p = Params(R=50.0)
    v, b = upsilon1(p, build_lattice(p, A_MAX), N)
    assert v == pytest.approx(math.sqrt(2), rel=1e-10)
    for Q in (1.0, 100.0, 1e4):
        q = p.replace(Q=Q)
        v, b = upsilon1(q, build_lattice(q, A_MAX), N)
        assert 0 < v <= b + 1e-8
        assert upsilon1_limit(q, N) <= b + 1e-8


def test_above_threshold_both_below_one():
    p = Params(R=50.0, P_theta=2.0)
    p = p.replace(Q=1.01 * stability_threshold_Q(p))
    lat = build_lattice(p, A_MAX)
    assert upsilon1(p, lat, N)[0] < 1 and upsilon1_limit(p, N) < 1
    assert upsilon2(p, lat, N) < 1
    assert e1_positive_definite(p, 3.0, N)
    assert not e1_positive_definite(p.replace(Q=0.0), 3.0, N)


def test_upsilon2_decreases_in_Q_and_flags_q0():
    p = Params(R=50.0)
    lat = build_lattice(p, A_MAX)
    vals = [upsilon2(p.replace(Q=q), lat, N) for q in (1.0, 10.0, 100.0, 1000.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert math.isinf(upsilon2_scan(p, lat, N).value)
    with pytest.raises(ValueError):
        upsilon2(p.replace(Q=1.0), [], N)


def test_instability_simple_cases():
    p = Params(R=50.0)
    v = instability_criterion(p, 5.0, 41.3, 0.3)
    assert v.exact and v.sufficient
    v = instability_criterion(Params(R=40.0), -1.0, 41.3, 0.3)
    assert not v.exact and not v.sufficient and v.reason == "convection condition fails"


@settings(max_examples=200, deadline=None)
@given(R0=st.floats(5, 100), f=st.floats(1.0001, 4), P=st.floats(0.1, 10), q=st.floats(0, 2),
       u=st.floats(0, 1), w=st.floats(0, 1))
def test_sufficient_implies_exact(R0, f, P, q, u, w):
    R = R0 * f
    x = u / (2 * math.sqrt(P))
    low = 2 * (R - R0) * x
    top = R / math.sqrt(P)
    if low > top:
        return
    L0 = low + w * (top - low)
    if L0 <= 0:
        return
    v = instability_criterion(Params(R=R, Q=q * q, P_theta=P), L0, R0, x)
    assert (not v.sufficient) or v.exact


def test_sufficient_window_closes_at_R0():
    R0, x, P = 41.3, 0.3, 1.0
    margins = [instability_criterion(Params(R=R0 * (1 + e), P_theta=P), 2 * R0 * e * x + 1e-3, R0, x)
               .sufficient_margin for e in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(b < a for a, b in zip(margins, margins[1:]))
    assert margins[-1] < 1e-3


@pytest.fixture(scope="module")
def shared():
    return shared_quantities(Params(R=50.0), N, 16.0)


def test_classify_examples(shared):
    c = classify(Params(R=math.sqrt(1000.0), Q=5.0), N, shared=shared, alt=False)
    assert c.verdict == STABLE and "R<R0" in c.witnesses
    c = classify(Params(R=50.0), N, shared=shared, alt=False)
    assert c.verdict == UNSTABLE and c.lambda_star == pytest.approx(c.lambda0, rel=1e-10) and c.lambda0 > 0
    c = classify(Params(R=50.0, Q=100.0), N, shared=shared)
    assert c.verdict == INDETERMINATE and not c.witnesses
    assert c.report.upsilon1_sup <= c.report.upsilon1_bound + 1e-8
    c = classify(Params(R=50.0, Q=1e4), N, shared=shared, alt=False)
    assert c.verdict == STABLE and "Q>threshold" in c.witnesses
    with pytest.raises(ValueError):
        classify(Params(R=50.0, tau=0.5), N, shared=shared)

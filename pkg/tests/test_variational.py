import math

import numpy as np
import pytest

from zeromb.params import BC, Params, build_lattice
from zeromb.variational import Search, alpha, critical_R0, lambda0, mode_alpha, xi

N = 48


@pytest.fixture(scope="module")
def rigid_crit():
    return critical_R0(Params(R=1.0), Search.continuous(), N)


def test_stress_free_critical_matches_closed_form():
    res = critical_R0(Params(R=1.0, bc=BC.STRESS_FREE), Search.continuous(), N)
    assert res.value ** 2 == pytest.approx(27 * math.pi ** 4 / 4, rel=1e-6)
    assert res.a_star == pytest.approx(math.pi / math.sqrt(2), rel=1e-4)


def test_rigid_critical(rigid_crit):
    assert rigid_crit.value ** 2 == pytest.approx(1707.76, abs=2.0)
    assert rigid_crit.a_star == pytest.approx(3.117, rel=1e-2)
    W, Th = rigid_crit.profile
    assert W.shape[0] > 0 and Th.shape[0] > 0


def test_lattice_search_is_above_continuous(rigid_crit):
    p = Params(R=1.0)
    lat = critical_R0(p, Search.lattice(build_lattice(p, 8.0)), N)
    assert lat.value >= rigid_crit.value * (1 - 1e-12)
    assert lat.k_star is not None and lat.k_star.a == pytest.approx(lat.a_star)


def test_lambda0_sign_changes_at_R0(rigid_crit):
    R0 = rigid_crit.value
    below = lambda0(Params(R=0.9 * R0), None, N).value
    above = lambda0(Params(R=1.1 * R0), None, N).value
    at = lambda0(Params(R=R0), None, N).value
    assert below < 0 < above
    assert abs(at) < 1e-6


def test_alpha_properties():
    p = Params(R=math.sqrt(3000.0), Q=0.2, P_theta=2.0)
    vals = [alpha(p, s, None, N).value for s in (1.0, 2.0, 4.0, 8.0)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert max(vals) <= p.R / math.sqrt(p.P_theta)
    L0 = lambda0(p.replace(Q=0.0), None, N).value
    assert alpha(p.replace(Q=0.0), 3.0, None, N).value == pytest.approx(L0, rel=1e-10)
    assert alpha(p.replace(tau=0.5), 3.0, None, N).value > alpha(p, 3.0, None, N).value


def test_mode_alpha_matches_single_search():
    p = Params(R=50.0, Q=0.1)
    a = 3.0
    assert mode_alpha(p, a, 4.0, N).value == pytest.approx(alpha(p, 4.0, Search.single(a), N).value, rel=1e-12)


def test_xi_bounds(rigid_crit):
    for P in (0.3, 1.0, 5.0):
        p = Params(R=60.0, P_theta=P)
        x = xi(p, Search.continuous(), N, critical=rigid_crit)
        assert 0 < x <= 1 / (2 * math.sqrt(P))
        L0 = lambda0(p, None, N).value
        assert 2 * (p.R - rigid_crit.value) * x <= L0 + 1e-6


def test_search_validation():
    with pytest.raises(ValueError):
        Search.continuous(a_lo=-1.0)
    with pytest.raises(ValueError):
        Search.lattice([])
    with pytest.raises(ValueError):
        Search(kind="spiral")
    with pytest.raises(ValueError):
        alpha(Params(R=50.0), 0.0, None, N)
    assert Search.continuous().describe()["kind"] == "continuous"


def test_uncoupled_lambda0_tends_to_minus_pi2():
    p = Params(R=1e-12, L1=20.0, L2=20.0)
    L0 = lambda0(p, Search.lattice(build_lattice(p, 1.0)), 64).value
    assert L0 == pytest.approx(-math.pi ** 2, rel=0.02)


def test_lattice_examples():
    p = Params(R=1.0)
    assert [(w.n1, w.n2) for w in build_lattice(p, 1.0)] == [(0, 1), (1, 0)]
    assert [(w.n1, w.n2) for w in build_lattice(p, 1.5)] == [(0, 1), (1, 0), (1, 1)]
    assert set(build_lattice(p, 3.0)) >= set(build_lattice(p, 1.5))

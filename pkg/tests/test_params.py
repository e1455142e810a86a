import math

import pytest

from zeromb.params import BC, Params, Wavenumber, build_lattice, validate_params


def test_defaults_and_bc_parsing():
    p = Params(R=40.0)
    assert (p.Q, p.P_theta, p.tau, p.bc) == (0.0, 1.0, 1.0, BC.RIGID)
    assert Params(R=1.0, bc="stress_free").bc is BC.STRESS_FREE
    assert BC.parse("no-slip") is BC.RIGID


@pytest.mark.parametrize("bad", [dict(R=0.0), dict(R=1.0, Q=-1.0), dict(R=1.0, P_theta=0.0),
                                 dict(R=1.0, tau=0.0), dict(R=1.0, tau=1.5), dict(R=1.0, L1=-1.0),
                                 dict(R=math.inf), dict(R=1.0, bc="sticky")])
def test_invalid(bad):
    with pytest.raises(ValueError):
        Params(**bad)


def test_validate_params():
    p = validate_params({"R": "50", "Q": "0.1", "bc": "stress-free"})
    assert p.R == 50.0 and p.Q == 0.1 and p.bc is BC.STRESS_FREE
    with pytest.raises(ValueError):
        validate_params({"Q": 1})
    with pytest.raises(ValueError):
        validate_params({"R": 1, "Ra": 2})
    with pytest.raises(ValueError):
        validate_params({"R": "abc"})


def test_replace_and_dict_roundtrip():
    p = Params(R=3.0, Q=2.0, bc="stress-free")
    assert validate_params(p.as_dict()) == p
    assert p.replace(Q=0.0).Q == 0.0


def test_lattice_sorted_and_bounded():
    lat = build_lattice(Params(R=1.0, L1=1.0, L2=2.0), 3.0)
    mags = [w.a for w in lat]
    assert mags == sorted(mags) and max(mags) <= 3.0 and min(mags) > 0
    assert all(abs(w.a - math.hypot(w.k1, w.k2)) < 1e-15 for w in lat)
    assert Wavenumber.continuous(2.0).continuous_flag
    with pytest.raises(ValueError):
        build_lattice(Params(R=1.0), 0.0)
    with pytest.raises(ValueError):
        Wavenumber(0.0, 0.0, 0.0)

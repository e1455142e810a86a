import math

import numpy as np
import pytest

from zeromb.fem import assemble_mode_forms, discretization, quadratic_form_value
from zeromb.params import BC


@pytest.mark.parametrize("bc", list(BC))
def test_forms_symmetric_positive(bc):
    f = assemble_mode_forms(3.0, 16, bc)
    for M in (f.M_W, f.G_W, f.D3_W, f.M_Theta, f.G_Theta):
        assert np.allclose(M, M.T, atol=1e-12 * np.abs(M).max())
        assert np.linalg.eigvalsh(M).min() > 0
    assert f.C.shape == (f.dof_W, f.dof_Theta)


def test_sine_profile_integrals():
    # W = sin(pi z) is exact for stress-free walls; Theta = sin(pi z)
    N, a = 64, 2.0
    d = discretization(N, BC.STRESS_FREE)
    w = d.W.interpolate(lambda z: np.sin(math.pi * z), lambda z: math.pi * np.cos(math.pi * z))
    th = d.Theta.interpolate(lambda z: np.sin(math.pi * z))
    f = assemble_mode_forms(a, N, BC.STRESS_FREE)
    pi2 = math.pi ** 2
    assert quadratic_form_value(f.W2, w) == pytest.approx(0.5, rel=1e-6)
    assert quadratic_form_value(f.M_W, w) == pytest.approx(0.5 * (1 + pi2 / a ** 2), rel=1e-6)
    assert quadratic_form_value(f.G_W, w) == pytest.approx(0.5 * (pi2 + a ** 2) ** 2 / a ** 2, rel=1e-5)
    assert quadratic_form_value(f.G_Theta, th) == pytest.approx(0.5 * (pi2 + a ** 2), rel=1e-5)
    assert quadratic_form_value(f.C, w, th) == pytest.approx(0.5, rel=1e-5)


def test_rigid_essential_slopes():
    d = discretization(8, BC.RIGID)
    assert d.W.dim == 2 * 9 - 4
    assert discretization(8, BC.STRESS_FREE).W.dim == 2 * 9 - 2


def test_errors():
    with pytest.raises(ValueError):
        assemble_mode_forms(0.0, 16, "rigid")
    with pytest.raises(ValueError):
        assemble_mode_forms(1.0, 2, "rigid")
    with pytest.raises(ValueError):
        quadratic_form_value(np.eye(3), np.ones(2))

import math

import numpy as np
import pytest

from zeromb.eigen import (EigenError, max_generalized_eigenpair, rightmost_eigen_companion,
                          top_eigenspace)


def test_diagonal_pencil():
    A = np.diag([1.0, 5.0, 2.0])
    B = np.diag([1.0, 2.0, 1.0])
    r = max_generalized_eigenpair(A, B)
    assert r.value == pytest.approx(2.5)
    assert r.vector @ B @ r.vector == pytest.approx(1.0)
    assert r.vector[1] > 0


def test_tie_is_deterministic():
    A = np.diag([3.0, 3.0, 1.0])
    w, V = top_eigenspace(A, np.eye(3))
    assert len(w) == 2
    r1 = max_generalized_eigenpair(A, np.eye(3))
    r2 = max_generalized_eigenpair(A, np.eye(3))
    assert np.array_equal(r1.vector, r2.vector)


def test_errors():
    with pytest.raises(ValueError):
        max_generalized_eigenpair(np.eye(2), np.eye(3))
    with pytest.raises(EigenError):
        max_generalized_eigenpair(np.eye(2), -np.eye(2))


def test_companion_harmonic_oscillator():
    # x'' = -x - 0.2 x': rightmost eigenvalue -0.1 +- i sqrt(0.99)
    mass = np.eye(2)
    stiff = np.array([[0.0, 1.0], [-1.0, -0.2]])
    lam = rightmost_eigen_companion(mass, stiff)
    assert lam.real == pytest.approx(-0.1)
    assert abs(lam.imag) == pytest.approx(math.sqrt(0.99))
    with pytest.raises(EigenError):
        rightmost_eigen_companion(np.zeros((2, 2)), stiff)

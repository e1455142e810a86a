"""Compiled and pure-Python kernels agree; band storage helpers round-trip."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zeromb import _band_py, band
from zeromb.eigen import max_banded_eigenpair, max_generalized_eigenpair

try:
    from zeromb import _band
except ImportError:  # extension not built
    _band = None

BACKENDS = [_band_py] + ([_band] if _band is not None else [])


def spd_band(n, kd, rng, shift=1.0):
    M = rng.standard_normal((n, n))
    M = M @ M.T
    mask = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) <= kd
    M = M * mask
    M += (np.abs(M).sum(axis=1).max() + shift) * np.eye(n)
    return M, band.dense_to_band(M, kd)


def test_band_roundtrip():
    rng = np.random.default_rng(0)
    M, ab = spd_band(12, 3, rng)
    assert np.array_equal(band.band_to_dense(ab), M)


@pytest.mark.parametrize("impl", BACKENDS)
def test_sbmv_and_quad_form(impl):
    rng = np.random.default_rng(1)
    M, ab = spd_band(20, 4, rng)
    x = rng.standard_normal(20)
    assert np.allclose(impl.sbmv(ab, x), M @ x)
    assert impl.quad_form(ab, x) == pytest.approx(x @ M @ x, rel=1e-13)


@pytest.mark.parametrize("impl", BACKENDS)
def test_cholesky_detects_indefinite(impl):
    rng = np.random.default_rng(2)
    M, ab = spd_band(10, 2, rng)
    L = impl.cholesky(ab)
    Ld = np.tril(band.band_to_dense(L))
    Ld = np.tril(sum(np.diag(L[d, : 10 - d], -d) for d in range(3)))
    assert np.allclose(Ld @ Ld.T, M)
    bad = ab.copy()
    bad[0, 4] = -1.0
    assert impl.cholesky(bad) is None


@settings(max_examples=25, deadline=None)
@given(n=st.integers(6, 40), kd=st.integers(1, 5), seed=st.integers(0, 10_000))
def test_max_eig_matches_dense(n, kd, seed):
    rng = np.random.default_rng(seed)
    A, ab = spd_band(n, kd, rng, shift=-5.0)
    B, bb = spd_band(n, kd, rng)
    ref = max_generalized_eigenpair(A, B).value
    for impl in BACKENDS:
        name = "python" if impl is _band_py else "cython"
        res = max_banded_eigenpair(ab, bb, backend=name)
        assert res.value == pytest.approx(ref, rel=1e-9, abs=1e-9)
        assert res.upper >= res.value


def test_backends_agree():
    if _band is None:
        pytest.skip("extension not built")
    rng = np.random.default_rng(5)
    _, ab = spd_band(50, 4, rng, shift=-3.0)
    _, bb = spd_band(50, 4, rng)
    a = max_banded_eigenpair(ab, bb, backend="cython")
    b = max_banded_eigenpair(ab, bb, backend="python")
    assert a.value == pytest.approx(b.value, rel=1e-12)
    assert np.allclose(a.vector, b.vector, atol=1e-8)


def test_start_vector_deterministic():
    assert np.array_equal(band.start_vector(17), band.start_vector(17))


def test_fallback_selected_by_env():
    import os
    import subprocess
    import sys
    code = ("from zeromb import band; from zeromb.params import Params; "
            "from zeromb.variational import critical_R0; "
            "print(band.BACKEND, repr(critical_R0(Params(R=1.0), None, 24).value))")
    env = dict(os.environ, ZEROMB_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    name, value = out.stdout.split()
    assert name == "python"
    from zeromb.params import Params
    from zeromb.variational import critical_R0
    assert float(value) == pytest.approx(critical_R0(Params(R=1.0), None, 24).value, rel=1e-10)

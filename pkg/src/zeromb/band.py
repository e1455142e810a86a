"""Backend selection for the banded kernels.

The compiled ``_band`` extension is used when it imports; otherwise the
scipy-backed ``_band_py`` module.  Set ``ZEROMB_BACKEND=python`` to force the
fallback.
"""
import os

import numpy as np

from . import _band_py

if os.environ.get("ZEROMB_BACKEND", "").lower() == "python":
    _impl = _band_py
    BACKEND = "python"
else:
    try:
        from . import _band as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _band_py
        BACKEND = "python"

_START_CACHE: dict[int, np.ndarray] = {}


def get_backend(name=None):
    """Return the kernel module for ``name`` ('cython', 'python') or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _band_py
    if name == "cython":
        from . import _band
        return _band
    raise ValueError(f"unknown backend {name!r}")


def start_vector(n: int) -> np.ndarray:
    """Fixed pseudo-random start vector, identical for every call of a given size."""
    v = _START_CACHE.get(n)
    if v is None:
        v = np.random.default_rng(20190311).standard_normal(n)
        v.setflags(write=False)
        _START_CACHE[n] = v
    return v


def sbmv(ab, x):
    return _impl.sbmv(np.ascontiguousarray(ab), np.ascontiguousarray(x, dtype=float))


def cholesky(ab):
    return _impl.cholesky(np.ascontiguousarray(ab, dtype=float))


def is_positive_definite(ab) -> bool:
    return cholesky(ab) is not None


def dense_to_band(M, kd: int) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    ab = np.zeros((kd + 1, n))
    for d in range(kd + 1):
        ab[d, : n - d] = np.diagonal(M, -d)
    return ab


def band_to_dense(ab) -> np.ndarray:
    kd1, n = ab.shape
    M = np.zeros((n, n))
    for d in range(kd1):
        idx = np.arange(n - d)
        M[idx + d, idx] = ab[d, : n - d]
        M[idx, idx + d] = ab[d, : n - d]
    return M



def quad_form(ab, x) -> float:
    """x^T M x for a lower-band matrix, accumulated in extended precision."""
    return _impl.quad_form(np.ascontiguousarray(ab, dtype=float), np.ascontiguousarray(x, dtype=float))


def rayleigh_terms(num, den, x) -> float:
    """sum c_k x^T M_k x / sum d_k x^T N_k x over (coef, band) terms, in long double."""
    x = np.ascontiguousarray(x, dtype=float)
    return _impl.rayleigh_terms([(float(c), np.ascontiguousarray(M)) for c, M in num],
                                [(float(c), np.ascontiguousarray(M)) for c, M in den], x)

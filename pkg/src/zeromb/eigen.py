"""Symmetric-definite generalized eigenproblems A x = lambda B x (largest eigenpair)."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import band

DEFAULT_TOL = 1e-8
TIE_RTOL = 1e-8
WARM_MIX = 1e-3


class EigenError(ArithmeticError):
    pass


@dataclass(frozen=True)
class EigenResult:
    value: float
    vector: np.ndarray
    residual: float
    dim: int
    upper: float = math.nan  # certified upper bound on the top eigenvalue (banded path)
    iterations: int = 0


def _sign_normalize(v: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(v))
    if scale == 0:
        return v
    first = np.flatnonzero(np.abs(v) > 1e-12 * scale)[0]
    return -v if v[first] < 0 else v


def scaled_residual(A_dot_x, B_dot_x, x, value, anorm, bnorm) -> float:
    """||Ax - value Bx||_2 / ||x||_2, divided by max(1, ||A||_1 + |value| ||B||_1)."""
    r = np.linalg.norm(A_dot_x - value * B_dot_x) / np.linalg.norm(x)
    return float(r / max(1.0, anorm + abs(value) * bnorm))


def _check_pencil(A, B):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise ValueError(f"dimension mismatch: A {A.shape}, B {B.shape}")
    return A, B


def top_eigenspace(A, B, rtol: float = TIE_RTOL):
    """All eigenpairs whose eigenvalue is within rtol (relative) of the largest.

    Returns (values, vectors) with B-orthonormal columns.
    """
    A, B = _check_pencil(A, B)
    try:
        w, V = sla.eigh(A, B)
    except sla.LinAlgError as exc:
        raise EigenError(f"B is not positive definite: {exc}") from exc
    top = w[-1]
    keep = w >= top - rtol * max(1.0, abs(top))
    return w[keep], V[:, keep]


def max_generalized_eigenpair(A, B, tol: float = DEFAULT_TOL) -> EigenResult:
    """Largest eigenpair of (A, B) by Cholesky reduction and a dense symmetric solve.

    Among (numerically) tied top eigenvectors, each is sign-normalized so its
    first nonzero entry is positive and the lexicographically largest wins.
    """
    A, B = _check_pencil(A, B)
    w, V = top_eigenspace(A, B)
    candidates = [_sign_normalize(V[:, i]) for i in range(V.shape[1])]
    best = max(candidates, key=lambda v: tuple(np.round(v, 12)))
    value = float(w[-1])
    x = best / math.sqrt(best @ B @ best)
    value = float(x @ A @ x)
    res = scaled_residual(A @ x, B @ x, x, value, np.linalg.norm(A, 1), np.linalg.norm(B, 1))
    if res > tol:
        raise EigenError(f"residual {res:.3e} exceeds tolerance {tol:.1e}")
    return EigenResult(value=value, vector=x, residual=res, dim=A.shape[0])


def max_banded_eigenpair(A_band, B_band, guess: float = math.nan, tol: float = DEFAULT_TOL,
                         rtol: float = 1e-14, maxiter: int = 200, backend=None, terms=None,
                         x0=None) -> EigenResult:
    """Largest eigenpair of a banded pencil (lower band storage) via the compiled kernel.

    ``terms`` = (num, den) lists of (coef, band) whose sums are A and B; when
    given, the eigenvalue is re-evaluated from them in extended precision.
    ``x0`` warm-starts the iteration (e.g. the eigenvector of a neighbouring
    mode); a small fixed random component is mixed in so no direction is absent.
    """
    A_band = np.ascontiguousarray(A_band, dtype=float)
    B_band = np.ascontiguousarray(B_band, dtype=float)
    if A_band.shape != B_band.shape:
        raise ValueError(f"dimension mismatch: A {A_band.shape}, B {B_band.shape}")
    impl = band.get_backend(backend)
    n = A_band.shape[1]
    start = band.start_vector(n)
    if x0 is not None:
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (n,):
            raise ValueError(f"dimension mismatch: x0 {x0.shape}, pencil {n}")
        start = x0 / np.max(np.abs(x0)) + WARM_MIX * start / np.max(np.abs(start))
    value, x, upper, iters, ok = impl.max_eig(A_band, B_band, start, float(guess), rtol, maxiter)
    if not ok:
        raise EigenError(f"inverse iteration did not converge in {maxiter} iterations")
    x = _sign_normalize(np.asarray(x))
    if terms is not None:
        value = band.rayleigh_terms(terms[0], terms[1], x)
    Ax, Bx = impl.sbmv(A_band, x), impl.sbmv(B_band, x)
    anorm = _band_norm1(A_band)
    bnorm = _band_norm1(B_band)
    res = scaled_residual(Ax, Bx, x, value, anorm, bnorm)
    if res > tol:
        raise EigenError(f"residual {res:.3e} exceeds tolerance {tol:.1e}")
    return EigenResult(value=float(value), vector=x, residual=res, dim=n,
                       upper=float(upper), iterations=int(iters))


def solve_pencil(pencil, guess: float = math.nan, x0=None, **kw) -> EigenResult:
    """Top eigenpair of a ``pencils.Pencil``."""
    return max_banded_eigenpair(pencil.A, pencil.B, guess, terms=(pencil.num, pencil.den), x0=x0, **kw)


def _band_norm1(ab) -> float:
    kd1, n = ab.shape
    col = np.abs(ab).sum(axis=0)
    for d in range(1, kd1):
        col[d:] += np.abs(ab[d, : n - d])
    return float(col.max())


def rightmost_eigen_companion(mass, stiffness) -> complex:
    """Eigenvalue of largest real part of the first-order system mass * x' = stiffness * x.

    ``mass`` and ``stiffness`` are the block matrices of the per-mode linear
    system in state (eta, u, theta), as built by ``timedomain.linear_system``.
    """
    mass = np.asarray(mass, dtype=float)
    stiffness = np.asarray(stiffness, dtype=float)
    if mass.shape != stiffness.shape:
        raise ValueError("mass and stiffness blocks must have equal shapes")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        try:
            lu = sla.lu_factor(mass)
        except (sla.LinAlgError, ValueError) as exc:
            raise EigenError(f"singular mass block: {exc}") from exc
    if np.any(np.abs(np.diag(lu[0])) <= 1e-14 * np.abs(mass).max()):
        raise EigenError("singular mass block")
    w = sla.eigvals(stiffness, mass)
    w = w[np.isfinite(w)]
    return complex(w[np.argmax(w.real)])

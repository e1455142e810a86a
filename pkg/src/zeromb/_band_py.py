"""Pure-Python banded kernels (scipy LAPACK wrappers); fallback for ``_band``.

Matrices are symmetric and stored in LAPACK lower band form:
``ab[d, j] = M[j + d, j]`` for ``0 <= d <= kd``.
"""
import math

import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded

EPS = np.finfo(float).eps
VEC_TOL = 1e-10  # max-norm change of the normalized iterate
CERT_TOL = 1e-6  # required (sigma - rho) / max(1, |rho|): rho <= lambda_max < sigma


def sbmv(ab, x):
    kd = ab.shape[0] - 1
    y = ab[0] * x
    n = x.shape[0]
    for d in range(1, kd + 1):
        y[d:] += ab[d, : n - d] * x[: n - d]
        y[: n - d] += ab[d, : n - d] * x[d:]
    return y


def cholesky(ab):
    """Lower banded Cholesky factor, or None when the matrix is not positive definite."""
    try:
        return cholesky_banded(ab, lower=True, check_finite=False)
    except LinAlgError:
        return None


def _shifted_factor(A, B, sigma):
    return cholesky(sigma * B - A)


def _form_ld(M, xl):
    n = xl.shape[0]
    Ml = np.asarray(M, dtype=np.longdouble)
    s = np.sum(Ml[0] * xl * xl)
    for d in range(1, M.shape[0]):
        s += 2 * np.sum(Ml[d, : n - d] * xl[: n - d] * xl[d:])
    return s


def quad_form(M, x):
    """x^T M x with long double accumulation."""
    return float(_form_ld(M, np.asarray(x, dtype=np.longdouble)))


def rayleigh_terms(num, den, x):
    """sum c_k x^T M_k x / sum d_k x^T N_k x over (coef, band) terms, in long double."""
    xl = np.asarray(x, dtype=np.longdouble)
    top = sum(np.longdouble(c) * _form_ld(M, xl) for c, M in num)
    bot = sum(np.longdouble(c) * _form_ld(M, xl) for c, M in den)
    return float(top / bot)


def rayleigh_quotient(A, B, x):
    """x^T A x / x^T B x accumulated in extended precision.

    Banded fourth-order stiffness forms cancel heavily for smooth vectors, so a
    double-precision quotient loses ~1e-9 relative; long double recovers it.
    """
    return rayleigh_terms(((1.0, A),), ((1.0, B),), x)


def max_eig(A, B, x0, guess, rtol, maxiter):
    """Largest eigenpair of the pencil (A, B) by certified shifted inverse iteration.

    A factorization of sigma*B - A proves sigma is an upper bound for the
    largest eigenvalue; inverse iteration with that shift converges to the top
    eigenvector.  During the iteration the eigenvalue is estimated as
    sigma - 1/theta (theta: Rayleigh quotient of the inverse operator) to steer
    the shift; the returned value is the extended-precision Rayleigh quotient of
    the converged vector.  Stops when the vector or the estimate settles and
    the certified bracket [rho, sigma] is narrow.
    Returns (value, vector, upper_bound, iterations, converged).
    """
    g = float(np.max(A[0] / B[0]))
    if math.isfinite(guess):
        g = max(g, guess)
    delta = max(1e-3 * abs(g), 1e-6)
    sigma = g + delta
    L = _shifted_factor(A, B, sigma)
    tries = 0
    while L is None:
        tries += 1
        if tries > 400:
            raise ArithmeticError("no upper bound found for the pencil spectrum")
        delta *= 8.0
        sigma = g + delta
        L = _shifted_factor(A, B, sigma)

    x = x0 / math.sqrt(x0 @ sbmv(B, x0))
    rho_prev = math.nan
    for it in range(1, maxiter + 1):
        Bx = sbmv(B, x)
        y = cho_solve_banded((L, True), Bx, check_finite=False)
        theta = y @ Bx
        x_new = y / math.sqrt(y @ sbmv(B, y))
        dx = np.max(np.abs(x_new - x)) / np.max(np.abs(x_new))
        x = x_new
        rho = sigma - 1.0 / theta
        noise = 16.0 * EPS * (abs(sigma) + abs(sigma - rho))
        step = abs(rho - rho_prev) if it > 1 else math.inf
        settled = dx <= VEC_TOL or step <= max(rtol * abs(rho), noise)
        if settled and sigma - rho <= CERT_TOL * max(1.0, abs(rho)):
            return rayleigh_quotient(A, B, x), x, sigma, it, True
        eps = max(1e-8 * max(1.0, abs(rho)), 10.0 * step if math.isfinite(step) else 0.0, 4.0 * noise)
        # try to pull the shift down to just above rho; at worst halve the gap
        half = sigma - 0.5 * (sigma - rho)
        target = min(rho + eps, half)
        Lt = _shifted_factor(A, B, target)
        if Lt is None and target < half:
            target = half
            Lt = _shifted_factor(A, B, target)
        if Lt is not None:
            L, sigma = Lt, target
        rho_prev = rho
    return rayleigh_quotient(A, B, x), x, sigma, maxiter, False

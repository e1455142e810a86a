# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled banded kernels: Cholesky, triangular solves and certified inverse iteration.

Same storage convention and algorithm as ``_band_py``; the whole iteration
runs without returning to the interpreter.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY, isfinite

cnp.import_array()

cdef double EPS = 2.220446049250313e-16
cdef double VEC_TOL = 1e-10
cdef double CERT_TOL = 1e-6


cdef void _sbmv(double[:, ::1] ab, double[::1] x, double[::1] y, bint absval) noexcept nogil:
    cdef Py_ssize_t kd = ab.shape[0] - 1
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t j, d, jmax
    cdef double v, xj
    for j in range(n):
        v = ab[0, j]
        if absval:
            v = fabs(v)
        y[j] = v * x[j]
    for j in range(n):
        xj = x[j]
        jmax = kd if kd < n - 1 - j else n - 1 - j
        for d in range(1, jmax + 1):
            v = ab[d, j]
            if absval:
                v = fabs(v)
            y[j + d] += v * xj
            y[j] += v * x[j + d]


cdef int _chol(double[:, ::1] ab) noexcept nogil:
    """In-place lower band Cholesky; returns 0 or the 1-based failing column."""
    cdef Py_ssize_t kd = ab.shape[0] - 1
    cdef Py_ssize_t n = ab.shape[1]
    cdef Py_ssize_t j, p, q, kn
    cdef double ajj, lq
    for j in range(n):
        ajj = ab[0, j]
        if not (ajj > 0.0):
            return <int>(j + 1)
        ajj = sqrt(ajj)
        ab[0, j] = ajj
        kn = kd if kd < n - 1 - j else n - 1 - j
        for p in range(1, kn + 1):
            ab[p, j] /= ajj
        for q in range(1, kn + 1):
            lq = ab[q, j]
            for p in range(q, kn + 1):
                ab[p - q, j + q] -= ab[p, j] * lq
    return 0


cdef void _solve(double[:, ::1] L, double[::1] b) noexcept nogil:
    """Solve L L^T x = b in place."""
    cdef Py_ssize_t kd = L.shape[0] - 1
    cdef Py_ssize_t n = L.shape[1]
    cdef Py_ssize_t j, p, kn
    cdef double s
    for j in range(n):
        b[j] /= L[0, j]
        kn = kd if kd < n - 1 - j else n - 1 - j
        for p in range(1, kn + 1):
            b[j + p] -= L[p, j] * b[j]
    for j in range(n - 1, -1, -1):
        s = b[j]
        kn = kd if kd < n - 1 - j else n - 1 - j
        for p in range(1, kn + 1):
            s -= L[p, j] * b[j + p]
        b[j] = s / L[0, j]


cdef double _dot(double[::1] x, double[::1] y) noexcept nogil:
    cdef Py_ssize_t i
    cdef double s = 0.0
    for i in range(x.shape[0]):
        s += x[i] * y[i]
    return s


cdef long double _form(double[:, ::1] M, double[::1] x) noexcept nogil:
    cdef Py_ssize_t kd = M.shape[0] - 1
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t j, d, jmax
    cdef long double s = 0.0
    for j in range(n):
        s += <long double>M[0, j] * x[j] * x[j]
        jmax = kd if kd < n - 1 - j else n - 1 - j
        for d in range(1, jmax + 1):
            s += 2.0 * <long double>M[d, j] * x[j] * x[j + d]
    return s


cdef double _rq(double[:, ::1] A, double[:, ::1] B, double[::1] x) noexcept nogil:
    return <double>(_form(A, x) / _form(B, x))


def quad_form(double[:, ::1] M, double[::1] x):
    """x^T M x with long double accumulation."""
    return <double>_form(M, x)


def rayleigh_terms(num, den, double[::1] x):
    """sum c_k x^T M_k x / sum d_k x^T N_k x over (coef, band) terms, in long double."""
    cdef long double top = 0.0, bot = 0.0
    cdef double c
    cdef double[:, ::1] M
    for c, M in num:
        top += <long double>c * _form(M, x)
    for c, M in den:
        bot += <long double>c * _form(M, x)
    return <double>(top / bot)


def rayleigh_quotient(double[:, ::1] A, double[:, ::1] B, double[::1] x):
    """x^T A x / x^T B x accumulated in long double."""
    return _rq(A, B, x)


cdef bint _shifted_factor(double[:, ::1] A, double[:, ::1] B, double sigma,
                          double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t d, j
    for d in range(A.shape[0]):
        for j in range(A.shape[1]):
            out[d, j] = sigma * B[d, j] - A[d, j]
    return _chol(out) == 0


def sbmv(double[:, ::1] ab, double[::1] x):
    y = np.empty(x.shape[0])
    _sbmv(ab, x, y, False)
    return y


def cholesky(ab):
    """Lower banded Cholesky factor, or None when the matrix is not positive definite."""
    L = np.array(ab, dtype=np.float64, order="C", copy=True)
    if _chol(L) != 0:
        return None
    return L


def max_eig(double[:, ::1] A, double[:, ::1] B, x0, double guess, double rtol, int maxiter):
    """Largest eigenpair of (A, B); see ``_band_py.max_eig`` for the contract."""
    cdef Py_ssize_t kd1 = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    cdef Py_ssize_t i
    cdef double g, delta, sigma, target, rho, rho_prev, step, noise, eps, nrm, t, theta, dx, xm, half
    cdef bint ok
    cdef int it, tries
    L_arr = np.empty((kd1, n))
    T_arr = np.empty((kd1, n))
    cdef double[:, ::1] L = L_arr
    cdef double[:, ::1] T = T_arr
    x_arr = np.array(x0, dtype=np.float64, copy=True)
    cdef double[::1] x = x_arr
    cdef double[::1] y = np.empty(n)
    cdef double[::1] w = np.empty(n)

    g = -INFINITY
    for i in range(n):
        t = A[0, i] / B[0, i]
        if t > g:
            g = t
    if isfinite(guess) and guess > g:
        g = guess
    delta = 1e-3 * fabs(g)
    if delta < 1e-6:
        delta = 1e-6
    sigma = g + delta
    tries = 0
    with nogil:
        while not _shifted_factor(A, B, sigma, L):
            tries += 1
            if tries > 400:
                break
            delta *= 8.0
            sigma = g + delta
    if tries > 400:
        raise ArithmeticError("no upper bound found for the pencil spectrum")

    with nogil:
        _sbmv(B, x, w, False)
        nrm = sqrt(_dot(x, w))
        for i in range(n):
            x[i] /= nrm
    rho_prev = 0.0
    rho = 0.0
    for it in range(1, maxiter + 1):
        with nogil:
            _sbmv(B, x, w, False)
            for i in range(n):
                y[i] = w[i]
            _solve(L, y)
            theta = _dot(y, w)
            _sbmv(B, y, w, False)
            nrm = sqrt(_dot(y, w))
            dx = 0.0
            xm = 0.0
            for i in range(n):
                t = y[i] / nrm
                if fabs(t - x[i]) > dx:
                    dx = fabs(t - x[i])
                if fabs(t) > xm:
                    xm = fabs(t)
                x[i] = t
            dx /= xm
            rho = sigma - 1.0 / theta
            noise = 16.0 * EPS * (fabs(sigma) + fabs(sigma - rho))
        step = fabs(rho - rho_prev) if it > 1 else INFINITY
        if ((dx <= VEC_TOL or step <= max(rtol * fabs(rho), noise))
                and sigma - rho <= CERT_TOL * max(1.0, fabs(rho))):
            return _rq(A, B, x), x_arr, sigma, it, True
        eps = 1e-8 * max(1.0, fabs(rho))
        if it > 1 and 10.0 * step > eps:
            eps = 10.0 * step
        if 4.0 * noise > eps:
            eps = 4.0 * noise
        half = sigma - 0.5 * (sigma - rho)
        target = rho + eps
        if target > half:
            target = half
        with nogil:
            ok = _shifted_factor(A, B, target, T)
            if not ok and target < half:
                target = half
                ok = _shifted_factor(A, B, target, T)
            if ok:
                L[:, :] = T
                sigma = target
        rho_prev = rho
    return _rq(A, B, x), x_arr, sigma, maxiter, False

"""Conforming Galerkin discretization of vertical mode profiles on [0, 1].

The vertical-velocity profile W uses piecewise cubic Hermite elements (C1,
nodal values and slopes), the temperature profile Theta piecewise quadratic
Lagrange elements (C0, nodes plus element midpoints).  On a uniform mesh every
element matrix is the same, so the a-independent pieces are assembled once per
(N, bc) and the per-wavenumber forms are cheap linear combinations of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .params import BC

GAUSS_POINTS = 4  # exact to degree 7; products of cubics are degree 6


def _gauss(n=GAUSS_POINTS):
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def hermite_basis(xi, h):
    """Cubic Hermite shape functions on an element of length h.

    Returns (N, dN/dz, d2N/dz2), each of shape (4, len(xi)), for the local
    dofs (W_left, W'_left, W_right, W'_right).
    """
    xi = np.asarray(xi, dtype=float)
    x2, x3 = xi**2, xi**3
    n = np.array([1 - 3 * x2 + 2 * x3, h * (xi - 2 * x2 + x3), 3 * x2 - 2 * x3, h * (x3 - x2)])
    dn = np.array([-6 * xi + 6 * x2, h * (1 - 4 * xi + 3 * x2), 6 * xi - 6 * x2, h * (3 * x2 - 2 * xi)]) / h
    ddn = np.array([-6 + 12 * xi, h * (6 * xi - 4), 6 - 12 * xi, h * (6 * xi - 2)]) / h**2
    return n, dn, ddn


def quadratic_basis(xi, h):
    """Quadratic Lagrange shape functions (left node, midpoint, right node)."""
    xi = np.asarray(xi, dtype=float)
    n = np.array([(1 - xi) * (1 - 2 * xi), 4 * xi * (1 - xi), xi * (2 * xi - 1)])
    dn = np.array([4 * xi - 3, 4 - 8 * xi, 4 * xi - 1]) / h
    return n, dn


class FieldSpace:
    """Trial space of one profile on a uniform mesh of N elements.

    Global (unconstrained) dof numbering:
      hermite:   node i -> value 2i, slope 2i+1
      quadratic: node i -> 2i, midpoint of element e -> 2e+1
    """

    def __init__(self, kind: str, N: int, essential: tuple[int, ...]):
        if kind not in ("hermite", "quadratic"):
            raise ValueError(kind)
        self.kind = kind
        self.N = N
        self.h = 1.0 / N
        self.n_full = 2 * (N + 1) if kind == "hermite" else 2 * N + 1
        self.essential = tuple(sorted(essential))
        mask = np.ones(self.n_full, dtype=bool)
        mask[list(self.essential)] = False
        self.free = np.flatnonzero(mask)
        self.dim = len(self.free)

    def element_dofs(self, e: int) -> np.ndarray:
        if self.kind == "hermite":
            return np.arange(2 * e, 2 * e + 4)
        return np.arange(2 * e, 2 * e + 3)

    def basis(self, xi):
        if self.kind == "hermite":
            return hermite_basis(xi, self.h)
        n, dn = quadratic_basis(xi, self.h)
        return n, dn, None

    def full(self, coeffs) -> np.ndarray:
        out = np.zeros(self.n_full)
        out[self.free] = coeffs
        return out

    def evaluate(self, coeffs, z, deriv: int = 0) -> np.ndarray:
        """Evaluate a profile (free-dof coefficients) or its derivative at points z."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        c = self.full(coeffs)
        e = np.clip(np.floor(z * self.N).astype(int), 0, self.N - 1)
        xi = z * self.N - e
        out = np.empty_like(z)
        for i, (ei, x) in enumerate(zip(e, xi)):
            vals = self.basis(np.array([x]))[deriv]
            out[i] = c[self.element_dofs(ei)] @ vals[:, 0]
        return out

    def interpolate(self, f, df=None) -> np.ndarray:
        """Nodal interpolant of f (hermite also needs the derivative df)."""
        if self.kind == "hermite":
            if df is None:
                raise ValueError("hermite interpolation needs the derivative")
            nodes = np.linspace(0.0, 1.0, self.N + 1)
            c = np.empty(self.n_full)
            c[0::2] = f(nodes)
            c[1::2] = df(nodes)
        else:
            c = f(np.linspace(0.0, 1.0, 2 * self.N + 1))
        return c[self.free]


def w_space(N: int, bc: BC) -> FieldSpace:
    last = 2 * N
    if BC.parse(bc) is BC.RIGID:
        return FieldSpace("hermite", N, (0, 1, last, last + 1))
    return FieldSpace("hermite", N, (0, last))


def theta_space(N: int) -> FieldSpace:
    return FieldSpace("quadratic", N, (0, 2 * N))


def _assemble(left: FieldSpace, right: FieldSpace, dl: int, dr: int) -> np.ndarray:
    """Assemble int (d^dl u)(d^dr v) dz over free dofs of left x right."""
    xi, w = _gauss()
    bl = left.basis(xi)[dl]
    br = right.basis(xi)[dr]
    elem = (bl * (w * left.h)) @ br.T
    out = np.zeros((left.n_full, right.n_full))
    for e in range(left.N):
        out[np.ix_(left.element_dofs(e), right.element_dofs(e))] += elem
    return out[np.ix_(left.free, right.free)]


@dataclass(frozen=True)
class Discretization:
    """a-independent matrices for one (N, bc).

    K{ij}: int W^(i) W^(j), T{ij}: int Theta^(i) Theta^(j),
    X{ij}: int W^(i) Theta^(j) (rectangular, W rows).
    """

    N: int
    bc: BC
    W: FieldSpace
    Theta: FieldSpace
    K00: np.ndarray
    K11: np.ndarray
    K22: np.ndarray
    T00: np.ndarray
    T11: np.ndarray
    X00: np.ndarray
    X11: np.ndarray


@lru_cache(maxsize=32)
def discretization(N: int, bc: BC) -> Discretization:
    if N < 4:
        raise ValueError("N must be at least 4")
    bc = BC.parse(bc)
    W, T = w_space(N, bc), theta_space(N)
    mats = dict(
        K00=_assemble(W, W, 0, 0), K11=_assemble(W, W, 1, 1), K22=_assemble(W, W, 2, 2),
        T00=_assemble(T, T, 0, 0), T11=_assemble(T, T, 1, 1),
        X00=_assemble(W, T, 0, 0), X11=_assemble(W, T, 1, 1),
    )
    for m in mats.values():
        m.setflags(write=False)
    return Discretization(N=N, bc=bc, W=W, Theta=T, **mats)


@dataclass(frozen=True)
class ModeForms:
    """Per-wavenumber quadratic-form matrices over vertical profiles.

    M_W   int W^2 + W'^2/a^2            (L2 norm of the poloidal velocity)
    G_W   (1/a^2) int (W'' - a^2 W)^2   (Dirichlet norm of the velocity)
    D3_W  int W'^2 + W''^2/a^2          (L2 norm of the vertical derivative)
    W2    int W^2                       (L2 norm of the vertical component)
    M_Theta, G_Theta                    int Th^2, int Th'^2 + a^2 Th^2
    C, GC                               int W Th, int W' Th' + a^2 W Th
    """

    a: float
    N: int
    bc: BC
    dof_W: int
    dof_Theta: int
    M_W: np.ndarray
    G_W: np.ndarray
    D3_W: np.ndarray
    W2: np.ndarray
    M_Theta: np.ndarray
    G_Theta: np.ndarray
    C: np.ndarray
    GC: np.ndarray


def assemble_mode_forms(a: float, N: int, bc: BC | str) -> ModeForms:
    if not a > 0:
        raise ValueError("wavenumber a must be positive")
    if N < 4:
        raise ValueError("N must be at least 4")
    d = discretization(int(N), BC.parse(bc))
    a2 = a * a
    # G_W uses the expanded integrand; it equals (1/a^2) int (W''-a^2 W)^2 once W(0)=W(1)=0
    return ModeForms(
        a=float(a), N=d.N, bc=d.bc, dof_W=d.W.dim, dof_Theta=d.Theta.dim,
        M_W=d.K00 + d.K11 / a2,
        G_W=d.K22 / a2 + 2.0 * d.K11 + a2 * d.K00,
        D3_W=d.K11 + d.K22 / a2,
        W2=d.K00.copy(),
        M_Theta=d.T00.copy(),
        G_Theta=d.T11 + a2 * d.T00,
        C=d.X00.copy(),
        GC=d.X11 + a2 * d.X00,
    )


def quadratic_form_value(form, coeffs, other=None) -> float:
    """coeffs^T form coeffs, or the bilinear value coeffs^T form other."""
    form = np.asarray(form)
    x = np.asarray(coeffs, dtype=float)
    y = x if other is None else np.asarray(other, dtype=float)
    if form.ndim != 2 or form.shape[0] != x.shape[0] or form.shape[1] != y.shape[0]:
        raise ValueError(f"dimension mismatch: form {form.shape}, vectors {x.shape}, {y.shape}")
    return float(x @ form @ y)

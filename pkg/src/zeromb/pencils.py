"""Banded per-mode pencils for every variational quantity.

Several profiles are stacked into one vector with their dofs interleaved node
by node, so every joint matrix is banded.  The a-independent pieces are kept in
band storage once per (N, bc); a pencil at a given wavenumber is a linear
combination of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .band import dense_to_band
from .fem import Discretization, FieldSpace, discretization
from .params import BC


@dataclass(frozen=True)
class Pencil:
    """A x = lambda B x with A and B kept as linear combinations of fixed bands.

    Forming the combination rounds entries that cancel heavily for smooth
    vectors; keeping the terms lets the eigenvalue be re-evaluated from the
    a-independent bands (see ``band.rayleigh_terms``).
    """

    num: tuple
    den: tuple

    @staticmethod
    def combine(terms) -> np.ndarray:
        out = terms[0][0] * terms[0][1]
        for c, M in terms[1:]:
            out = out + c * M
        return out

    @property
    def A(self) -> np.ndarray:
        return self.combine(self.num)

    @property
    def B(self) -> np.ndarray:
        return self.combine(self.den)


class Layout:
    """Interleaved joint numbering for a tuple of field spaces on the same mesh."""

    def __init__(self, spaces: tuple[FieldSpace, ...]):
        self.spaces = spaces
        N = spaces[0].N
        keys = []  # (field, full dof) in joint order
        for i in range(N + 1):
            for f, sp in enumerate(spaces):
                if sp.kind == "hermite":
                    keys += [(f, 2 * i), (f, 2 * i + 1)]
                else:
                    keys.append((f, 2 * i))
            if i < N:
                for f, sp in enumerate(spaces):
                    if sp.kind == "quadratic":
                        keys.append((f, 2 * i + 1))
        free = [set(sp.free.tolist()) for sp in spaces]
        keys = [k for k in keys if k[1] in free[k[0]]]
        pos = {k: j for j, k in enumerate(keys)}
        self.index = [np.array([pos[(f, d)] for d in sp.free]) for f, sp in enumerate(spaces)]
        self.n = len(keys)
        # widest element footprint sets the bandwidth
        kd = 0
        for e in range(N):
            idx = []
            for f, sp in enumerate(spaces):
                fmap = {d: j for j, d in enumerate(sp.free)}
                idx += [self.index[f][fmap[d]] for d in sp.element_dofs(e) if d in fmap]
            kd = max(kd, max(idx) - min(idx))
        self.kd = kd

    def band(self, blocks) -> np.ndarray:
        """Lower band of the symmetric joint matrix built from ``(f, g, M)`` blocks.

        A block with ``f != g`` contributes M at (f, g) and M^T at (g, f), so the
        joint quadratic form picks up ``2 * x_f^T M x_g``.
        """
        M = np.zeros((self.n, self.n))
        for f, g, block in blocks:
            M[np.ix_(self.index[f], self.index[g])] += block
            if f != g:
                M[np.ix_(self.index[g], self.index[f])] += block.T
        return dense_to_band(M, self.kd)

    def split(self, x):
        return tuple(np.asarray(x)[ix] for ix in self.index)

    def join(self, *parts):
        x = np.zeros(self.n)
        for ix, p in zip(self.index, parts):
            x[ix] = p
        return x


class ConvectionPencils:
    """Pencils over (W, Theta): critical R, largest growth and the alpha curve."""

    def __init__(self, d: Discretization):
        self.d = d
        self.layout = Layout((d.W, d.Theta))
        L = self.layout
        self.K00 = L.band([(0, 0, d.K00)])
        self.K11 = L.band([(0, 0, d.K11)])
        self.K22 = L.band([(0, 0, d.K22)])
        self.T00 = L.band([(1, 1, d.T00)])
        self.T11 = L.band([(1, 1, d.T11)])
        self.Csym = L.band([(0, 1, d.X00)])  # x^T Csym x = 2 int W Theta
        self.Jmass0 = self.K00
        self.Jmass1 = self.K11

    def gradient_terms(self, a, tau=1.0):
        a2 = a * a
        return ((tau / a2, self.K22), (2.0 * tau, self.K11), (tau * a2, self.K00),
                (1.0, self.T11), (a2, self.T00))

    def mass_terms(self, a, P_theta):
        return ((1.0, self.K00), (1.0 / (a * a), self.K11), (P_theta, self.T00))

    def gradient(self, a, tau=1.0):
        return Pencil.combine(self.gradient_terms(a, tau))

    def mass(self, a, P_theta):
        return Pencil.combine(self.mass_terms(a, P_theta))

    def critical(self, a) -> Pencil:
        """(2 int W Th, ||grad (w, th)||^2): top eigenvalue is 1/R0 at this mode."""
        return Pencil(((1.0, self.Csym),), self.gradient_terms(a))

    def growth(self, a, R, P_theta, tau=1.0, Q_over_s=0.0) -> Pencil:
        """(F(., s, tau), J): top eigenvalue is alpha(s, tau) at this mode."""
        num = ((R, self.Csym),) + tuple((-c, M) for c, M in self.gradient_terms(a, tau))
        if Q_over_s != 0.0:
            num += ((-Q_over_s, self.K11), (-Q_over_s / (a * a), self.K22))
        return Pencil(num, self.mass_terms(a, P_theta))


class Upsilon1Pencils:
    """Pencils over (phi_3 profile, temperature-like profile in the same C1 space)."""

    def __init__(self, d: Discretization):
        self.layout = Layout((d.W, d.W))
        L = self.layout
        self.K00 = L.band([(0, 0, d.K00)])
        self.K11 = L.band([(0, 0, d.K11)])
        self.K22 = L.band([(0, 0, d.K22)])
        self.P00 = L.band([(1, 1, d.K00)])
        self.Esym = L.band([(0, 1, d.K00)])  # x^T Esym x = 2 int W phi

    def upsilon1(self, a, R, Q, P_theta) -> Pencil:
        den = ((2.0 * R * R / P_theta, self.K00), (P_theta, self.P00))
        if Q != 0.0:
            den = ((Q, self.K11), (Q / (a * a), self.K22)) + den
        return Pencil(((2.0 * R, self.Esym),), den)

    def e1(self, a, R, Q, P_theta):
        """Band of the E1 quadratic form (denominator minus numerator of Upsilon_1)."""
        p = self.upsilon1(a, R, Q, P_theta)
        return p.B - p.A


def horizontal_weights(k1: float, k2: float, m: int) -> np.ndarray:
    """mu_j(k) = sum_{o1+o2=j} k1^(2 o1) k2^(2 o2) for j = 0..m."""
    return np.array([sum(k1 ** (2 * o) * k2 ** (2 * (j - o)) for o in range(j + 1)) for j in range(m + 1)])


class Upsilon2Pencils:
    """Pencils over (phi, psi, theta): poloidal C1 profiles for phi and psi, C0 for theta."""

    def __init__(self, d: Discretization):
        self.layout = Layout((d.W, d.W, d.Theta))
        L = self.layout
        self.D3phi = (L.band([(0, 0, d.K11)]), L.band([(0, 0, d.K22)]))
        self.Mpsi = (L.band([(1, 1, d.K00)]), L.band([(1, 1, d.K11)]))
        self.Gpsi = (L.band([(1, 1, d.K00)]), L.band([(1, 1, d.K11)]), L.band([(1, 1, d.K22)]))
        self.Gth = (L.band([(2, 2, d.T00)]), L.band([(2, 2, d.T11)]))
        self.C = L.band([(0, 2, d.X00)])   # 2 int Phi Th
        self.GC1 = L.band([(0, 2, d.X11)])  # 2 int Phi' Th'

    def upsilon2(self, k1, k2, R, Q, P_theta, underlined=True):
        """Numerator/denominator pencil of Upsilon_2 at lattice vector (k1, k2).

        ``underlined`` selects the cumulative weights S_m = mu_0 + ... + mu_m
        for the horizontal-derivative norms; otherwise only mu_m is used.
        """
        a2 = k1 * k1 + k2 * k2
        mu = horizontal_weights(k1, k2, 3)
        if underlined:
            S2, S3 = mu[:3].sum(), mu.sum()
        else:
            S2, S3 = mu[2], mu[3]
        # common positive factor 1/S3 keeps entries O(1) at large a
        w2 = S2 / S3
        c_gc = 2.0 * R / P_theta * w2
        num = ((1.0, self.Mpsi[0]), (1.0 / a2, self.Mpsi[1]),
               (c_gc, self.GC1), (c_gc * a2 + 0.5 * R, self.C))
        den = ((2.0 * w2 / a2, self.Gpsi[2]), (4.0 * w2, self.Gpsi[1]), (2.0 * w2 * a2, self.Gpsi[0]),
               (2.0 * w2, self.Gth[1]), (2.0 * w2 * a2, self.Gth[0]))
        if Q != 0.0:
            den = ((Q, self.D3phi[0]), (Q / a2, self.D3phi[1])) + den
        return Pencil(num, den)


@lru_cache(maxsize=16)
def convection_pencils(N: int, bc: BC) -> ConvectionPencils:
    return ConvectionPencils(discretization(N, BC.parse(bc)))


@lru_cache(maxsize=16)
def upsilon1_pencils(N: int, bc: BC) -> Upsilon1Pencils:
    return Upsilon1Pencils(discretization(N, BC.parse(bc)))


@lru_cache(maxsize=16)
def upsilon2_pencils(N: int, bc: BC) -> Upsilon2Pencils:
    return Upsilon2Pencils(discretization(N, BC.parse(bc)))

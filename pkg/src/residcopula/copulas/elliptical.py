"""Gaussian and Student-t(5) copulas with an equicorrelation matrix.

With ``R = (1 - r) I + r 11'`` the quadratic form and determinant have closed
forms in ``r``, so scores and their derivatives are analytic in any d.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .base import CopulaFamily

STUDENT_DF = 5.0


class _Equicorrelation:
    """Closed-form pieces of ``z' R^-1 z`` and ``log det R`` with derivatives in ``r``."""

    def __init__(self, z, r, d):
        self.d = d
        self.r = r
        self.z = z
        self.sz = z.sum(axis=1)
        self.s2 = (z * z).sum(axis=1)
        self.t = self.sz**2
        k = 1.0 + (d - 1.0) * r
        self.g = r / k
        self.g1 = 1.0 / k**2
        self.g2 = -2.0 * (d - 1.0) / k**3
        self.one_m = 1.0 - r
        self.k = k

    @property
    def quad(self):
        return (self.s2 - self.g * self.t) / self.one_m

    @property
    def quad1(self):
        n = self.s2 - self.g * self.t
        return -self.g1 * self.t / self.one_m + n / self.one_m**2

    @property
    def quad2(self):
        n = self.s2 - self.g * self.t
        om = self.one_m
        return -self.g2 * self.t / om - 2.0 * self.g1 * self.t / om**2 + 2.0 * n / om**3

    @property
    def logdet(self):
        return (self.d - 1.0) * math.log(self.one_m) + math.log(self.k)

    @property
    def logdet1(self):
        return -(self.d - 1.0) / self.one_m + (self.d - 1.0) / self.k

    @property
    def logdet2(self):
        return -(self.d - 1.0) / self.one_m**2 - (self.d - 1.0) ** 2 / self.k**2

    def dquad_dz(self, j):
        return (2.0 * self.z[:, j] - 2.0 * self.g * self.sz) / self.one_m

    def dquad1_dz(self, j):
        return -2.0 * self.g1 * self.sz / self.one_m + (2.0 * self.z[:, j] - 2.0 * self.g * self.sz) / self.one_m**2


class _Elliptical(CopulaFamily):
    _lower = -1.0
    _upper = 1.0

    def __init__(self, d=2):
        super().__init__(d)
        self._memo = (None, None)
        if self.d > 2:
            self._lower = -1.0 / (self.d - 1.0)
            self._min_tau = 2.0 / math.pi * math.asin(self._lower)

    def _quantiles(self, u):
        # solvers evaluate the same points many times; the transform is the costly part
        last_u, last_z = self._memo
        if last_u is not None and last_u.shape == u.shape and np.array_equal(last_u, u):
            return last_z
        z = self._transform(u)
        self._memo = (u.copy(), z)
        return z

    def _eq(self, u, a):
        return _Equicorrelation(self._quantiles(u), a, self.d)

    def tau(self, alpha):
        return 2.0 / math.pi * math.asin(float(alpha))

    def alpha(self, tau):
        t = self.check_tau(tau)
        return math.sin(math.pi * t / 2.0)

    def dtau_dalpha(self, alpha):
        return 2.0 / (math.pi * math.sqrt(1.0 - float(alpha) ** 2))

    def _corr_factor(self, r):
        corr = np.full((self.d, self.d), r)
        np.fill_diagonal(corr, 1.0)
        return np.linalg.cholesky(corr)


class Gaussian(_Elliptical):
    tag = "gaussian"
    score_class = "log_unbounded"

    def _transform(self, u):
        return special.ndtri(u)

    def _logpdf(self, u, a):
        q = self._eq(u, a)
        return -0.5 * q.logdet - 0.5 * (q.quad - q.s2)

    def _score(self, u, a):
        q = self._eq(u, a)
        return -0.5 * q.logdet1 - 0.5 * q.quad1

    def _score_dalpha(self, u, a):
        q = self._eq(u, a)
        return -0.5 * q.logdet2 - 0.5 * q.quad2

    def _score_du(self, u, a, j):
        q = self._eq(u, a)
        zj = q.z[:, j]
        dens = np.exp(-0.5 * zj * zj) / math.sqrt(2.0 * math.pi)
        return -0.5 * q.dquad1_dz(j) / dens

    def _sample(self, a, n, rng):
        z = rng.standard_normal(size=(n, self.d)) @ self._corr_factor(a).T
        return special.ndtr(z)


class StudentT5(_Elliptical):
    tag = "student_t5"
    score_class = "log_unbounded"
    df = STUDENT_DF

    def _transform(self, u):
        return special.stdtrit(self.df, u)

    def _logpdf(self, u, a):
        nu, d = self.df, self.d
        q = self._eq(u, a)
        const = special.gammaln((nu + d) / 2.0) + (d - 1.0) * special.gammaln(nu / 2.0) - d * special.gammaln(
            (nu + 1.0) / 2.0
        )
        margins = (nu + 1.0) / 2.0 * np.log1p(q.z * q.z / nu).sum(axis=1)
        return const - 0.5 * q.logdet - (nu + d) / 2.0 * np.log1p(q.quad / nu) + margins

    def _score(self, u, a):
        nu, d = self.df, self.d
        q = self._eq(u, a)
        return -0.5 * q.logdet1 - (nu + d) / 2.0 * q.quad1 / (nu + q.quad)

    def _score_dalpha(self, u, a):
        nu, d = self.df, self.d
        q = self._eq(u, a)
        den = nu + q.quad
        return -0.5 * q.logdet2 - (nu + d) / 2.0 * (q.quad2 / den - (q.quad1 / den) ** 2)

    def _score_du(self, u, a, j):
        nu, d = self.df, self.d
        q = self._eq(u, a)
        den = nu + q.quad
        dpsi_dx = -(nu + d) / 2.0 * (q.dquad1_dz(j) / den - q.quad1 * q.dquad_dz(j) / den**2)
        xj = q.z[:, j]
        log_dens = (
            special.gammaln((nu + 1.0) / 2.0)
            - special.gammaln(nu / 2.0)
            - 0.5 * math.log(nu * math.pi)
            - (nu + 1.0) / 2.0 * np.log1p(xj * xj / nu)
        )
        return dpsi_dx / np.exp(log_dens)

    def _sample(self, a, n, rng):
        z = rng.standard_normal(size=(n, self.d)) @ self._corr_factor(a).T
        w = rng.chisquare(self.df, size=n) / self.df
        return special.stdtr(self.df, z / np.sqrt(w)[:, None])

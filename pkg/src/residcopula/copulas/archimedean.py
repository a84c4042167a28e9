"""Clayton, Frank and Gumbel copulas.

Bivariate densities and scores are closed-form. For d >= 3 the density is
``|psi^(d)(t)| * prod |phi'(u_j)|`` with ``t = sum phi(u_j)``, where the
d-th generator derivative comes from Taylor-series arithmetic and the score
from a complex step in the parameter. Clayton is closed-form for every d.
"""

from __future__ import annotations

import math

import numpy as np

from . import _taylor
from .base import CopulaFamily, complex_step
from .debye import frank_alpha, frank_dtau, frank_tau

_FRANK_SMALL = 1e-2


class Clayton(CopulaFamily):
    tag = "clayton"
    score_class = "log_unbounded"
    _lower = 0.0
    _min_tau = 0.0

    def _parts(self, u, a):
        lu = np.log(u)
        pw = np.exp(-a * lu)  # u^-a
        s = pw.sum(axis=1) - self.d + 1.0
        s1 = -(pw * lu).sum(axis=1)  # dS/da
        s2 = (pw * lu * lu).sum(axis=1)  # d2S/da2
        return lu, pw, s, s1, s2

    def _logpdf(self, u, a):
        lu, _, s, _, _ = self._parts(u, a)
        k = np.arange(self.d)
        const = np.sum(np.log1p(k * a))
        return const - (a + 1.0) * lu.sum(axis=1) - (self.d + 1.0 / a) * np.log(s)

    def _score(self, u, a):
        lu, _, s, s1, _ = self._parts(u, a)
        k = np.arange(self.d)
        const = np.sum(k / (1.0 + k * a))
        return const - lu.sum(axis=1) + np.log(s) / a**2 - (self.d + 1.0 / a) * s1 / s

    def _score_dalpha(self, u, a):
        _, _, s, s1, s2 = self._parts(u, a)
        k = np.arange(self.d)
        const = -np.sum(k**2 / (1.0 + k * a) ** 2)
        r1 = s1 / s
        return (
            const
            - 2.0 * np.log(s) / a**3
            + r1 / a**2
            + r1 / a**2
            - (self.d + 1.0 / a) * (s2 / s - r1 * r1)
        )

    def _score_du(self, u, a, j):
        lu, pw, s, s1, _ = self._parts(u, a)
        uj = u[:, j]
        pj = pw[:, j] / uj  # u_j^(-a-1)
        ds = -a * pj
        ds1 = pj * (a * lu[:, j] - 1.0)
        return -1.0 / uj + ds / (a**2 * s) - (self.d + 1.0 / a) * (ds1 * s - s1 * ds) / s**2

    def tau(self, alpha):
        a = float(alpha)
        return a / (a + 2.0)

    def alpha(self, tau):
        t = self.check_tau(tau)
        return 2.0 * t / (1.0 - t)

    def dtau_dalpha(self, alpha):
        return 2.0 / (float(alpha) + 2.0) ** 2

    def _sample(self, a, n, rng):
        # Marshall-Olkin: gamma frailty with Laplace transform (1 + t)^(-1/a)
        v = rng.gamma(1.0 / a, 1.0, size=n)
        e = rng.standard_exponential(size=(n, self.d))
        return np.exp(-np.log1p(e / v[:, None]) / a)


class Gumbel(CopulaFamily):
    tag = "gumbel"
    score_class = "log_unbounded"
    _lower = 1.0
    _min_tau = 0.0

    # bivariate closed forms, x = -log u

    def _bivariate(self, u, a, want_score):
        x = -np.log(u[:, 0])
        y = -np.log(u[:, 1])
        lx, ly = np.log(x), np.log(y)
        xa, ya = np.exp(a * lx), np.exp(a * ly)
        s = xa + ya
        ls = np.log(s)
        big_a = np.exp(ls / a)
        b = 1.0 + (a - 1.0) / big_a
        if not want_score:
            return -big_a + x + y + (a - 1.0) * (lx + ly) + (2.0 / a - 2.0) * ls + np.log(b)
        s1 = xa * lx + ya * ly
        da = big_a * (-ls / a**2 + s1 / (a * s))
        db = 1.0 / big_a - (a - 1.0) * da / big_a**2
        return -da + lx + ly - 2.0 * ls / a**2 + (2.0 / a - 2.0) * s1 / s + db / b

    # d >= 3 through the generator psi(t) = exp(-t^(1/a))

    def _log_generator_part(self, u, a):
        mlu = -np.log(u)
        t = np.sum(mlu**a, axis=1)
        ser = _taylor.exp(-_taylor.power(_taylor.variable(t, self.d), 1.0 / a))
        deriv = _taylor.derivative(ser, self.d) * (-1.0) ** self.d
        # -phi'(u) = a (-log u)^(a-1) / u
        return np.log(deriv) + np.sum(np.log(a) + (a - 1.0) * np.log(mlu) + mlu, axis=1)

    def _logpdf(self, u, a):
        if self.d == 2:
            return self._bivariate(u, a, False)
        return np.real(self._log_generator_part(u, a))

    def _score(self, u, a):
        if self.d == 2:
            return self._bivariate(u, a, True)
        return complex_step(self._log_generator_part, u, a)

    def tau(self, alpha):
        return 1.0 - 1.0 / float(alpha)

    def alpha(self, tau):
        t = self.check_tau(tau)
        return 1.0 / (1.0 - t)

    def dtau_dalpha(self, alpha):
        return 1.0 / float(alpha) ** 2

    def _sample(self, a, n, rng):
        e = rng.standard_exponential(size=(n, self.d))
        if a == 1.0:
            return np.exp(-e)
        # positive stable frailty with Laplace transform exp(-t^(1/a)),
        # Chambers-Mallows-Stuck (Kanter form)
        k = 1.0 / a
        theta = rng.uniform(0.0, math.pi, size=n)
        w = rng.standard_exponential(size=n)
        part = (np.sin(k * theta) ** k * np.sin((1.0 - k) * theta) ** (1.0 - k) / np.sin(theta)) ** (
            1.0 / (1.0 - k)
        )
        v = (part / w) ** ((1.0 - k) / k)
        return np.exp(-((e / v[:, None]) ** k))


class Frank(CopulaFamily):
    tag = "frank"
    score_class = "bounded"

    def __init__(self, d=2):
        super().__init__(d)
        if self.d == 2:
            self._excludes_zero = True
        else:
            # exchangeable Frank in d >= 3 needs positive dependence
            self._lower = 0.0
            self._min_tau = 0.0

    @staticmethod
    def _d_terms(u, a):
        eu = np.exp(-a * u[:, 0])
        ev = np.exp(-a * u[:, 1])
        mu = -np.expm1(-a * u[:, 0])  # 1 - e^{-au}
        mv = -np.expm1(-a * u[:, 1])
        big_d = -math.expm1(-a) - mu * mv
        return eu, ev, mu, mv, big_d

    @staticmethod
    def _log_norm(a):
        # log(a * (1 - e^-a)), positive for either sign of a
        return math.log(abs(a)) + math.log(abs(math.expm1(-a)))

    @staticmethod
    def _dlog_norm(a):
        return 1.0 / a + 1.0 / math.expm1(a)

    def _logpdf(self, u, a):
        if self.d > 2:
            return np.real(self._log_generator_part(u, a))
        *_, big_d = self._d_terms(u, a)
        return self._log_norm(a) - a * (u[:, 0] + u[:, 1]) - 2.0 * np.log(np.abs(big_d))

    def _d_alpha(self, u, a):
        eu, ev, mu, mv, big_d = self._d_terms(u, a)
        uu, vv = u[:, 0], u[:, 1]
        d1 = math.exp(-a) - (uu * eu * mv + vv * ev * mu)
        d2 = -math.exp(-a) + uu * uu * eu * mv + vv * vv * ev * mu - 2.0 * uu * vv * eu * ev
        return eu, ev, mu, mv, big_d, d1, d2

    def _score(self, u, a):
        if self.d > 2:
            return complex_step(self._log_generator_part, u, a)
        *_, big_d, d1, _ = self._d_alpha(u, a)
        return self._dlog_norm(a) - (u[:, 0] + u[:, 1]) - 2.0 * d1 / big_d

    def _score_dalpha(self, u, a):
        if self.d > 2:
            return super()._score_dalpha(u, a)
        if abs(a) < _FRANK_SMALL:
            # 1/a^2 terms cancel catastrophically near independence
            lo = self._score_dalpha(u, -_FRANK_SMALL)
            hi = self._score_dalpha(u, _FRANK_SMALL)
            return lo + (hi - lo) * (a + _FRANK_SMALL) / (2.0 * _FRANK_SMALL)
        *_, big_d, d1, d2 = self._d_alpha(u, a)
        em = math.expm1(a)
        norm2 = -1.0 / a**2 - (em + 1.0) / em**2
        return norm2 - 2.0 * (d2 / big_d - (d1 / big_d) ** 2)

    def _score_du(self, u, a, j):
        if self.d > 2:
            return super()._score_du(u, a, j)
        eu, ev, mu, mv, big_d, d1, _ = self._d_alpha(u, a)
        if j == 0:
            e_j, m_o, e_o, x_j, x_o = eu, mv, ev, u[:, 0], u[:, 1]
        else:
            e_j, m_o, e_o, x_j, x_o = ev, mu, eu, u[:, 1], u[:, 0]
        dd = -a * e_j * m_o
        dd1 = -e_j * ((1.0 - a * x_j) * m_o + a * x_o * e_o)
        return -1.0 - 2.0 * (dd1 * big_d - d1 * dd) / big_d**2

    def _log_generator_part(self, u, a):
        # psi(t) = -(1/a) log(1 - (1 - e^-a) e^-t); phi(u) = -log((1 - e^-au)/(1 - e^-a))
        p = -np.expm1(-a)
        t = -np.sum(np.log(-np.expm1(-a * u) / p), axis=1)
        e = _taylor.exp(-_taylor.variable(t, self.d))
        w = -p * e
        w[0] = w[0] + 1.0
        ser = -_taylor.log(w) / a
        deriv = _taylor.derivative(ser, self.d) * (-1.0) ** self.d
        # -phi'(u) = a / (e^{au} - 1)
        return np.log(deriv) + np.sum(np.log(a) - np.log(np.expm1(a * u)), axis=1)

    def tau(self, alpha):
        return frank_tau(alpha)

    def alpha(self, tau):
        t = self.check_tau(tau)
        return frank_alpha(t)

    def dtau_dalpha(self, alpha):
        return frank_dtau(alpha)

    def _sample(self, a, n, rng):
        if self.d == 2:
            # conditional inversion of C(v | u)
            u = rng.uniform(size=n)
            w = rng.uniform(size=n)
            eu = np.exp(-a * u)
            v = -np.log1p(-w * math.expm1(-a) / (w * (eu - 1.0) - eu)) / a
            return np.column_stack([u, v])
        # logarithmic-series frailty
        v = rng.logseries(-math.expm1(-a), size=n).astype(float)
        e = rng.standard_exponential(size=(n, self.d))
        return -np.log1p(math.expm1(-a) * np.exp(-e / v[:, None])) / a

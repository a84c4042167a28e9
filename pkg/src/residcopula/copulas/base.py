"""Common machinery for one-parameter exchangeable copula families."""

from __future__ import annotations

import numpy as np

from ..errors import ParameterOutOfDomain, PointOnBoundary, TauOutOfRange

BOUNDARY_EPS = 1e-15
TAU_SEARCH_LIMIT = 0.99
TAU_SEARCH_FLOOR = 1e-3


def fd_step(alpha: float) -> float:
    return 1e-5 * max(1.0, abs(alpha))


class CopulaFamily:
    """A one-parameter copula family in dimension ``d``.

    Subclasses implement the vectorized kernels ``_logpdf``, ``_score``,
    ``_score_dalpha`` and ``_score_du`` (inputs already validated, ``u`` of
    shape (n, d)), plus ``tau``, ``alpha`` and ``_sample``. The default
    ``_score_dalpha``/``_score_du`` are central differences of ``_score``.
    """

    tag: str = ""
    score_class: str = "log_unbounded"
    # open parameter interval and whether 0 is excluded from it
    _lower: float = -np.inf
    _upper: float = np.inf
    _excludes_zero: bool = False
    _min_tau: float = -1.0
    _max_tau: float = 1.0

    def __init__(self, d: int = 2):
        d = int(d)
        if d < 2:
            raise ValueError(f"copula dimension must be >= 2, got {d}")
        self.d = d

    def __repr__(self):
        return f"{type(self).__name__}(d={self.d})"

    def __eq__(self, other):
        return type(self) is type(other) and self.d == other.d

    def __hash__(self):
        return hash((self.tag, self.d))

    # domain handling

    @property
    def domain(self) -> tuple[float, float]:
        return (self._lower, self._upper)

    def in_domain(self, alpha: float) -> bool:
        if not np.isfinite(alpha):
            return False
        if self._excludes_zero and alpha == 0.0:
            return False
        return self._lower < alpha < self._upper

    def check_alpha(self, alpha) -> float:
        try:
            a = float(alpha)
        except (TypeError, ValueError):
            raise ParameterOutOfDomain(f"{self.tag}: parameter {alpha!r} is not a real number") from None
        if not self.in_domain(a):
            raise ParameterOutOfDomain(
                f"{self.tag} (d={self.d}): parameter {a} outside ({self._lower}, {self._upper})"
                + (" excluding 0" if self._excludes_zero else "")
            )
        return a

    def check_points(self, u) -> np.ndarray:
        arr = np.asarray(u, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.d:
            raise ValueError(f"{self.tag}: expected points of dimension {self.d}, got shape {np.shape(u)}")
        if not np.all((arr > BOUNDARY_EPS) & (arr < 1.0 - BOUNDARY_EPS)):
            raise PointOnBoundary(f"{self.tag}: points must lie strictly inside (0, 1)^{self.d}")
        return arr

    def tau_range(self) -> tuple[float, float]:
        """Open interval of attainable Kendall's tau."""
        return (self._min_tau, self._max_tau)

    def check_tau(self, tau) -> float:
        t = float(tau)
        lo, hi = self.tau_range()
        if not (lo < t < hi) or (self._excludes_zero and t == 0.0):
            raise TauOutOfRange(f"{self.tag} (d={self.d}): tau={t} outside attainable range ({lo}, {hi})")
        return t

    def search_interval(self) -> tuple[float, float]:
        """Parameter bracket matching tau in [-0.99, 0.99] within the attainable range."""
        lo_t, hi_t = self.tau_range()
        t_lo = max(-TAU_SEARCH_LIMIT, lo_t + TAU_SEARCH_FLOOR) if lo_t < 0 else lo_t + TAU_SEARCH_FLOOR
        t_hi = min(TAU_SEARCH_LIMIT, hi_t - TAU_SEARCH_FLOOR)
        return (self.alpha(t_lo), self.alpha(t_hi))

    # numeric defaults

    def _score_dalpha(self, u, a):
        h = fd_step(a)
        return (self._score(u, a + h) - self._score(u, a - h)) / (2.0 * h)

    def _score_du(self, u, a, j):
        h = np.minimum(np.minimum(fd_step(a), u[:, j] / 2.0), (1.0 - u[:, j]) / 2.0)
        up = u.copy()
        dn = u.copy()
        up[:, j] += h
        dn[:, j] -= h
        return (self._score(up, a) - self._score(dn, a)) / (2.0 * h)

    def dtau_dalpha(self, alpha: float) -> float:
        h = fd_step(alpha) * 1e-1
        return (self.tau(alpha + h) - self.tau(alpha - h)) / (2.0 * h)

    # subclasses

    def _logpdf(self, u, a):
        raise NotImplementedError

    def _score(self, u, a):
        raise NotImplementedError

    def tau(self, alpha: float) -> float:
        raise NotImplementedError

    def alpha(self, tau: float) -> float:
        raise NotImplementedError

    def _sample(self, a, n, rng):
        raise NotImplementedError


def complex_step(f, u, a):
    """d f(u, a) / d a by the complex-step rule; ``f`` must be complex-analytic in ``a``."""
    h = 1e-20 * max(1.0, abs(a))
    return np.imag(f(u, complex(a, h))) / h

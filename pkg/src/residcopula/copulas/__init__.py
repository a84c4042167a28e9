"""Copula family registry and point-wise evaluation API.

Every evaluation accepts a single point of shape (d,) (returning a float) or
a matrix of points of shape (n, d) (returning an array of length n).
"""

from __future__ import annotations

import numpy as np

from ..errors import UnknownFamily
from .archimedean import Clayton, Frank, Gumbel
from .base import CopulaFamily
from .elliptical import Gaussian, StudentT5

FAMILIES = {
    "clayton": Clayton,
    "frank": Frank,
    "gumbel": Gumbel,
    "gaussian": Gaussian,
    "student_t5": StudentT5,
}

_ALIASES = {"normal": "gaussian", "student": "student_t5", "t": "student_t5", "t5": "student_t5", "student_t": "student_t5"}


def get_family(tag: str, d: int = 2) -> CopulaFamily:
    key = str(tag).strip().lower()
    key = _ALIASES.get(key, key)
    try:
        cls = FAMILIES[key]
    except KeyError:
        raise UnknownFamily(f"unknown copula family {tag!r}; choose from {', '.join(FAMILIES)}") from None
    return cls(d)


def _as_family(family, d=None) -> CopulaFamily:
    if isinstance(family, CopulaFamily):
        return family
    return get_family(family, 2 if d is None else d)


def _evaluate(kernel, family, u, alpha, *extra):
    arr = np.asarray(u, dtype=np.float64)
    fam = _as_family(family, arr.shape[-1] if arr.ndim else None)
    a = fam.check_alpha(alpha)
    pts = fam.check_points(arr)
    out = getattr(fam, kernel)(pts, a, *extra)
    return float(out[0]) if arr.ndim == 1 else out


def log_density(family, u, alpha):
    """``log c(u; alpha)``."""
    return _evaluate("_logpdf", family, u, alpha)


def score_psi(family, u, alpha):
    """``d log c(u; alpha) / d alpha``."""
    return _evaluate("_score", family, u, alpha)


def score_dalpha(family, u, alpha):
    """Second parameter derivative of ``log c``."""
    return _evaluate("_score_dalpha", family, u, alpha)


def score_partial_u(family, u, alpha, j: int):
    """``d psi / d u_j`` for the zero-based margin ``j``."""
    return _evaluate("_score_du", family, u, alpha, int(j))


def tau_to_alpha(family, tau: float) -> float:
    return float(_as_family(family).alpha(tau))


def alpha_to_tau(family, alpha: float) -> float:
    fam = _as_family(family)
    return float(fam.tau(fam.check_alpha(alpha)))


def sample(family, alpha, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. draws from the copula, shape (n, d)."""
    fam = _as_family(family)
    a = fam.check_alpha(alpha)
    if n < 1:
        raise ValueError("n must be >= 1")
    return fam._sample(a, int(n), rng)


__all__ = [
    "CopulaFamily",
    "Clayton",
    "Frank",
    "Gumbel",
    "Gaussian",
    "StudentT5",
    "FAMILIES",
    "get_family",
    "log_density",
    "score_psi",
    "score_dalpha",
    "score_partial_u",
    "tau_to_alpha",
    "alpha_to_tau",
    "sample",
]

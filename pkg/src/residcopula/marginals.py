"""Per-margin location(-scale) regression fits and the error-law toolkit.

Each response column is modelled as ``T(Y) = m(X; theta) + s(X; theta) * eps``
with ``m`` linear in the covariates (with intercept) and ``s`` either 1 or a
positive linear function of the covariates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg
import scipy.stats as st

from .dataset import ObservationSet
from .errors import (
    ConfigurationError,
    NonPositiveResponseForLog,
    QuantileArgumentOutOfRange,
    RankDeficientDesign,
    UnknownMargin,
    UnsupportedLaw,
)

SCALE_FLOOR = 1e-6

Transformation = Literal["identity", "log"]
ScaleDesign = Literal["constant_one", "linear_positive"]


@dataclass(frozen=True)
class MarginalSpec:
    """How one response column is regressed on the covariates.

    ``margin_index`` is the zero-based response column.
    """

    margin_index: int
    transformation: Transformation = "identity"
    scale_design: ScaleDesign = "constant_one"
    location_design: Literal["intercept_plus_linear"] = "intercept_plus_linear"

    def __post_init__(self):
        if self.transformation not in ("identity", "log"):
            raise ConfigurationError(f"unknown transformation {self.transformation!r}")
        if self.scale_design not in ("constant_one", "linear_positive"):
            raise ConfigurationError(f"unknown scale design {self.scale_design!r}")
        if self.location_design != "intercept_plus_linear":
            raise ConfigurationError(f"unknown location design {self.location_design!r}")


@dataclass(frozen=True)
class MarginalFit:
    spec: MarginalSpec
    theta_hat: np.ndarray
    residuals: np.ndarray = field(repr=False)


def _ols(design: np.ndarray, target: np.ndarray) -> np.ndarray:
    # thin QR; a tiny diagonal in R means collinear columns
    q, r = np.linalg.qr(design, mode="reduced")
    diag = np.abs(np.diag(r))
    tol = max(design.shape) * np.finfo(float).eps * max(diag.max(initial=0.0), 1.0)
    if diag.size < design.shape[1] or np.any(diag <= tol * 1e3):
        raise RankDeficientDesign("design matrix [1, X] does not have full column rank")
    return scipy.linalg.solve_triangular(r, q.T @ target)


def fit_marginal(data: ObservationSet, spec: MarginalSpec) -> MarginalFit:
    """Least-squares fit of one margin and its standardized residuals.

    With ``scale_design="linear_positive"`` the scale is fitted in a second
    stage by regressing absolute location residuals on ``[1, X]``; fitted
    scales are clamped below at ``SCALE_FLOOR``. ``theta_hat`` is then the
    location coefficients followed by the scale coefficients.
    """
    j = spec.margin_index
    if not 0 <= j < data.d:
        raise IndexError(f"margin_index {j} out of range for d={data.d}")
    y = data.y[:, j]
    if spec.transformation == "log":
        if np.any(y <= 0):
            raise NonPositiveResponseForLog(f"margin {j}: log transform needs positive responses")
        y = np.log(y)
    design = np.column_stack([np.ones(data.n), data.x])
    if data.n < design.shape[1]:
        raise RankDeficientDesign(f"n={data.n} rows cannot identify {design.shape[1]} coefficients")
    beta = _ols(design, y)
    resid = y - design @ beta
    theta = beta
    if spec.scale_design == "linear_positive":
        gamma = _ols(design, np.abs(resid))
        scale = np.maximum(design @ gamma, SCALE_FLOOR)
        resid = resid / scale
        theta = np.concatenate([beta, gamma])
    theta = np.array(theta)
    resid = np.array(resid)
    theta.setflags(write=False)
    resid.setflags(write=False)
    return MarginalFit(spec=spec, theta_hat=theta, residuals=resid)


# error laws


@dataclass(frozen=True)
class ErrorLaw:
    """A univariate error distribution.

    ``tag`` is one of ``normal`` (mean, sd), ``exponential`` (mean),
    ``uniform`` (lo, hi) or ``student_t`` (df). The Student law is the plain
    t distribution, with variance df/(df-2).
    """

    tag: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        if self.tag == "normal":
            if len(p) != 2 or not p[1] > 0:
                raise ValueError("normal needs (mean, sd) with sd > 0")
        elif self.tag == "exponential":
            if len(p) != 1 or not p[0] > 0:
                raise ValueError("exponential needs (mean,) with mean > 0")
        elif self.tag == "uniform":
            if len(p) != 2 or not p[0] < p[1]:
                raise ValueError("uniform needs (lo, hi) with lo < hi")
        elif self.tag == "student_t":
            if len(p) != 1 or not p[0] > 2:
                raise ValueError("student_t needs (df,) with df > 2")
        else:
            raise UnsupportedLaw(f"unsupported error law {self.tag!r}")

    @property
    def dist(self):
        p = self.params
        if self.tag == "normal":
            return st.norm(loc=p[0], scale=p[1])
        if self.tag == "exponential":
            return st.expon(scale=p[0])
        if self.tag == "uniform":
            return st.uniform(loc=p[0], scale=p[1] - p[0])
        return st.t(df=p[0])

    def __str__(self):
        return f"{self.tag}({', '.join(f'{v:g}' for v in self.params)})"


def normal(mean=0.0, sd=1.0) -> ErrorLaw:
    return ErrorLaw("normal", (mean, sd))


def exponential(mean=1.0) -> ErrorLaw:
    return ErrorLaw("exponential", (mean,))


def uniform(lo=-1.0, hi=1.0) -> ErrorLaw:
    return ErrorLaw("uniform", (lo, hi))


def student_t(df=5.0) -> ErrorLaw:
    return ErrorLaw("student_t", (df,))


_LAW_ALIASES = {
    "normal": normal,
    "n": normal,
    "exponential": exponential,
    "e": exponential,
    "uniform": uniform,
    "u": uniform,
    "t": student_t,
    "t5": student_t,
    "student_t": student_t,
}


def law_from_name(name: str) -> ErrorLaw:
    """The study's default law for a short name (``normal``, ``exponential``, ``uniform``, ``t``)."""
    try:
        return _LAW_ALIASES[name.strip().lower()]()
    except KeyError:
        raise UnknownMargin(f"unknown margin {name!r}; choose from normal, exponential, uniform, t") from None


def law_density(law: ErrorLaw, y):
    return law.dist.pdf(y)


def law_cdf(law: ErrorLaw, y):
    return law.dist.cdf(y)


def law_quantile(law: ErrorLaw, u):
    u_arr = np.asarray(u, dtype=float)
    if np.any(~((u_arr > 0) & (u_arr < 1))):
        raise QuantileArgumentOutOfRange("quantile argument must lie in the open interval (0, 1)")
    return law.dist.ppf(u)


def law_upper_quantile(law: ErrorLaw, u):
    """``law_quantile(law, 1 - u)`` without cancellation for small ``u``."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(~((u_arr > 0) & (u_arr < 1))):
        raise QuantileArgumentOutOfRange("quantile argument must lie in the open interval (0, 1)")
    return law.dist.isf(u)


def law_sample(law: ErrorLaw, rng: np.random.Generator, count: int) -> np.ndarray:
    return np.asarray(law.dist.rvs(size=count, random_state=rng), dtype=float)

"""Copula parameter estimators on pseudo-observations.

Three estimators are provided: Kendall's tau inversion, the maximum
pseudo-likelihood estimator (a root of the summed score), and a trimmed
variant that drops pseudo-observations near the boundary of the unit cube.
Standard errors come from the sandwich formula with the rank-correction
term of the influence function estimated by its empirical-copula plug-in.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .copulas import CopulaFamily, get_family
from .dataset import ObservationSet
from .errors import (
    AllPointsTrimmed,
    ConfigurationError,
    MaxIterations,
    NoBracketFound,
    ShapeMismatch,
    SingularInformation,
)
from .marginals import MarginalFit, MarginalSpec, fit_marginal
from .ranks import kendall_tau, mean_pairwise_tau, pseudo_observations

log = logging.getLogger(__name__)

SCORE_TOL = 1e-10  # on the mean score
MAX_ITER = 100
_TAU_WALK = 0.02

ESTIMATOR_ALIASES = {
    "ik": "tau_inversion",
    "tau_inversion": "tau_inversion",
    "pl": "mple",
    "mple": "mple",
    "pl_star": "mple_trimmed",
    "mple_trimmed": "mple_trimmed",
}


@dataclass(frozen=True)
class TrimPolicy:
    """Trimming threshold ``delta_n = D * n ** (-1 / lam)``."""

    D: float = 0.25
    lam: float = 1.9

    def __post_init__(self):
        if not self.D > 0:
            raise ConfigurationError(f"trim D must be positive, got {self.D}")
        if not self.lam >= 1:
            raise ConfigurationError(f"trim lambda must be >= 1, got {self.lam}")

    def delta(self, n: int) -> float:
        dn = self.D * float(n) ** (-1.0 / self.lam)
        if not 0.0 < dn < 0.5:
            raise ConfigurationError(f"trim threshold delta_n={dn:g} for n={n} is outside (0, 0.5)")
        return dn


@dataclass(frozen=True)
class EstimateReport:
    estimator: str
    family: str
    alpha_hat: float
    tau_hat: float
    std_error_alpha: Optional[float] = None
    std_error_tau: Optional[float] = None
    iterations: int = 0
    converged: bool = True
    n_used: int = 0
    score_at_root: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def with_standard_errors(self, se_alpha: float, se_tau: float) -> "EstimateReport":
        d = self.to_dict()
        d.update(std_error_alpha=se_alpha, std_error_tau=se_tau)
        return EstimateReport(**d)


def _resolve(pseudo, family) -> tuple[np.ndarray, CopulaFamily]:
    u = np.asarray(pseudo, dtype=np.float64)
    if u.ndim != 2 or u.shape[1] < 2:
        raise ShapeMismatch(f"pseudo sample must be n x d with d >= 2, got shape {u.shape}")
    if isinstance(family, CopulaFamily):
        if family.d != u.shape[1]:
            raise ShapeMismatch(f"family dimension {family.d} does not match pseudo sample d={u.shape[1]}")
        return u, family
    return u, get_family(family, u.shape[1])


def _sample_tau(u: np.ndarray) -> float:
    if u.shape[1] == 2:
        return kendall_tau(u[:, 0], u[:, 1])
    return mean_pairwise_tau(u)


def estimate_tau_inversion(pseudo, family) -> EstimateReport:
    """Invert the family's tau map at the sample Kendall's tau.

    For d > 2 the average of the pairwise sample taus is inverted.
    """
    u, fam = _resolve(pseudo, family)
    tau = _sample_tau(u)
    alpha = fam.alpha(tau)
    return EstimateReport(
        estimator="tau_inversion",
        family=fam.tag,
        alpha_hat=alpha,
        tau_hat=fam.tau(alpha),
        n_used=u.shape[0],
    )


class _ScoreEquation:
    def __init__(self, u, fam):
        self.u = u
        self.fam = fam
        self.evals = 0

    def point(self, a):
        # Frank's bivariate domain excludes exact independence
        if self.fam._excludes_zero and a == 0.0:
            return 1e-10
        return a

    def g(self, a):
        self.evals += 1
        return float(np.sum(self.fam._score(self.u, self.point(a))))

    def gp(self, a):
        return float(np.sum(self.fam._score_dalpha(self.u, self.point(a))))


def _find_bracket(eq: _ScoreEquation, a0: float, g0: float, lo: float, hi: float):
    """Nearest sign change of the summed score when walking outward from ``a0`` in tau."""
    fam = eq.fam
    t0 = fam.tau(a0)
    t_lo, t_hi = fam.tau(lo), fam.tau(hi)
    # score decreasing is the regular case: positive score means root above a0
    directions = (1, -1) if g0 > 0 else (-1, 1)
    for direction in directions:
        prev_a, prev_g = a0, g0
        k = 1
        while True:
            t = t0 + direction * k * _TAU_WALK
            if direction > 0 and t >= t_hi:
                a = hi
            elif direction < 0 and t <= t_lo:
                a = lo
            else:
                a = fam.alpha(t)
            ga = eq.g(a)
            if np.sign(ga) != np.sign(prev_g) or ga == 0.0:
                return (prev_a, prev_g, a, ga) if prev_a < a else (a, ga, prev_a, prev_g)
            if a in (lo, hi):
                break
            prev_a, prev_g = a, ga
            k += 1
    raise NoBracketFound(
        f"{fam.tag}: summed score has no sign change on [{lo:.6g}, {hi:.6g}] (score at start {g0:.3g})"
    )


def _solve(u: np.ndarray, fam: CopulaFamily, a0: float):
    """Root of the summed score: Newton from ``a0``, then safeguarded Newton on a bracket."""
    n = u.shape[0]
    tol = SCORE_TOL * n
    lo, hi = fam.search_interval()
    eq = _ScoreEquation(u, fam)
    a = min(max(a0, lo), hi)
    ga = eq.g(a)
    it = 0

    # plain Newton while it keeps decreasing |g| inside the search interval
    while it < MAX_ITER and abs(ga) >= tol:
        gpa = eq.gp(a)
        if not (np.isfinite(gpa) and gpa < 0):
            break
        nxt = a - ga / gpa
        if not (lo < nxt < hi) or not fam.in_domain(eq.point(nxt)):
            break
        gn = eq.g(nxt)
        it += 1
        if not np.isfinite(gn) or abs(gn) >= abs(ga):
            break
        a, ga = nxt, gn
    if abs(ga) < tol:
        return a, ga, it

    a_l, g_l, a_r, g_r = _find_bracket(eq, a, ga, lo, hi)
    for endpoint, gv in ((a_l, g_l), (a_r, g_r)):
        if abs(gv) < tol:
            return endpoint, gv, it
    a = 0.5 * (a_l + a_r)
    while it < MAX_ITER:
        it += 1
        ga = eq.g(a)
        if abs(ga) < tol:
            return a, ga, it
        if np.sign(ga) == np.sign(g_l):
            a_l, g_l = a, ga
        else:
            a_r, g_r = a, ga
        width = a_r - a_l
        if width <= 1e-15 * max(1.0, abs(a)):
            # bracket collapsed to rounding; keep the smaller residual
            best = min(((a_l, g_l), (a_r, g_r)), key=lambda p: abs(p[1]))
            return best[0], best[1], it
        gpa = eq.gp(a)
        nxt = a - ga / gpa if gpa != 0 and np.isfinite(gpa) else np.nan
        if not (a_l < nxt < a_r):
            nxt = 0.5 * (a_l + a_r)
        a = nxt
    raise MaxIterations(f"{fam.tag}: no score root within {MAX_ITER} iterations (last alpha {a:.6g}, score {ga:.3g})")


def _initial_value(u, fam, init):
    if init is not None:
        return fam.check_alpha(init)
    tau = _sample_tau(u)
    return fam.alpha(tau)


def estimate_mple(pseudo, family, init: Optional[float] = None) -> EstimateReport:
    """Maximum pseudo-likelihood estimate as the score root nearest the start value.

    The start value is the tau-inversion estimate unless ``init`` is given.
    """
    u, fam = _resolve(pseudo, family)
    fam.check_points(u)
    a0 = _initial_value(u, fam, init)
    alpha, g, it = _solve(u, fam, a0)
    n = u.shape[0]
    converged = abs(g) < SCORE_TOL * n
    return EstimateReport(
        estimator="mple",
        family=fam.tag,
        alpha_hat=float(alpha),
        tau_hat=float(fam.tau(alpha)),
        iterations=it,
        converged=bool(converged),
        n_used=n,
        score_at_root=float(g),
    )


def trim_mask(pseudo, policy: TrimPolicy) -> np.ndarray:
    u = np.asarray(pseudo)
    delta = policy.delta(u.shape[0])
    return np.all((u >= delta) & (u <= 1.0 - delta), axis=1)


def estimate_mple_trimmed(pseudo, family, policy: Optional[TrimPolicy] = None) -> EstimateReport:
    """MPLE computed only from rows inside ``[delta_n, 1 - delta_n]^d``."""
    policy = policy or TrimPolicy()
    u, fam = _resolve(pseudo, family)
    keep = trim_mask(u, policy)
    kept = int(np.count_nonzero(keep))
    if kept < 2:
        raise AllPointsTrimmed(f"trimming at delta_n={policy.delta(u.shape[0]):.4g} leaves {kept} row(s)")
    rep = estimate_mple(u[keep], fam)
    d = rep.to_dict()
    d["estimator"] = "mple_trimmed"
    return EstimateReport(**d)


def _rank_correction(u: np.ndarray, partial: np.ndarray) -> np.ndarray:
    """``(1/n) sum_m [1{u_i <= u_m} - u_m] w_m`` for every i, in O(n log n)."""
    n = u.shape[0]
    order = np.argsort(u, kind="stable")
    us = u[order]
    ws = partial[order]
    suffix = np.concatenate([np.cumsum(ws[::-1])[::-1], [0.0]])
    first_ge = np.searchsorted(us, u, side="left")
    return (suffix[first_ge] - np.dot(u, partial)) / n


def influence_values(pseudo, family, alpha_hat: float) -> np.ndarray:
    """Score plus the estimated rank-correction terms, one value per row."""
    u, fam = _resolve(pseudo, family)
    a = fam.check_alpha(alpha_hat)
    fam.check_points(u)
    psi = fam._score(u, a)
    out = psi.copy()
    for j in range(fam.d):
        out += _rank_correction(u[:, j], fam._score_du(u, a, j))
    return out


def sandwich_covariance(pseudo, family, alpha_hat: float) -> tuple[float, float]:
    """Asymptotic variance ``sigma^2 = var(psi~) / I^2`` and the information ``I``.

    The standard error of ``alpha_hat`` is ``sqrt(sigma^2 / n)``.
    """
    u, fam = _resolve(pseudo, family)
    a = fam.check_alpha(alpha_hat)
    fam.check_points(u)
    fisher = -float(np.mean(fam._score_dalpha(u, a)))
    if not (np.isfinite(fisher) and fisher > 0):
        raise SingularInformation(f"{fam.tag}: estimated information {fisher:.4g} is not positive")
    tilde = influence_values(u, fam, a)
    var = float(np.var(tilde))
    sigma2 = var / fisher**2
    if not np.isfinite(sigma2):
        raise SingularInformation(f"{fam.tag}: sandwich variance is not finite")
    return sigma2, fisher


def standard_errors(pseudo, family, alpha_hat: float) -> tuple[float, float]:
    """Wald standard errors on the parameter and Kendall's tau scales."""
    u, fam = _resolve(pseudo, family)
    sigma2, _ = sandwich_covariance(u, fam, alpha_hat)
    se_alpha = math.sqrt(sigma2 / u.shape[0])
    return se_alpha, se_alpha * abs(fam.dtau_dalpha(alpha_hat))


def estimate(pseudo, family, estimator: str, policy: Optional[TrimPolicy] = None) -> EstimateReport:
    """Dispatch on an estimator tag (``ik``/``pl``/``pl_star`` or long names)."""
    try:
        kind = ESTIMATOR_ALIASES[estimator]
    except KeyError:
        raise ConfigurationError(f"unknown estimator {estimator!r}") from None
    if kind == "tau_inversion":
        return estimate_tau_inversion(pseudo, family)
    if kind == "mple":
        return estimate_mple(pseudo, family)
    return estimate_mple_trimmed(pseudo, family, policy)


def fit_pipeline(
    data: ObservationSet,
    specs: Sequence[MarginalSpec],
    family,
    estimator: str = "pl",
    policy: Optional[TrimPolicy] = None,
    with_standard_errors: bool = True,
) -> tuple[EstimateReport, list[MarginalFit]]:
    """Marginal regressions, residual pseudo-observations, then the copula estimate.

    Standard errors are attached for the likelihood-based estimators; if the
    information is singular they are left empty and a warning is logged.
    """
    if len(specs) != data.d:
        raise ShapeMismatch(f"got {len(specs)} marginal specs for d={data.d} responses")
    fits = [fit_marginal(data, spec) for spec in specs]
    residuals = np.column_stack([f.residuals for f in fits])
    u = pseudo_observations(residuals)
    fam = family if isinstance(family, CopulaFamily) else get_family(family, data.d)
    report = estimate(u, fam, estimator, policy)
    if with_standard_errors and report.estimator != "tau_inversion":
        try:
            se_a, se_t = standard_errors(u, fam, report.alpha_hat)
            report = report.with_standard_errors(se_a, se_t)
        except SingularInformation as exc:
            log.warning("standard errors unavailable: %s", exc)
    return report, fits


__all__ = [
    "TrimPolicy",
    "EstimateReport",
    "estimate_tau_inversion",
    "estimate_mple",
    "estimate_mple_trimmed",
    "sandwich_covariance",
    "standard_errors",
    "influence_values",
    "estimate",
    "fit_pipeline",
    "trim_mask",
]

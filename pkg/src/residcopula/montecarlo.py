"""Monte Carlo replication of the regression-residual copula study.

Each replication draws copula uniforms ``U``, covariates ``X``, builds errors
``eps_j = F_j^{-1}(U_j)`` and responses ``Y_j = theta_j0 + theta_j1 X + eps_j``,
then estimates the copula parameter from the OLS residuals and, for the
oracle variants, from the true errors. Estimates are compared on the Kendall's
tau scale and summarized as bias, SD and RMSE times 100.

Replication ``r`` draws from ``SeedSequence(seed, spawn_key=(r,))``; results
are reduced in replication order, so output does not depend on the worker
count. ``U`` is drawn first from each stream, which makes the oracle
estimates identical for every choice of margins.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .copulas import get_family
from .dataset import ObservationSet
from .errors import EmptyInput, EstimationError, InvalidScenario, ResidCopulaError, ScenarioUnstable
from .estimate import (
    TrimPolicy,
    estimate_mple,
    estimate_mple_trimmed,
    estimate_tau_inversion,
)
from .marginals import ErrorLaw, MarginalSpec, exponential, fit_marginal, normal, student_t, uniform
from .ranks import pseudo_observations

ESTIMATORS = ("ik_oracle", "pl_oracle", "ik", "pl", "pl_star")

MARGIN_SETS = {
    "NE": (normal(), exponential()),
    "NU": (normal(), uniform()),
    "tt": (student_t(5), student_t(5)),
    "NNE": (normal(), normal(), exponential()),
    "NNU": (normal(), normal(), uniform()),
}

# (intercept, slope) per margin; a third row is used only by d = 3 scenarios
DEFAULT_THETA = ((1.0, 1.0), (-1.0, 2.0), (0.0, 1.0))

MIN_SUCCESS_RATE = 0.95


@dataclass(frozen=True)
class Scenario:
    family: str
    tau_true: float
    margins: str
    n: int
    reps: int
    seed: int = 0
    theta: tuple = ()
    covariate_law: str = "normal"
    estimators: tuple = ESTIMATORS
    trim: TrimPolicy = field(default_factory=TrimPolicy)

    def __post_init__(self):
        if self.margins not in MARGIN_SETS:
            raise InvalidScenario(f"margins: expected one of {', '.join(MARGIN_SETS)}, got {self.margins!r}")
        d = len(MARGIN_SETS[self.margins])
        theta = tuple(tuple(float(v) for v in row) for row in (self.theta or DEFAULT_THETA[:d]))
        if len(theta) != d or any(len(row) != 2 for row in theta):
            raise InvalidScenario(f"theta: expected {d} (intercept, slope) pairs")
        object.__setattr__(self, "theta", theta)
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 2:
            raise InvalidScenario(f"n: expected an integer >= 2, got {self.n!r}")
        if isinstance(self.reps, bool) or not isinstance(self.reps, int) or self.reps < 1:
            raise InvalidScenario(f"reps: expected an integer >= 1, got {self.reps!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidScenario(f"seed: expected a non-negative integer, got {self.seed!r}")
        if self.covariate_law not in ("normal", "poisson"):
            raise InvalidScenario(f"covariate_law: expected 'normal' or 'poisson', got {self.covariate_law!r}")
        ests = tuple(self.estimators)
        bad = [e for e in ests if e not in ESTIMATORS]
        if bad or not ests:
            raise InvalidScenario(f"estimators: expected a non-empty subset of {', '.join(ESTIMATORS)}, got {bad or ests}")
        object.__setattr__(self, "estimators", tuple(e for e in ESTIMATORS if e in ests))
        try:
            fam = get_family(self.family, d)
            fam.check_tau(self.tau_true)
        except ResidCopulaError as exc:
            raise InvalidScenario(f"family/tau_true: {exc}") from None

    @property
    def d(self) -> int:
        return len(MARGIN_SETS[self.margins])

    @property
    def laws(self) -> tuple[ErrorLaw, ...]:
        return MARGIN_SETS[self.margins]

    @classmethod
    def from_dict(cls, doc: dict, **overrides) -> "Scenario":
        doc = {**doc, **{k: v for k, v in overrides.items() if v is not None}}
        if "tau" in doc and "tau_true" not in doc:
            doc["tau_true"] = doc.pop("tau")
        allowed = {"family", "tau_true", "margins", "n", "reps", "seed", "theta", "covariate_law", "estimators", "trim"}
        unknown = sorted(set(doc) - allowed)
        if unknown:
            raise InvalidScenario(f"unknown scenario field(s): {', '.join(unknown)}")
        missing = [k for k in ("family", "tau_true", "margins", "n", "reps") if k not in doc]
        if missing:
            raise InvalidScenario(f"missing scenario field(s): {', '.join(missing)}")
        kwargs = dict(doc)
        trim = kwargs.pop("trim", None)
        if trim is not None:
            if not isinstance(trim, dict) or set(trim) - {"D", "lambda"}:
                raise InvalidScenario("trim: expected an object with keys 'D' and 'lambda'")
            try:
                kwargs["trim"] = TrimPolicy(D=float(trim.get("D", 0.25)), lam=float(trim.get("lambda", 1.9)))
            except ResidCopulaError as exc:
                raise InvalidScenario(f"trim: {exc}") from None
        if "estimators" in kwargs:
            kwargs["estimators"] = tuple(kwargs["estimators"])
        try:
            kwargs["tau_true"] = float(kwargs["tau_true"])
        except (TypeError, ValueError):
            raise InvalidScenario(f"tau_true: expected a number, got {kwargs['tau_true']!r}") from None
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str, **overrides) -> "Scenario":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidScenario(f"scenario is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise InvalidScenario("scenario JSON must be an object")
        return cls.from_dict(doc, **overrides)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "tau_true": self.tau_true,
            "margins": self.margins,
            "n": self.n,
            "reps": self.reps,
            "seed": self.seed,
            "theta": [list(row) for row in self.theta],
            "covariate_law": self.covariate_law,
            "estimators": list(self.estimators),
            "trim": {"D": self.trim.D, "lambda": self.trim.lam},
        }


@dataclass(frozen=True)
class MetricRow:
    estimator: str
    bias_x100: float
    sd_x100: float
    rmse_x100: float
    n_ok: int = 0
    n_failed: int = 0


def replication_rng(seed: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(rep,)))


def simulate_dataset(s: Scenario, rep: int):
    """Data for replication ``rep``: ``(ObservationSet, true copula uniforms U)``."""
    rng = replication_rng(s.seed, rep)
    fam = get_family(s.family, s.d)
    u = fam._sample(fam.alpha(s.tau_true), s.n, rng)
    if s.covariate_law == "normal":
        x = rng.standard_normal(s.n)
    else:
        x = rng.poisson(5.0, s.n).astype(float)
    eps = np.column_stack([law.dist.ppf(u[:, j]) for j, law in enumerate(s.laws)])
    y = np.column_stack([b0 + b1 * x + eps[:, j] for j, (b0, b1) in enumerate(s.theta)])
    return ObservationSet(y=y, x=x[:, None]), u


def _attempt(fn, *args, **kwargs):
    try:
        rep = fn(*args, **kwargs)
    except EstimationError:
        return None
    return rep if rep.converged else None


def run_replication(s: Scenario, rep: int) -> dict:
    """Tau-scale estimates for one replication; ``None`` marks a failed estimator."""
    out = {e: None for e in s.estimators}
    fam = get_family(s.family, s.d)
    try:
        data, u = simulate_dataset(s, rep)
        oracle = pseudo_observations(u)
        specs = [MarginalSpec(j) for j in range(s.d)]
        resid = np.column_stack([fit_marginal(data, spec).residuals for spec in specs])
        pseudo = pseudo_observations(resid)
    except ResidCopulaError:
        return out

    for prefix, sample in (("_oracle", oracle), ("", pseudo)):
        ik = _attempt(estimate_tau_inversion, sample, fam)
        if "ik" + prefix in out and ik is not None:
            out["ik" + prefix] = ik.tau_hat
        if "pl" + prefix in out and ik is not None:
            pl = _attempt(estimate_mple, sample, fam, init=ik.alpha_hat)
            out["pl" + prefix] = None if pl is None else pl.tau_hat
    if "pl_star" in out:
        star = _attempt(estimate_mple_trimmed, pseudo, fam, s.trim)
        out["pl_star"] = None if star is None else star.tau_hat
    return out


def _run_one(args):
    s, rep = args
    return run_replication(s, rep)


def summarize(values: Sequence[float], tau_true: float, estimator: str, n_failed: int = 0) -> MetricRow:
    v = np.asarray(values, dtype=float)
    dev = v - tau_true
    bias = float(np.mean(dev))
    sd = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    rmse = math.sqrt(float(np.mean(dev * dev)))
    return MetricRow(estimator, 100.0 * bias, 100.0 * sd, 100.0 * rmse, int(v.size), int(n_failed))


def collect(s: Scenario, threads: int = 1) -> list[dict]:
    """Per-replication estimates in replication order."""
    if threads < 1:
        raise InvalidScenario("threads must be >= 1")
    jobs = [(s, r) for r in range(s.reps)]
    if threads == 1 or s.reps == 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_run_one, jobs, chunksize=max(1, s.reps // (4 * threads))))


def run_scenario(s: Scenario, threads: int = 1) -> list[MetricRow]:
    """Bias/SD/RMSE (x100, tau scale) of every requested estimator.

    Failed replications are excluded from an estimator's row and tallied in
    ``n_failed``; if any estimator succeeds in fewer than 95% of
    replications, :class:`ScenarioUnstable` is raised carrying the rows.
    """
    results = collect(s, threads)
    rows = []
    failures = {}
    for est in s.estimators:
        vals = [r[est] for r in results if r[est] is not None]
        failed = s.reps - len(vals)
        if failed:
            failures[est] = failed
        if vals:
            rows.append(summarize(vals, s.tau_true, est, failed))
    unstable = {e: f for e, f in failures.items() if s.reps - f < MIN_SUCCESS_RATE * s.reps}
    if unstable:
        raise ScenarioUnstable(failures, s.reps, rows)
    return rows


def _fmt(v: float) -> str:
    out = f"{v:.2f}"
    return "0.00" if out == "-0.00" else out


def render_table(rows: Sequence[MetricRow], fmt: str = "markdown") -> str:
    """Render rows as ``csv`` or ``markdown`` with values rounded to 2 decimals."""
    if not rows:
        raise EmptyInput("no metric rows to render")
    if fmt == "markdown":
        lines = ["| estimator | bias | SD | RMSE |", "|---|---:|---:|---:|"]
        lines += [f"| {r.estimator} | {_fmt(r.bias_x100)} | {_fmt(r.sd_x100)} | {_fmt(r.rmse_x100)} |" for r in rows]
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["estimator", "bias", "sd", "rmse"])
        for r in rows:
            writer.writerow([r.estimator, _fmt(r.bias_x100), _fmt(r.sd_x100), _fmt(r.rmse_x100)])
        return buf.getvalue()
    raise ValueError(f"unknown table format {fmt!r}")

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from residcopula.dataset import ObservationSet
from residcopula.errors import (
    ConfigurationError,
    NonPositiveResponseForLog,
    QuantileArgumentOutOfRange,
    RankDeficientDesign,
    UnknownMargin,
    UnsupportedLaw,
)
from residcopula.marginals import (
    SCALE_FLOOR,
    ErrorLaw,
    MarginalSpec,
    exponential,
    fit_marginal,
    law_cdf,
    law_density,
    law_from_name,
    law_quantile,
    law_sample,
    law_upper_quantile,
    normal,
    student_t,
    uniform,
)


def test_ols_recovers_exact_linear_model(rng):
    x = rng.normal(size=(40, 2))
    y = np.column_stack([3.0 - 2.0 * x[:, 0] + 0.5 * x[:, 1], np.zeros(40)])
    y[:, 1] = rng.normal(size=40)
    fit = fit_marginal(ObservationSet(y=y, x=x), MarginalSpec(0))
    np.testing.assert_allclose(fit.theta_hat, [3.0, -2.0, 0.5], atol=1e-12)
    np.testing.assert_allclose(fit.residuals, 0.0, atol=1e-12)


def test_ols_matches_lstsq(rng):
    x = rng.normal(size=(100, 3))
    y = rng.normal(size=(100, 2))
    fit = fit_marginal(ObservationSet(y=y, x=x), MarginalSpec(1))
    design = np.column_stack([np.ones(100), x])
    coef = np.linalg.lstsq(design, y[:, 1], rcond=None)[0]
    np.testing.assert_allclose(fit.theta_hat, coef, rtol=1e-10)
    # normal equations: residuals orthogonal to the design
    np.testing.assert_allclose(design.T @ fit.residuals, 0.0, atol=1e-10)


def test_rank_deficient_design(rng):
    x = rng.normal(size=(20, 1))
    data = ObservationSet(y=rng.normal(size=(20, 2)), x=np.hstack([x, 2 * x]))
    with pytest.raises(RankDeficientDesign):
        fit_marginal(data, MarginalSpec(0))


def test_log_transformation(rng):
    x = rng.normal(size=30)
    y = np.column_stack([np.exp(1.0 + 0.5 * x), rng.normal(size=30)])
    fit = fit_marginal(ObservationSet(y=y, x=x), MarginalSpec(0, transformation="log"))
    np.testing.assert_allclose(fit.theta_hat, [1.0, 0.5], atol=1e-12)
    y[3, 0] = -1.0
    with pytest.raises(NonPositiveResponseForLog):
        fit_marginal(ObservationSet(y=y, x=x), MarginalSpec(0, transformation="log"))


def test_scale_model_standardizes(rng):
    n = 4000
    x = rng.uniform(0.5, 2.0, size=n)
    eps = rng.normal(size=n)
    y = np.column_stack([1.0 + x + (0.5 + x) * eps, rng.normal(size=n)])
    fit = fit_marginal(ObservationSet(y=y, x=x), MarginalSpec(0, scale_design="linear_positive"))
    # standardized residuals have no remaining dependence of spread on x
    r = np.abs(fit.residuals)
    assert abs(np.corrcoef(r, x)[0, 1]) < 0.05
    assert np.all(np.isfinite(fit.residuals))


def test_scale_floor_clamps():
    x = np.arange(10.0)
    y = np.column_stack([2.0 + 3.0 * x, np.sin(x)])
    fit = fit_marginal(ObservationSet(y=y, x=x), MarginalSpec(0, scale_design="linear_positive"))
    assert SCALE_FLOOR == 1e-6
    assert np.all(np.isfinite(fit.residuals))


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        MarginalSpec(0, transformation="sqrt")
    with pytest.raises(ConfigurationError):
        MarginalSpec(0, scale_design="quadratic")


@given(
    shift=st.floats(-100, 100),
    scale=st.floats(0.01, 100),
)
def test_residual_ranks_invariant_to_affine_response(shift, scale):
    rng = np.random.default_rng(7)
    x = rng.normal(size=(30, 1))
    y = rng.normal(size=(30, 2)) + x
    r0 = fit_marginal(ObservationSet(y=y, x=x), MarginalSpec(0)).residuals
    r1 = fit_marginal(ObservationSet(y=shift + scale * y, x=x), MarginalSpec(0)).residuals
    np.testing.assert_allclose(r1, scale * r0, rtol=1e-7, atol=1e-9 * scale)


@pytest.mark.parametrize(
    "law, ref",
    [
        (normal(), stats.norm()),
        (exponential(), stats.expon()),
        (uniform(), stats.uniform(-1, 2)),
        (student_t(5), stats.t(5)),
    ],
)
def test_law_functions_match_reference(law, ref):
    y = np.linspace(-0.9, 3.0, 17)
    np.testing.assert_allclose(law_density(law, y), ref.pdf(y))
    np.testing.assert_allclose(law_cdf(law, y), ref.cdf(y))
    u = np.array([1e-9, 1e-3, 0.25, 0.5, 0.9])
    np.testing.assert_allclose(law_quantile(law, u), ref.ppf(u), rtol=1e-12)
    np.testing.assert_allclose(law_upper_quantile(law, u), ref.isf(u), rtol=1e-12)


@pytest.mark.parametrize("law", [normal(), exponential(), uniform(), student_t(5)])
def test_quantile_round_trip(law):
    u = np.linspace(1e-6, 1 - 1e-6, 101)
    np.testing.assert_allclose(law_cdf(law, law_quantile(law, u)), u, atol=1e-12)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_quantile_argument_out_of_range(u):
    with pytest.raises(QuantileArgumentOutOfRange):
        law_quantile(normal(), u)


def test_law_sampling_is_reproducible():
    a = law_sample(exponential(), np.random.default_rng(3), 5)
    b = law_sample(exponential(), np.random.default_rng(3), 5)
    np.testing.assert_array_equal(a, b)
    assert np.all(a > 0)


def test_law_names_and_unknowns():
    assert law_from_name("Normal") == normal()
    assert law_from_name("t") == student_t(5)
    with pytest.raises(UnknownMargin):
        law_from_name("cauchy")
    with pytest.raises(UnsupportedLaw):
        ErrorLaw("cauchy", ())

"""Tests for the Stein, positive-part Stein and pretest estimators."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shrinkreg.errors import DegenerateStatistic, InvalidLevel, TooFewRestrictions
from shrinkreg.estimators import (
    ShrinkageContext,
    estimate,
    positive_stein_estimate,
    pretest_estimate,
    stein_estimate,
)
from shrinkreg.regression import FitResult, LinearRestriction, RegressionData


def make_ctx(psi, p2=4, ur=None, r=None, p=5):
    ur = np.ones(p) if ur is None else np.asarray(ur, dtype=float)
    r = np.zeros(p) if r is None else np.asarray(r, dtype=float)
    return ShrinkageContext(FitResult(ur, 1.0, psi, "UR"), FitResult(r, 1.0, psi, "R"), psi, p2)


@pytest.fixture
def real_ctx():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((40, 7))
    y = X @ np.r_[np.ones(3), 0.3, 0.0, -0.2, 0.1] + rng.standard_normal(40)
    return ShrinkageContext.from_data(RegressionData(y, X), LinearRestriction.nuisance_subset(7, 4))


class TestContext:
    def test_kappa(self):
        assert make_ctx(3.0, p2=6).kappa == 4

    def test_from_data(self, real_ctx):
        assert real_ctx.p2 == 4
        assert real_ctx.psi > 0
        np.testing.assert_array_equal(real_ctx.restricted.beta[3:], 0.0)


class TestStein:
    def test_psi_equal_kappa_gives_restricted(self):
        ctx = make_ctx(2.0, p2=4, r=np.full(5, 0.25))
        np.testing.assert_array_equal(stein_estimate(ctx).beta, ctx.restricted.beta)

    def test_large_psi_gives_unrestricted(self):
        ctx = make_ctx(1e12, p2=4)
        np.testing.assert_allclose(stein_estimate(ctx).beta, ctx.unrestricted.beta, atol=1e-8)

    def test_formula_arithmetic(self):
        fit = stein_estimate(make_ctx(4.0, p2=4))
        np.testing.assert_allclose(fit.beta, 0.5)
        assert fit.kind == "S"

    def test_below_kappa_overshoots(self):
        # The plain Stein rule reverses sign when psi < kappa.
        fit = stein_estimate(make_ctx(1.0, p2=4))
        np.testing.assert_allclose(fit.beta, -1.0)

    def test_zero_statistic(self):
        ctx = make_ctx(0.0, p2=4)
        with pytest.warns(DegenerateStatistic):
            fit = stein_estimate(ctx)
        assert fit.degenerate
        np.testing.assert_array_equal(fit.beta, ctx.restricted.beta)

    def test_infinite_statistic(self):
        ctx = make_ctx(math.inf, p2=4)
        np.testing.assert_array_equal(stein_estimate(ctx).beta, ctx.unrestricted.beta)

    @pytest.mark.parametrize("fn", [stein_estimate, positive_stein_estimate])
    def test_needs_three_restrictions(self, fn):
        with pytest.raises(TooFewRestrictions):
            fn(make_ctx(5.0, p2=2))


class TestPositiveStein:
    @pytest.mark.parametrize("psi", [0.0, 0.5, 2.0])
    def test_clipped_at_restricted(self, psi):
        ctx = make_ctx(psi, p2=4, r=np.arange(5.0))
        np.testing.assert_array_equal(positive_stein_estimate(ctx).beta, ctx.restricted.beta)

    def test_formula_arithmetic(self):
        fit = positive_stein_estimate(make_ctx(4.0, p2=4))
        np.testing.assert_allclose(fit.beta, 0.5)
        assert fit.kind == "S+"

    def test_equals_stein_above_kappa(self, real_ctx):
        if real_ctx.psi <= real_ctx.kappa:
            pytest.skip("statistic below kappa for this draw")
        np.testing.assert_array_equal(
            positive_stein_estimate(real_ctx).beta, stein_estimate(real_ctx).beta
        )


class TestPretest:
    def test_zero_statistic_gives_restricted(self):
        ctx = make_ctx(0.0, p2=4)
        np.testing.assert_array_equal(pretest_estimate(ctx, 0.05).beta, ctx.restricted.beta)

    def test_level_near_one_gives_unrestricted(self):
        ctx = make_ctx(1e-3, p2=4)
        np.testing.assert_array_equal(pretest_estimate(ctx, 1 - 1e-12).beta, ctx.unrestricted.beta)

    @pytest.mark.parametrize("psi, expect", [(5.0, "R"), (7.0, "UR")])
    def test_two_df_critical_value(self, psi, expect):
        # chi-square(2) upper 5% point is -2 ln 0.05 = 5.9915
        ctx = make_ctx(psi, p2=2)
        fit = pretest_estimate(ctx, 0.05)
        src = ctx.restricted if expect == "R" else ctx.unrestricted
        np.testing.assert_array_equal(fit.beta, src.beta)
        assert fit.kind == "PT" and fit.alpha == 0.05

    def test_tie_keeps_unrestricted(self):
        from shrinkreg.distributions import central_quantile

        ctx = make_ctx(central_quantile(3, 0.1), p2=3)
        np.testing.assert_array_equal(pretest_estimate(ctx, 0.1).beta, ctx.unrestricted.beta)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 2.0])
    def test_invalid_level(self, alpha):
        with pytest.raises(InvalidLevel):
            pretest_estimate(make_ctx(1.0), alpha)


class TestDispatch:
    def test_kinds(self, real_ctx):
        assert estimate("UR", real_ctx) is real_ctx.unrestricted
        assert estimate("R", real_ctx) is real_ctx.restricted
        assert estimate("S+", real_ctx).kind == "S+"
        assert estimate("PT", real_ctx, 0.05).kind == "PT"

    def test_pretest_needs_alpha(self, real_ctx):
        with pytest.raises(InvalidLevel):
            estimate("PT", real_ctx)

    def test_unknown(self, real_ctx):
        with pytest.raises(ValueError):
            estimate("LASSO", real_ctx)

    def test_all_reduce_to_unrestricted_for_huge_psi(self):
        ctx = make_ctx(1e12, p2=5, ur=np.arange(5.0), r=np.zeros(5))
        for kind in ("S", "S+", "PT"):
            np.testing.assert_allclose(estimate(kind, ctx, 0.05).beta, ctx.unrestricted.beta, atol=1e-6)


vectors = st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4)


@settings(max_examples=200, deadline=None)
@given(ur=vectors, r=vectors, psi=st.floats(0.0, 1e4), p2=st.integers(3, 10))
def test_positive_part_on_segment(ur, r, psi, p2):
    ctx = make_ctx(psi, p2=p2, ur=ur, r=r, p=4)
    b = positive_stein_estimate(ctx).beta
    ur, r = np.asarray(ur), np.asarray(r)
    lo, hi = np.minimum(ur, r), np.maximum(ur, r)
    tol = 1e-9 * (1 + np.abs(ur) + np.abs(r))
    assert np.all(b >= lo - tol) and np.all(b <= hi + tol)
    diff = np.sign(b - r)
    assert np.all((diff == 0) | (diff == np.sign(ur - r)))


@settings(max_examples=200, deadline=None)
@given(ur=vectors, r=vectors, psi=st.floats(0.0, 100.0), alpha=st.floats(1e-6, 1 - 1e-6))
def test_pretest_is_one_of_inputs(ur, r, psi, alpha):
    ctx = make_ctx(psi, p2=3, ur=ur, r=r, p=4)
    b = pretest_estimate(ctx, alpha).beta
    assert np.array_equal(b, ctx.unrestricted.beta) or np.array_equal(b, ctx.restricted.beta)

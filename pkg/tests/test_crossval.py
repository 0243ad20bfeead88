"""Tests for K-fold cross-validation and its repetition driver."""

import numpy as np
import pytest

import oracles
from shrinkreg.crossval import (
    CvConfig,
    CvReport,
    EstimatorSpec,
    Summary,
    fold_assignment,
    kfold_once,
    repeated_cv,
)
from shrinkreg.errors import FoldTooSmall, InvalidLevel
from shrinkreg.estimators import ShrinkageContext, estimate
from shrinkreg.regression import LinearRestriction, RegressionData


def synthetic(n=40, seed=0):
    rng = np.random.default_rng(seed)
    X = np.c_[np.ones(n), rng.standard_normal((n, 5))]
    y = X @ np.array([1.0, 0.8, -0.5, 0.1, 0.0, 0.05]) + rng.standard_normal(n)
    return RegressionData(y, X, intercept=True)


@pytest.fixture(scope="module")
def data():
    return synthetic()


@pytest.fixture(scope="module")
def specs():
    r = LinearRestriction.nuisance_subset(6, 3)
    return (EstimatorSpec("UR"), EstimatorSpec("R", r), EstimatorSpec("S+", r),
            EstimatorSpec("PT", r))


class TestFolds:
    @pytest.mark.parametrize("n, k", [(10, 3), (97, 10), (30, 30), (7, 2)])
    def test_partition(self, n, k):
        folds = fold_assignment(n, k, seed=1, rep_index=4)
        assert len(folds) == k
        joined = np.concatenate(folds)
        assert sorted(joined.tolist()) == list(range(n))
        sizes = [len(f) for f in folds]
        assert max(sizes) - min(sizes) <= 1
        assert sizes == sorted(sizes, reverse=True)

    def test_reproducible(self):
        a = fold_assignment(50, 5, 9, 3)
        b = fold_assignment(50, 5, 9, 3)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        c = fold_assignment(50, 5, 9, 4)
        assert not all(np.array_equal(x, y) for x, y in zip(a, c))

    def test_bad_k(self):
        with pytest.raises(ValueError):
            fold_assignment(5, 6, 0, 0)
        with pytest.raises(ValueError):
            fold_assignment(5, 1, 0, 0)


class TestConfig:
    def test_invalid(self):
        with pytest.raises(ValueError):
            CvConfig(k=1)
        with pytest.raises(ValueError):
            CvConfig(repetitions=0)
        with pytest.raises(InvalidLevel):
            CvConfig(alpha=1.5)
        with pytest.raises(ValueError):
            CvConfig(estimators=(EstimatorSpec("UR"), EstimatorSpec("UR")))

    def test_spec_needs_restriction(self):
        with pytest.raises(ValueError):
            EstimatorSpec("R")
        with pytest.raises(ValueError):
            EstimatorSpec("XX")


class TestKfoldOnce:
    def test_brute_force_six_points(self):
        X = np.c_[np.ones(6), [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]]
        y = np.array([0.3, 1.1, 1.9, 3.4, 3.8, 5.2])
        data = RegressionData(y, X, intercept=True)
        cfg = CvConfig(k=2, repetitions=1, seed=123)
        folds = fold_assignment(6, 2, 123, 0)
        ols = lambda X, y: np.linalg.lstsq(X, y, rcond=None)[0]
        raw, corr = oracles.brute_force_kfold(X, y, [f.tolist() for f in folds], ols)
        got = kfold_once(data, cfg, 0)["UR"]
        assert got[0] == pytest.approx(raw, rel=1e-12)
        assert got[1] == pytest.approx(corr, rel=1e-12)

    def test_brute_force_shrinkage(self, data, specs):
        cfg = CvConfig(k=4, repetitions=1, seed=5, estimators=specs)
        folds = [f.tolist() for f in fold_assignment(data.n, 4, 5, 2)]
        got = kfold_once(data, cfg, 2)
        for spec in specs:
            def fit(X, y, spec=spec):
                d = RegressionData(y, X)
                if spec.kind == "UR":
                    return np.linalg.lstsq(X, y, rcond=None)[0]
                return estimate(spec.kind, ShrinkageContext.from_data(d, spec.restriction), 0.05).beta
            raw, corr = oracles.brute_force_kfold(data.X, data.y, folds, fit)
            assert got[spec.label][0] == pytest.approx(raw, rel=1e-10)
            assert got[spec.label][1] == pytest.approx(corr, rel=1e-10)

    def test_leave_one_out_gap(self):
        data = synthetic(n=20, seed=3)
        cfg = CvConfig(k=20, repetitions=1)
        raw, corr = kfold_once(data, cfg, 0)["UR"]
        gap = oracles.loocv_gap(data.X, data.y)
        assert corr - raw == pytest.approx(gap, rel=1e-9)
        # the gap is O(p/n^2) relative to the error, not zero
        assert abs(gap) < 0.05 * raw

    def test_constant_response(self):
        data = RegressionData(np.full(12, 3.0), np.ones((12, 1)), intercept=True)
        raw, corr = kfold_once(data, CvConfig(k=3, repetitions=1), 0)["UR"]
        assert raw == pytest.approx(0.0, abs=1e-25)
        assert corr == pytest.approx(0.0, abs=1e-25)

    def test_fold_too_small(self):
        data = synthetic(n=8)
        with pytest.raises(FoldTooSmall):
            kfold_once(data, CvConfig(k=2, repetitions=1), 0)

    def test_unrestricted_ignores_restriction(self, data):
        a = kfold_once(data, CvConfig(k=5, estimators=(EstimatorSpec("UR"),)), 1)
        other = LinearRestriction.nuisance_subset(6, 1)
        b = kfold_once(data, CvConfig(k=5, estimators=(EstimatorSpec("UR", other),)), 1)
        assert a == b


class TestRepeated:
    def test_single_repetition_has_zero_se(self, data):
        rep = repeated_cv(data, CvConfig(k=5, repetitions=1))
        assert rep["UR"].raw.se == 0.0 and rep["UR"].corrected.se == 0.0

    def test_report_contents(self, data, specs):
        rep = repeated_cv(data, CvConfig(k=5, repetitions=30, estimators=specs))
        assert rep.labels == ["UR", "R", "S+", "PT"]
        for e in rep.entries:
            assert e.raw.mean > 0 and e.raw.se >= 0 and e.corrected.se >= 0
            assert e.raw.se == pytest.approx(e.raw.sd / np.sqrt(30))

    def test_mean_of_single_runs(self, data):
        cfg = CvConfig(k=5, repetitions=6, seed=2)
        rep = repeated_cv(data, cfg)
        singles = [kfold_once(data, cfg, r)["UR"][0] for r in range(6)]
        assert rep["UR"].raw.mean == pytest.approx(np.mean(singles), rel=1e-14)

    def test_thread_count_invariant(self, data, specs):
        cfg1 = CvConfig(k=5, repetitions=120, estimators=specs, threads=1)
        cfg8 = CvConfig(k=5, repetitions=120, estimators=specs, threads=8)
        assert repeated_cv(data, cfg1) == repeated_cv(data, cfg8)

    def test_standard_error_scaling(self):
        data = synthetic(n=30, seed=8)
        ratios = []
        for trial in range(10):
            a = repeated_cv(data, CvConfig(k=5, repetitions=40, seed=trial))
            b = repeated_cv(data, CvConfig(k=5, repetitions=80, seed=trial))
            ratios.append(a["UR"].raw.se / b["UR"].raw.se)
        assert 1.25 <= np.mean(ratios) <= 1.6

    def test_json_round_trip(self, data, specs):
        rep = repeated_cv(data, CvConfig(k=5, repetitions=10, estimators=specs))
        assert CvReport.from_json(rep.to_json()) == rep
        d = rep.to_dict()["results"][0]
        assert set(d) >= {"estimator", "raw", "corrected"}
        assert set(d["raw"]) >= {"mean", "se"}


def test_summary_of():
    s = Summary.of(np.array([1.0, 2.0, 3.0, 4.0]))
    assert s.mean == 2.5
    assert s.sd == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
    assert s.se == pytest.approx(s.sd / 2)

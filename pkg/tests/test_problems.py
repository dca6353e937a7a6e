import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from bfequiv import distributions as dist
from bfequiv.problems import (
    DegenerateDataError,
    GaussianMeanUnknownVar,
    OneSidedNormal,
    RegressionKnownVar,
    RegressionUnknownVar,
    SubjectiveVarianceEquality,
    SubsetSelection,
    TwoSampleMeansKnownVar,
    TwoSampleMeansUnknownEqualVar,
    TwoSidedNormal,
    VarianceRatio,
    orthonormalize,
)
from bfequiv.rng import RngStream


class TestOrthonormalize:
    def test_postconditions(self):
        g = RngStream(1).generator
        X = g.normal(size=(20, 4))
        Z, Q = orthonormalize(X)
        assert_allclose(Z.T @ Z, np.eye(4), atol=1e-12)
        assert_allclose(X @ Q, Z, atol=1e-12)

    def test_span_preserved(self):
        g = RngStream(2).generator
        X = g.normal(size=(15, 3))
        Z, _ = orthonormalize(X)
        # projections onto the two column spaces coincide
        P_x = X @ np.linalg.solve(X.T @ X, X.T)
        assert_allclose(Z @ Z.T, P_x, atol=1e-10)

    def test_rank_deficient_raises(self):
        X = np.ones((10, 2))
        with pytest.raises(np.linalg.LinAlgError):
            orthonormalize(X)


class TestOneSidedNormal:
    def test_summary_is_sum(self):
        p = OneSidedNormal(n=3)
        s = p.summarize([1.0, 2.0, 3.0])
        assert s.t == 6.0

    def test_null_law(self):
        p = OneSidedNormal(n=4)
        assert_allclose(
            dist.quantile(p.null_law(), 0.95), 2.0 * stats.norm.ppf(0.95), rtol=1e-12
        )

    def test_simulated_stat_matches_law(self):
        p = OneSidedNormal(n=4, theta0=0.5)
        s = p.simulate_summary(RngStream(3), 1.0, 100_000)
        law = p.alt_law(1.0)
        assert stats.kstest(s.t, lambda v: dist.cdf(law, v)).statistic < 0.006


class TestGaussianMeanUnknownVar:
    def test_hand_computed_t(self):
        # data (1, 2, 3): xbar = 2, s = 1, t = sqrt(3)*2 = 3.4641
        p = GaussianMeanUnknownVar(n=3)
        s = p.summarize([1.0, 2.0, 3.0])
        assert_allclose(s.t, 2.0 * math.sqrt(3.0), rtol=1e-12)
        assert_allclose(s.xbar, 2.0)
        assert_allclose(s.sum_sq, 14.0)

    def test_constant_data_degenerate(self):
        p = GaussianMeanUnknownVar(n=3)
        with pytest.raises(DegenerateDataError):
            p.summarize([2.0, 2.0, 2.0])

    def test_simulated_t_is_student(self):
        p = GaussianMeanUnknownVar(n=6)
        s = p.simulate_summary(RngStream(4), 0.0, 100_000)
        assert stats.kstest(s.t, lambda v: stats.t.cdf(v, 5)).statistic < 0.006

    def test_alt_cdf_is_noncentral_t(self):
        p = GaussianMeanUnknownVar(n=9)
        x = np.array([-1.0, 0.5, 2.0])
        assert_allclose(
            p.alt_cdf(0.4, x), stats.nct.cdf(x, 8, 3 * 0.4), rtol=1e-12
        )


class TestRegression:
    def test_t_abs_invariant_to_basis(self):
        # T'T is the same whether computed from X or its orthonormalization
        g = RngStream(5).generator
        X = g.normal(size=(12, 3))
        y = g.normal(size=12)
        p = RegressionKnownVar(p=3, n=12)
        s = p.summarize(y, X)
        P_x = X @ np.linalg.solve(X.T @ X, X.T)
        assert_allclose(s.t_abs, y @ P_x @ y, rtol=1e-10)

    def test_f_statistic_from_projections(self):
        g = RngStream(6).generator
        X = g.normal(size=(15, 2))
        y = g.normal(size=15)
        p = RegressionUnknownVar(p=2, n=15)
        s = p.summarize(y, X)
        P_x = X @ np.linalg.solve(X.T @ X, X.T)
        num = (y @ P_x @ y) / 2
        den = (y @ (np.eye(15) - P_x) @ y) / 13
        assert_allclose(s.f, num / den, rtol=1e-10)
        assert_allclose(s.rss1, s.yHy + s.rss2, rtol=1e-12)

    def test_null_laws(self):
        assert_allclose(
            dist.quantile(RegressionKnownVar(p=3, n=10).null_law(), 0.9),
            stats.chi2.ppf(0.9, 3),
            rtol=1e-12,
        )
        assert_allclose(
            dist.quantile(RegressionUnknownVar(p=3, n=10).null_law(), 0.9),
            stats.f.ppf(0.9, 3, 7),
            rtol=1e-12,
        )


class TestTwoSample:
    def test_known_var_stat(self):
        p = TwoSampleMeansKnownVar(n1=3, n2=2, tau1=1.0, tau2=2.0)
        s = p.summarize([1.0, 2.0, 3.0], [0.0, 1.0])
        assert_allclose(s.t, (2.0 - 0.5) ** 2)

    def test_t_statistic_scaled_student_null(self):
        p = TwoSampleMeansUnknownEqualVar(n1=5, n2=7)
        s = p.simulate_summary(RngStream(7), 0.0, 100_000)
        law = p.null_law()
        assert stats.kstest(s.t, lambda v: dist.cdf(law, v)).statistic < 0.006

    def test_t_statistic_two_ways(self):
        # T relates to the standard two-sample t statistic by a constant
        g = RngStream(8).generator
        x1, x2 = g.normal(size=5), g.normal(size=8)
        p = TwoSampleMeansUnknownEqualVar(n1=5, n2=8)
        s = p.summarize(x1, x2)
        t_std = stats.ttest_ind(x2, x1, equal_var=True).statistic
        assert_allclose(s.t, t_std * p.stat_scale, rtol=1e-10)


class TestVarianceRatio:
    def test_null_is_scaled_f(self):
        p = VarianceRatio(n1=6, n2=11)
        s = p.simulate_summary(RngStream(9), 1.0, 100_000)
        # F = S1^2/S2^2 ~ (5/10) F(5, 10)
        assert (
            stats.kstest(s.f * 10 / 5, lambda v: stats.f.cdf(v, 5, 10)).statistic
            < 0.006
        )

    def test_alt_scaling(self):
        p = VarianceRatio(n1=4, n2=4)
        x = np.array([0.5, 1.0, 3.0])
        assert_allclose(p.alt_cdf(2.0, x), p.alt_cdf(1.0, x / 2.0), rtol=1e-12)


class TestSubsetSelection:
    def test_hand_computed_f(self):
        # y = (1, -1), augmented here to n=3 with an orthogonal design
        y = np.array([1.0, 2.0, 2.0])
        X1 = np.array([[1.0], [1.0], [1.0]])
        X2 = np.array([[1.0], [-1.0], [0.0]])
        p = SubsetSelection(n=3, p1=1, p2=1)
        s = p.summarize(y, X1, X2)
        H1 = X1 @ np.linalg.solve(X1.T @ X1, X1.T)
        X = np.hstack([X1, X2])
        H = X @ np.linalg.solve(X.T @ X, X.T)
        expected = (y @ (H - H1) @ y) / (y @ (np.eye(3) - H) @ y)
        assert_allclose(s.f, expected, rtol=1e-12)
        assert_allclose(s.t_stat, s.f / (1 + s.f), rtol=1e-12)

    def test_null_law_is_scaled_f(self):
        p = SubsetSelection(n=10, p1=2, p2=3)
        s = p.simulate_summary(RngStream(10), 0.0, 100_000)
        law = p.null_law()
        assert stats.kstest(s.f, lambda v: dist.cdf(law, v)).statistic < 0.006


class TestSubjectiveVariance:
    def test_summary_fields(self):
        p = SubjectiveVarianceEquality(n1=2, n2=2, a=2.0, b=3.0)
        s = p.summarize([1.0, 1.0], [1.0, 0.0])
        assert_allclose(s.f, 2.0)
        assert_allclose(s.q, 1.0)  # b / (S1^2 + S2^2) = 3/3
        assert_allclose(s.t_sub, 0.25 - 2.0 / 9.0)

    def test_t_invariant_under_reciprocal_f(self):
        p = SubjectiveVarianceEquality(n1=5, n2=5)
        s = p.simulate_summary(RngStream(11), 1.0, 1000)
        t_flip = 0.25 - (1.0 / s.f) / (1.0 + 1.0 / s.f) ** 2
        assert_allclose(s.t_sub, t_flip, atol=1e-12)

    def test_permutation_invariance_of_sums(self):
        p = SubjectiveVarianceEquality(n1=3, n2=3)
        a = p.summarize([1.0, 2.0, 3.0], [0.5, -1.0, 2.0])
        b = p.summarize([3.0, 1.0, 2.0], [2.0, 0.5, -1.0])
        assert a == b


class TestRegionShapes:
    def test_shapes(self):
        assert OneSidedNormal().region_shape == "upper"
        assert TwoSidedNormal().region_shape == "two_tail"
        assert GaussianMeanUnknownVar(n=3).region_shape == "two_tail"
        assert RegressionUnknownVar(p=1, n=5).region_shape == "upper"
        assert VarianceRatio().region_shape == "upper"
        assert SubjectiveVarianceEquality().region_shape == "two_tail"

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from bfequiv import distributions as dist
from bfequiv.distributions import DistSpec


class TestDistSpec:
    def test_normal_matches_scipy(self):
        spec = DistSpec.normal(1.5, 2.0)
        x = np.linspace(-4, 8, 11)
        assert_allclose(dist.cdf(spec, x), stats.norm.cdf(x, 1.5, 2.0), rtol=1e-12)
        assert_allclose(dist.pdf(spec, x), stats.norm.pdf(x, 1.5, 2.0), rtol=1e-12)

    def test_quantile_inverts_cdf(self):
        for spec in [
            DistSpec.normal(0.0, 1.0),
            DistSpec.chi_square(4),
            DistSpec.student_t(7),
            DistSpec.fisher_f(3, 9),
            DistSpec.gamma(2.5, 1.3),
        ]:
            q = np.array([0.01, 0.1, 0.5, 0.9, 0.99])
            x = dist.quantile(spec, q)
            assert_allclose(dist.cdf(spec, x), q, rtol=1e-10)

    def test_scale_parameter(self):
        base = DistSpec.noncentral_chi_square(3, 0.0)
        scaled = DistSpec.noncentral_chi_square(3, 0.0, scale=2.5)
        x = np.array([0.5, 1.0, 4.0])
        assert_allclose(dist.cdf(scaled, x), dist.cdf(base, x / 2.5), rtol=1e-12)
        # density picks up the Jacobian
        assert_allclose(dist.pdf(scaled, x), dist.pdf(base, x / 2.5) / 2.5, rtol=1e-12)

    def test_noncentral_reduces_to_central(self):
        x = np.array([0.5, 2.0, 5.0])
        nc_chi = DistSpec.noncentral_chi_square(3, 0.0)
        assert_allclose(dist.cdf(nc_chi, x), stats.chi2.cdf(x, 3), rtol=1e-10)
        nc_f = DistSpec.noncentral_f(2, 8, 0.0)
        assert_allclose(dist.cdf(nc_f, x), stats.f.cdf(x, 2, 8), rtol=1e-10)

    def test_noncentral_f_matches_scipy(self):
        spec = DistSpec.noncentral_f(3, 12, 2.5)
        x = np.array([0.5, 1.5, 4.0])
        assert_allclose(dist.cdf(spec, x), stats.ncf.cdf(x, 3, 12, 2.5), rtol=1e-10)

    def test_sampling_matches_cdf(self):
        from bfequiv.rng import RngStream

        spec = DistSpec.fisher_f(4, 10, scale=1.7)
        x = dist.sample(spec, RngStream(123), 200_000)
        # Kolmogorov-Smirnov against the claimed law
        stat = stats.kstest(x, lambda v: dist.cdf(spec, v)).statistic
        assert stat < 0.005


class TestValidation:
    def test_bad_params_raise(self):
        with pytest.raises(ValueError):
            DistSpec.normal(0.0, -1.0)
        with pytest.raises(ValueError):
            DistSpec.chi_square(0)
        with pytest.raises(ValueError):
            DistSpec.fisher_f(2, 3, scale=0.0)

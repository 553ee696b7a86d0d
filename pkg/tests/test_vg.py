"""Testes da distribuição variance-gamma e das representações de produtos."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from pyregnorm.core import oracle
from pyregnorm.core.errors import CovarianceError, DomainError, SingularityError
from pyregnorm.core.specfun import QuadratureSpec, integrate
from pyregnorm.core.streams import make_stream
from pyregnorm.core.vg import (
    BivariateGaussianSpec, ProductVectorSpec, VgParams, gaussian_product_law,
    gaussian_product_sample, gaussian_product_sum_law, product_vector_sample, vg_cdf, vg_cf,
    vg_convolve, vg_pdf, vg_sample, vg_scale,
)

LAPLACE = VgParams(2.0, 0.0, 1.0, 0.0)
SKEWED = VgParams(3.0, 0.5, 1.0, 0.0)
OSCILLATORY = QuadratureSpec(abs_tol=1e-9, rel_tol=1e-8, max_subdivisions=1000)


class TestVgParams:

    @pytest.mark.parametrize('args', [(0.0, 0.0, 1.0), (-1.0, 0.0, 1.0), (1.0, 0.0, 0.0),
                                      (1.0, float('nan'), 1.0)])
    def test_rejects_invalid(self, args):
        with pytest.raises(DomainError):
            VgParams(*args)

    def test_moments(self):
        params = VgParams(4.0, 0.5, 1.0, 2.0)
        assert params.mean == pytest.approx(4.0)
        assert params.variance == pytest.approx(6.0)


class TestVgPdf:

    def test_laplace_reduction(self):
        assert vg_pdf(LAPLACE, 0.0) == pytest.approx(0.5, abs=1e-12)
        assert vg_pdf(LAPLACE, 1.0) == pytest.approx(0.5 * math.exp(-1.0), abs=1e-12)
        xs = np.linspace(-6, 6, 25)
        np.testing.assert_allclose(vg_pdf(LAPLACE, xs), 0.5 * np.exp(-np.abs(xs)), rtol=1e-10)

    def test_normalization(self):
        total = integrate(lambda x: vg_pdf(SKEWED, x), -40.0, 40.0, points=[0.0])
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_singular_center(self):
        with pytest.raises(SingularityError):
            vg_pdf(VgParams(1.0, 0.0, 1.0, 0.0), 0.0)
        with pytest.raises(SingularityError):
            vg_pdf(VgParams(0.5, 0.3, 1.0, 2.0), [1.0, 2.0])

    def test_center_is_continuous(self):
        params = VgParams(3.0, 0.4, 1.3, 0.7)
        at_center = vg_pdf(params, 0.7)
        near = vg_pdf(params, 0.7 + 1e-7)
        assert at_center == pytest.approx(near, rel=1e-5)

    @pytest.mark.parametrize('params', [
        SKEWED,
        VgParams(2.0, 0.0, 1.0, 0.0),
        VgParams(5.0, -0.3, 0.8, 1.0),
        VgParams(1.5, 0.2, 1.5, -0.5),
    ])
    def test_matches_gamma_mixture(self, params):
        for x in np.linspace(-3.2, 3.4, 10):
            assert vg_pdf(params, float(x)) == pytest.approx(
                oracle.vg_pdf_quadrature(params, float(x)), abs=1e-7)

    def test_mixture_oracle_symmetry(self):
        params = VgParams(3.0, 0.0, 1.0, 0.0)
        for x in (0.5, 1.7, 3.0):
            assert oracle.vg_pdf_quadrature(params, x) == pytest.approx(
                oracle.vg_pdf_quadrature(params, -x), abs=1e-12)

    @pytest.mark.parametrize('r, x, expected', [
        (101.0, 1e-5, 0.039994087),
        (401.0, 0.5, 0.019953317),
        (1001.0, 5.0, 0.012461753),
    ])
    def test_large_shape_stays_finite(self, r, x, expected):
        params = VgParams(r, 0.0, 1.0, 0.0)
        value = vg_pdf(params, x)
        assert math.isfinite(value)
        assert value == pytest.approx(expected, rel=1e-6)
        assert value == pytest.approx(oracle.vg_pdf_quadrature(params, x), rel=1e-6)

    def test_large_shape_center_is_continuous(self):
        params = VgParams(401.0, 0.0, 1.0, 0.0)
        assert vg_pdf(params, 0.0) == pytest.approx(vg_pdf(params, 1e-6), rel=1e-6)

    def test_fourier_transform_recovers_cf(self):
        def real_part(t):
            return integrate(lambda x: vg_pdf(SKEWED, x) * math.cos(t * x), -60.0, 60.0,
                             OSCILLATORY, points=[0.0])

        def imag_part(t):
            return integrate(lambda x: vg_pdf(SKEWED, x) * math.sin(t * x), -60.0, 60.0,
                             OSCILLATORY, points=[0.0])

        for t in (-5.0, -2.0, -0.5, 0.0, 1.0, 3.0, 5.0):
            expected = vg_cf(SKEWED, t)
            assert real_part(t) == pytest.approx(expected.real, abs=1e-4)
            assert imag_part(t) == pytest.approx(expected.imag, abs=1e-4)


class TestVgCf:

    def test_at_zero(self):
        assert vg_cf(SKEWED, 0.0) == 1.0 + 0.0j

    def test_laplace(self):
        value = vg_cf(LAPLACE, 1.0)
        assert value.real == pytest.approx(0.5)
        assert value.imag == pytest.approx(0.0)

    @given(st.floats(min_value=-10.0, max_value=10.0))
    def test_closure_under_sum(self, t):
        first = VgParams(1.5, 0.4, 1.2, 0.3)
        second = VgParams(2.5, 0.4, 1.2, -1.0)
        joined = vg_convolve(first, second)
        product = vg_cf(first, t) * vg_cf(second, t)
        assert abs(product - vg_cf(joined, t)) <= 1e-12

    @given(st.floats(min_value=-10.0, max_value=10.0), st.floats(min_value=0.1, max_value=5.0))
    def test_closure_under_scaling(self, t, a):
        params = VgParams(2.2, -0.6, 0.9, 0.4)
        assert abs(vg_cf(params, a * t) - vg_cf(vg_scale(params, a), t)) <= 1e-12

    def test_closure_errors(self):
        with pytest.raises(DomainError):
            vg_convolve(VgParams(1.0, 0.1, 1.0), VgParams(1.0, 0.2, 1.0))
        with pytest.raises(DomainError):
            vg_scale(SKEWED, 0.0)

    def test_matches_empirical_cf_of_products(self):
        spec = BivariateGaussianSpec(1.0, 1.0, 0.0)
        samples = gaussian_product_sample(spec, make_stream(7), 200_000)
        law = gaussian_product_law(spec)
        for t in (0.5, 1.0, 2.0):
            empirical = np.mean(np.cos(t * samples))
            se = np.std(np.cos(t * samples)) / math.sqrt(samples.size)
            assert abs(empirical - vg_cf(law, t).real) <= 3 * se


class TestVgSample:

    def test_moments(self):
        params = VgParams(4.0, 0.5, 1.0, 2.0)
        draws = vg_sample(params, make_stream(11), 1_000_000)
        mean_se = math.sqrt(params.variance / draws.size)
        assert abs(draws.mean() - 4.0) <= 3 * mean_se
        # variância amostral: erro padrão estimado pelos quartos momentos
        centered = draws - draws.mean()
        var_se = np.std(centered ** 2) / math.sqrt(draws.size)
        assert abs(draws.var() - 6.0) <= 3 * var_se

    def test_symmetric_has_no_skew(self):
        draws = vg_sample(VgParams(3.0, 0.0, 1.0, 0.0), make_stream(12), 200_000)
        assert abs(stats.skew(draws)) <= 0.05

    def test_deterministic_given_stream(self):
        first = vg_sample(SKEWED, make_stream(5, 1), 100)
        second = vg_sample(SKEWED, make_stream(5, 1), 100)
        np.testing.assert_array_equal(first, second)

    def test_small_shape(self):
        draws = vg_sample(VgParams(1e-3, 0.0, 1.0, 0.0), make_stream(3), 1000)
        assert np.all(np.isfinite(draws))

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            vg_sample(SKEWED, make_stream(1), 0)

    def test_agrees_with_cdf(self):
        draws = np.sort(vg_sample(SKEWED, make_stream(21), 100_000))
        grid = np.quantile(draws, np.linspace(0.0005, 0.9995, 2000))
        cdf = vg_cdf(SKEWED, grid)
        empirical = np.searchsorted(draws, grid, side='right') / draws.size
        assert np.max(np.abs(empirical - cdf)) <= 1.36 / math.sqrt(draws.size) * 1.5


class TestVgCdf:

    def test_laplace_cdf(self):
        xs = np.array([-3.0, -1.0, 0.0, 0.5, 2.0])
        expected = np.where(xs < 0, 0.5 * np.exp(xs), 1.0 - 0.5 * np.exp(-xs))
        np.testing.assert_allclose(vg_cdf(LAPLACE, xs), expected, atol=1e-9)

    def test_singular_density(self):
        params = VgParams(1.0, 0.0, 1.0, 0.0)
        values = vg_cdf(params, [-1.0, 0.0, 1.0])
        assert values[1] == pytest.approx(0.5, abs=1e-8)
        assert values[0] == pytest.approx(1.0 - values[2], abs=1e-8)

    def test_rejects_unsorted(self):
        with pytest.raises(DomainError):
            vg_cdf(SKEWED, [1.0, 0.0])

    def test_long_sum_of_products(self):
        law = gaussian_product_sum_law(BivariateGaussianSpec(1.0, 1.0, 0.0), 500)
        values = vg_cdf(law, [-10.0, 0.0, 10.0])
        assert np.all(np.isfinite(values))
        assert values[1] == pytest.approx(0.5, abs=1e-5)
        assert values[0] + values[2] == pytest.approx(1.0, abs=1e-5)
        # variância 500, quase normal
        assert 0.66 < values[2] < 0.685


class TestGaussianProducts:

    def test_product_law(self):
        assert gaussian_product_law(BivariateGaussianSpec(1.0, 1.0, 0.0)) == VgParams(1.0, 0.0, 1.0, 0.0)
        law = gaussian_product_law(BivariateGaussianSpec(2.0, 3.0, 0.5))
        assert law.r == 1.0
        assert law.theta == pytest.approx(3.0)
        assert law.sigma == pytest.approx(3.0 * math.sqrt(3.0))
        assert law.mu == 0.0

    def test_sum_law_reduces_to_product_law(self):
        spec = BivariateGaussianSpec(1.3, 0.7, -0.2)
        assert gaussian_product_sum_law(spec, 1) == gaussian_product_law(spec)

    def test_sum_law_is_convolution(self):
        spec = BivariateGaussianSpec(1.0, 2.0, 0.3)
        single = gaussian_product_law(spec)
        total = single
        for _ in range(9):
            total = vg_convolve(total, single)
        assert total.r == pytest.approx(gaussian_product_sum_law(spec, 10).r)

    @pytest.mark.parametrize('rho, expected_mean', [(0.0, 0.0), (0.5, 5.0)])
    def test_sum_mean(self, rho, expected_mean):
        spec = BivariateGaussianSpec(1.0, 1.0, rho)
        law = gaussian_product_sum_law(spec, 10)
        assert law.mean == pytest.approx(expected_mean)
        draws = gaussian_product_sample(spec, make_stream(31), 100_000, n=10)
        se = draws.std() / math.sqrt(draws.size)
        assert abs(draws.mean() - expected_mean) <= 3 * se

    def test_product_ks(self):
        spec = BivariateGaussianSpec(2.0, 3.0, 0.5)
        draws = np.sort(gaussian_product_sample(spec, make_stream(41), 100_000))
        grid = np.quantile(draws, np.linspace(0.0005, 0.9995, 2000))
        cdf = vg_cdf(gaussian_product_law(spec), grid)
        empirical = np.searchsorted(draws, grid, side='right') / draws.size
        assert np.max(np.abs(empirical - cdf)) <= 0.01

    def test_invalid_spec(self):
        with pytest.raises(DomainError):
            BivariateGaussianSpec(1.0, 1.0, 1.0)
        with pytest.raises(DomainError):
            BivariateGaussianSpec(0.0, 1.0, 0.2)
        with pytest.raises(DomainError):
            gaussian_product_sum_law(BivariateGaussianSpec(1.0, 1.0, 0.2), 0)


class TestProductVector:

    def test_single_component(self):
        spec = ProductVectorSpec([0.4], [[1.0]], [1.5], 2.0)
        report = oracle.sigma_u_matrix(spec)
        np.testing.assert_allclose(report.matrix, [[1.0]])
        draws = product_vector_sample(spec, 5, make_stream(3), count=100_000)
        law = gaussian_product_sum_law(BivariateGaussianSpec(1.5, 2.0, 0.4), 5)
        se = draws[:, 0].std() / math.sqrt(draws.shape[0])
        assert abs(draws[:, 0].mean() - law.mean) <= 3 * se
        assert draws[:, 0].var() == pytest.approx(law.variance, rel=0.03)

    def test_independent_residuals(self):
        spec = ProductVectorSpec([0.3, 0.6], [[1.0, 0.18], [0.18, 1.0]], [1.0, 1.0], 1.0)
        report = oracle.sigma_u_matrix(spec)
        np.testing.assert_allclose(report.matrix, np.eye(2), atol=1e-15)
        assert report.is_psd

    def test_single_draw_shape(self):
        spec = ProductVectorSpec([0.3, 0.3], [[1.0, 0.5], [0.5, 1.0]], [1.0, 1.0], 1.0)
        assert product_vector_sample(spec, 50, make_stream(1)).shape == (2,)

    def test_cross_moment_matches_direct_simulation(self):
        spec = ProductVectorSpec([0.3, 0.3], [[1.0, 0.5], [0.5, 1.0]], [1.0, 1.0], 1.0)
        trials = 100_000
        represented = product_vector_sample(spec, 50, make_stream(51), count=trials)
        direct = oracle.product_vector_direct(spec, 50, make_stream(52), trials)
        a = represented[:, 0] * represented[:, 1]
        b = direct[:, 0] * direct[:, 1]
        se = math.sqrt(a.var() / trials + b.var() / trials)
        assert abs(a.mean() - b.mean()) <= 3 * se

    def test_not_psd_raises(self):
        spec = ProductVectorSpec([0.9, -0.9], [[1.0, 0.9], [0.9, 1.0]], [1.0, 1.0], 1.0)
        report = oracle.sigma_u_matrix(spec)
        assert not report.is_psd
        with pytest.raises(CovarianceError):
            product_vector_sample(spec, 10, make_stream(2))

    def test_invalid_spec(self):
        with pytest.raises(DomainError):
            ProductVectorSpec([0.3, 1.0], np.eye(2), [1.0, 1.0], 1.0)
        with pytest.raises(DomainError):
            ProductVectorSpec([0.3, 0.2], [[1.0, 0.4], [0.3, 1.0]], [1.0, 1.0], 1.0)
        with pytest.raises(DomainError):
            ProductVectorSpec([0.3, 0.2], [[2.0, 0.0], [0.0, 1.0]], [1.0, 1.0], 1.0)

"""Testes das constantes kappa (finitas, séries e limites)."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pyregnorm.core import oracle
from pyregnorm.core.errors import DomainError, TruncationWarning
from pyregnorm.core.kappa import (
    FINITE_P, LIMIT, KappaSet, kappa_closed_form, kappa_finite, kappa_from_series, kappa_limit,
    product_vector_spec, series_functions, theta_profile,
)
from pyregnorm.core.model import BetaSpec, ModelConfig
from pyregnorm.core.specfun import PI2_OVER_6

RHO_GRID = [-0.95, -0.6, 0.0, 0.3, 0.5, 0.7, 0.9]


def _explicit_configs():
    rng = np.random.default_rng(2024)
    for p in (1, 2, 8, 15):
        for rho in (-0.9, -0.5, 0.0, 0.3, 0.7):
            yield ModelConfig(1, p, rho, 1.0, BetaSpec.hyperbolic())
            yield ModelConfig(1, p, rho, 1.0, BetaSpec.explicit(rng.normal(size=p)))


class TestKappaFinite:

    def test_theta_profile(self, small_config):
        profile = theta_profile(small_config)
        np.testing.assert_allclose(profile.t, [1.5, 1.5])
        assert profile.sigma_z2 == pytest.approx(4.0)
        np.testing.assert_allclose(profile.theta, [0.75, 0.75])

    def test_hand_evaluated_example(self, small_config):
        ks = kappa_finite(small_config)
        assert (ks.kappa1, ks.kappa2, ks.kappa3) == pytest.approx((3.0, 4.5, 6.75), rel=1e-12)
        assert ks.mode == FINITE_P
        assert ks.p == 2

    def test_independent_design(self):
        beta = BetaSpec.explicit([1.0, -2.0, 0.5])
        ks = kappa_finite(ModelConfig(1, 3, 0.0, 1.0, beta))
        assert ks.kappa1 == ks.kappa2 == ks.kappa3 == pytest.approx(5.25)

    @pytest.mark.parametrize('config', list(_explicit_configs()),
                             ids=lambda c: f"p{c.p}-rho{c.rho}-{c.beta.kind}")
    def test_matches_literal_sums(self, config):
        ks = kappa_finite(config)
        assert ks.kappa1 == pytest.approx(oracle.kappa1_brute(config), rel=1e-12, abs=1e-12)
        assert ks.kappa2 == pytest.approx(oracle.kappa2_brute(config), rel=1e-12, abs=1e-12)
        assert ks.kappa3 == pytest.approx(oracle.kappa3_brute(config), rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize('rho', [-0.5, 0.7])
    def test_matches_quartic_sum_at_p40(self, rho):
        config = ModelConfig(1, 40, rho, 1.0, BetaSpec.hyperbolic())
        assert kappa_finite(config).kappa3 == pytest.approx(oracle.kappa3_brute(config), rel=1e-12)

    @pytest.mark.parametrize('rho', RHO_GRID)
    def test_nonnegative(self, rho):
        rng = np.random.default_rng(7)
        config = ModelConfig(1, 30, rho, 1.0, BetaSpec.explicit(rng.normal(size=30)))
        ks = kappa_finite(config)
        assert min(ks.kappa1, ks.kappa2, ks.kappa3) >= 0

    def test_kappa_set_validation(self):
        with pytest.raises(DomainError):
            KappaSet(1.0, 1.0, 1.0, 'other')
        with pytest.raises(DomainError):
            KappaSet(1.0, 1.0, 1.0, FINITE_P)


class TestSeriesFunctions:

    def test_hyperbolic_values_at_half(self):
        sf = series_functions(BetaSpec.hyperbolic(), 0.5)
        assert sf.b1 == pytest.approx(0.822467, abs=1e-6)
        assert sf.b2 == pytest.approx(0.106400, abs=1e-6)
        assert sf.beta_1 == PI2_OVER_6
        assert sf.truncation_error == 0.0

    @pytest.mark.parametrize('rho', [-0.9, -0.4, 0.0, 0.5, 0.8])
    def test_finite_beta_matches_double_sums(self, rho):
        values = np.random.default_rng(11).normal(size=30)
        sf = series_functions(BetaSpec.explicit(values), rho)
        brute = oracle.series_functions_brute(values, rho)
        assert sf.truncation_error == 0.0
        for name in brute._fields:
            assert getattr(sf, name) == pytest.approx(getattr(brute, name), rel=1e-10, abs=1e-12), name

    @pytest.mark.parametrize('rho', [-0.6, 0.3, 0.5])
    def test_geometric_terms_match_double_sums(self, rho):
        # termos com rho^(j+k) convergem depressa; 400 termos bastam
        sf = series_functions(BetaSpec.hyperbolic(), rho)
        brute = oracle.series_functions_brute([1.0 / j for j in range(1, 401)], rho)
        for name in ('beta_rho', 'beta_rho2', 'beta_d1_rho2', 'b2', 'b2_d1'):
            assert getattr(sf, name) == pytest.approx(getattr(brute, name), abs=1e-11), name

    def test_truncated_route_warns_and_agrees(self):
        with pytest.warns(TruncationWarning):
            sf = series_functions(BetaSpec.hyperbolic(), 0.5, truncation=100_000, closed_form=False)
        exact = series_functions(BetaSpec.hyperbolic(), 0.5)
        assert sf.truncation_error > 1e-10
        assert abs(sf.beta_1 - exact.beta_1) <= sf.truncation_error
        assert abs(sf.b1 - exact.b1) <= sf.truncation_error
        for name in ('b1', 'b2', 'b1_d1', 'b2_d1', 'b_d2', 'beta_rho'):
            assert getattr(sf, name) == pytest.approx(getattr(exact, name), abs=1e-4), name

    def test_short_explicit_beta_is_exact(self):
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            sf = series_functions(BetaSpec.explicit([1.0, 0.5]), 0.4)
        assert sf.truncation_error == 0.0

    @pytest.mark.parametrize('rho', [-0.7, -0.2, 0.2, 0.5, 0.8])
    def test_derivative_fields(self, rho):
        def b1(r):
            return series_functions(BetaSpec.hyperbolic(), r).b1

        def b2(r):
            return series_functions(BetaSpec.hyperbolic(), r).b2

        sf = series_functions(BetaSpec.hyperbolic(), rho)
        first = oracle.finite_difference(b1, rho)
        assert sf.b1_d1 == pytest.approx(rho * first, abs=1e-6)
        assert sf.b2_d1 == pytest.approx(rho * oracle.finite_difference(b2, rho), abs=1e-6)
        second = oracle.second_difference(b1, rho)
        assert sf.b_d2 == pytest.approx(rho * rho * second + rho * first, abs=1e-4)
        x = rho * rho
        assert sf.beta_d1_rho2 == pytest.approx(-math.log1p(-x), abs=1e-12)

    @pytest.mark.parametrize('rho', RHO_GRID)
    def test_absolute_bounds(self, rho):
        sf = series_functions(BetaSpec.hyperbolic(), rho)
        arho = abs(rho)
        assert abs(sf.b1) <= sf.beta_1 * (1 + arho) / (1 - arho)
        assert abs(sf.b2) <= sf.beta_1 * arho / (1 - arho) + 1e-15

    def test_rejects_bad_arguments(self):
        with pytest.raises(DomainError):
            series_functions(BetaSpec.hyperbolic(), 1.0)
        with pytest.raises(DomainError):
            series_functions(BetaSpec.hyperbolic(), 0.5, truncation=0)


class TestKappaLimit:

    def test_values_at_half(self):
        ks = kappa_limit(BetaSpec.hyperbolic(), 0.5)
        assert ks.kappa1 == pytest.approx(3.289868, abs=1e-6)
        assert ks.kappa2 == pytest.approx(7.615099, abs=1e-5)
        assert ks.mode == LIMIT

    @pytest.mark.parametrize('rho', RHO_GRID)
    def test_closed_forms_match_general_identities(self, rho):
        general = kappa_from_series(series_functions(BetaSpec.hyperbolic(), rho), rho)
        closed = kappa_closed_form(rho)
        for name in ('kappa1', 'kappa2', 'kappa3'):
            assert getattr(general, name) == pytest.approx(getattr(closed, name), rel=1e-9), name

    def test_independent_design(self):
        ks = kappa_limit(BetaSpec.hyperbolic(), 0.0)
        assert ks.kappa1 == ks.kappa2 == ks.kappa3 == pytest.approx(PI2_OVER_6, rel=1e-14)

    @given(st.floats(min_value=-0.95, max_value=0.95))
    @settings(max_examples=40)
    def test_single_coefficient(self, rho):
        ks = kappa_limit(BetaSpec.explicit([1.0]), rho)
        r = rho * rho
        assert ks.kappa1 == pytest.approx(1.0, abs=1e-12)
        assert ks.kappa2 == pytest.approx(1.0 / (1 - r), rel=1e-10)
        assert ks.kappa3 == pytest.approx((1 + r) / (1 - r) ** 2, rel=1e-10)

    @pytest.mark.parametrize('rho', [-0.5, 0.3, 0.8])
    def test_explicit_limit_equals_long_finite_sum(self, rho):
        values = np.random.default_rng(5).normal(size=12)
        beta = BetaSpec.explicit(values)
        limit = kappa_limit(beta, rho)
        # beta termina em 12; com p grande as somas finitas já são o limite
        finite = kappa_finite(ModelConfig(1, 200, rho, 1.0, beta))
        for name in ('kappa1', 'kappa2', 'kappa3'):
            assert getattr(limit, name) == pytest.approx(getattr(finite, name), rel=1e-9), name

    @pytest.mark.parametrize('rho', [0.3, 0.7])
    def test_convergence_rate(self, rho):
        limit = kappa_limit(BetaSpec.hyperbolic(), rho)
        gaps1, gaps2 = [], []
        for p in (400, 1600, 6400):
            finite = kappa_finite(ModelConfig(1, p, rho, 1.0, BetaSpec.hyperbolic()))
            gaps1.append(math.sqrt(p) * abs(finite.kappa1 - limit.kappa1))
            gaps2.append(math.sqrt(p) * abs(finite.kappa2 - limit.kappa2))
        for gaps in (gaps1, gaps2):
            assert gaps[1] < gaps[0] and gaps[2] < gaps[1]
            assert gaps[1] / gaps[0] <= 0.6
            assert gaps[2] / gaps[1] <= 0.6
        if rho == 0.3:
            assert gaps1[-1] < 0.05

    @pytest.mark.parametrize('rho', RHO_GRID)
    def test_kappa2_is_sublinear(self, rho):
        small = kappa_finite(ModelConfig(1, 1000, rho, 1.0, BetaSpec.hyperbolic()))
        large = kappa_finite(ModelConfig(1, 10_000, rho, 1.0, BetaSpec.hyperbolic()))
        assert large.kappa2 / 10_000 < small.kappa2 / 1000


class TestProductVectorSpec:

    def test_psd_for_kms_design(self):
        config = ModelConfig(1, 8, 0.7, 1.0, BetaSpec.hyperbolic())
        spec = product_vector_spec(config)
        report = oracle.sigma_u_matrix(spec)
        assert report.is_psd
        assert spec.p == 8
        assert spec.sigma2 == pytest.approx(math.sqrt(kappa_finite(config).kappa1 + 1.0))
        assert np.all(np.abs(spec.rho_cross) < 1)

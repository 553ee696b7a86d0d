"""Testes da lei limite: centralização e variância."""

import math
import warnings

import pytest

from pyregnorm.core.errors import DomainError, HypothesisWarning
from pyregnorm.core.kappa import LIMIT, KappaSet, kappa_finite, kappa_limit
from pyregnorm.core.limitlaw import (
    CenteringMode, centering, default_centering_mode, independent_centering, independent_s2,
    limit_law, statistic_mean, variance_s2,
)
from pyregnorm.core.model import BetaSpec, ModelConfig
from pyregnorm.core.specfun import PI2_OVER_6


class TestVariance:

    def test_independent_design_value(self):
        law = limit_law(ModelConfig(500, 500, 0.0, 4.0, BetaSpec.hyperbolic()))
        assert law.s2 == pytest.approx(249.7109, abs=1e-4)
        assert law.s2 == pytest.approx(independent_s2(PI2_OVER_6, 1.0, 4.0), rel=1e-12)

    @pytest.mark.parametrize('c', [0.1, 0.5, 1.0, 10.0])
    @pytest.mark.parametrize('sigma_eps2', [0.25, 1.0, 4.0])
    def test_independent_closed_form_agrees(self, c, sigma_eps2):
        ks = kappa_limit(BetaSpec.hyperbolic(), 0.0)
        parts = variance_s2(ks, c, sigma_eps2, 0.0)
        assert parts.s2 == pytest.approx(independent_s2(PI2_OVER_6, c, sigma_eps2), rel=1e-12)

    @pytest.mark.parametrize('rho', [-0.95, -0.6, 0.0, 0.3, 0.5, 0.7, 0.9])
    @pytest.mark.parametrize('c', [0.5, 1.0, 10.0])
    @pytest.mark.parametrize('sigma_eps2', [1.0, 4.0])
    def test_decomposition(self, rho, c, sigma_eps2):
        parts = variance_s2(kappa_limit(BetaSpec.hyperbolic(), rho), c, sigma_eps2, rho)
        assert parts.s2 > 0
        assert parts.s1_sq + parts.s2_sq == pytest.approx(parts.s2, rel=1e-9)

    def test_rejects_nonpositive_variance(self):
        bogus = KappaSet(-10.0, 1.0, 100.0, LIMIT)
        with pytest.raises(DomainError):
            variance_s2(bogus, 1.0, 1.0, 0.0)

    @pytest.mark.parametrize('args', [(0.0, 1.0, 0.5), (1.0, 0.0, 0.5), (1.0, 1.0, 1.0)])
    def test_rejects_invalid_parameters(self, args):
        c, sigma_eps2, rho = args
        with pytest.raises(DomainError):
            variance_s2(kappa_limit(BetaSpec.hyperbolic(), 0.5), c, sigma_eps2, rho)


class TestCentering:

    def test_finite_example(self, small_config):
        assert centering(small_config, 'finite') == pytest.approx(34.0)

    def test_limit_example(self):
        config = ModelConfig(500, 500, 0.0, 4.0, BetaSpec.hyperbolic())
        value = centering(config, CenteringMode.LIMIT)
        assert value == pytest.approx(1.8224670e6, rel=1e-7)
        assert value == pytest.approx(independent_centering(PI2_OVER_6, 1.0, 4.0, 500), rel=1e-12)

    def test_pure_noise(self):
        config = ModelConfig(30, 70, 0.6, 2.0, BetaSpec.explicit([0.0]))
        assert centering(config, 'finite') == pytest.approx(70 * 30 * 2.0)

    def test_limit_mode_warns_for_explicit_beta(self, small_config):
        with pytest.warns(HypothesisWarning):
            centering(small_config, 'limit')

    def test_hyperbolic_limit_mode_is_silent(self):
        config = ModelConfig(100, 100, 0.5, 1.0, BetaSpec.hyperbolic())
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            centering(config, 'limit')

    def test_unknown_mode(self, small_config):
        with pytest.raises(ValueError):
            centering(small_config, 'median')

    def test_default_modes(self):
        assert default_centering_mode(BetaSpec.hyperbolic()) is CenteringMode.LIMIT
        assert default_centering_mode(BetaSpec.explicit([1.0])) is CenteringMode.FINITE

    def test_modes_converge(self):
        gaps = []
        for n in (250, 1000, 4000):
            config = ModelConfig(n, n, 0.5, 1.0, BetaSpec.hyperbolic())
            gap = abs(centering(config, 'finite') - centering(config, 'limit'))
            gaps.append(gap / n ** 1.5)
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 0.5 * gaps[0]

    def test_exact_mean_offset(self, small_config):
        ks = kappa_finite(small_config)
        offset = statistic_mean(small_config) - centering(small_config, 'finite')
        assert offset == pytest.approx(small_config.n * ks.kappa2)


class TestLimitLaw:

    def test_fields(self):
        config = ModelConfig(160, 1600, 0.9, 4.0, BetaSpec.hyperbolic())
        law = limit_law(config)
        assert law.centering_mode is CenteringMode.LIMIT
        assert law.scale == pytest.approx(160 ** 1.5)
        assert law.c == 10.0
        assert law.s == pytest.approx(math.sqrt(law.s2))
        assert law.kappas.mode == LIMIT

    def test_explicit_beta_defaults_to_finite(self, small_config):
        with warnings.catch_warnings():
            warnings.simplefilter('error')
            law = limit_law(small_config)
        assert law.centering_mode is CenteringMode.FINITE
        assert law.centering == pytest.approx(34.0)

    def test_to_dict(self):
        law = limit_law(ModelConfig(50, 50, 0.3, 1.0, BetaSpec.hyperbolic()), 'finite')
        data = law.to_dict()
        assert data['centering_mode'] == 'finite'
        assert set(data['kappas']) == {'kappa1', 'kappa2', 'kappa3', 'mode', 'p'}
        assert data['s2'] == law.s2

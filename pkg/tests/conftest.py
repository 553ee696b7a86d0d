"""Configuração compartilhada dos testes."""

import numpy as np
import pytest

from pyregnorm.core.model import BetaSpec, ModelConfig


@pytest.fixture(autouse=True)
def isolated_config_dir(tmp_path_factory, monkeypatch):
    """Cada teste usa um diretório de configuração próprio."""
    config_dir = tmp_path_factory.mktemp("cfg") / "pyregnorm-config"
    monkeypatch.setenv("PYREGNORM_CONFIG_DIR", str(config_dir))
    monkeypatch.delenv("PYREGNORM_THREADS", raising=False)
    return config_dir


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def hyperbolic():
    return BetaSpec.hyperbolic()


@pytest.fixture
def small_config():
    return ModelConfig(2, 2, 0.5, 1.0, BetaSpec.explicit([1.0, 1.0]))

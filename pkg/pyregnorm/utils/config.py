"""
Módulo de configuração para o PyRegNorm.
Contém os valores padrão dos estudos e funções para persistir preferências.
"""

import json
import logging
import os
from typing import Any, Dict, Optional

from pyregnorm import __version__

logger = logging.getLogger(__name__)

CONFIG_DIR_ENV = "PYREGNORM_CONFIG_DIR"
THREADS_ENV = "PYREGNORM_THREADS"

# Configurações padrão
DEFAULT_CONFIG = {
    "reps": 1000,
    "sigma2": 4.0,
    "beta": "hyperbolic",
    "seed": 42,
    "threads": None,
    "rows_per_block": 64,
    "cdf_grid_points": 512,
    "histogram_bins": 40,
    "series_truncation": 1_000_000,
    "max_p_quartic": 40,
    "max_dense_np": 200,
    "mc_trials": 100_000,
}


def get_config_dir() -> str:
    """
    Retorna o diretório de configuração (variável PYREGNORM_CONFIG_DIR ou ~/.pyregnorm).
    """
    override = os.environ.get(CONFIG_DIR_ENV)
    if override:
        return override
    return os.path.join(os.path.expanduser("~"), ".pyregnorm")


def get_config_file() -> str:
    return os.path.join(get_config_dir(), "config.json")


def ensure_config_dir() -> None:
    """
    Garante que o diretório de configuração existe.
    """
    os.makedirs(get_config_dir(), exist_ok=True)


def load_config() -> Dict[str, Any]:
    """
    Carrega as configurações do arquivo.

    Returns:
        Dicionário com as configurações (chaves ausentes completadas com os padrões)
    """
    config_file = get_config_file()

    # Se o arquivo de configuração não existir, criar com valores padrão
    if not os.path.exists(config_file):
        save_config(DEFAULT_CONFIG)
        return DEFAULT_CONFIG.copy()

    try:
        with open(config_file, 'r', encoding='utf-8') as f:
            config = json.load(f)
        if not isinstance(config, dict):
            raise ValueError("conteúdo não é um objeto JSON")
    except (OSError, ValueError) as e:
        logger.warning("Erro ao carregar configurações: %s", e)
        return DEFAULT_CONFIG.copy()

    for key, value in DEFAULT_CONFIG.items():
        config.setdefault(key, value)
    return config


def save_config(config: Dict[str, Any]) -> None:
    """
    Salva as configurações no arquivo.

    Args:
        config: Dicionário com configurações
    """
    try:
        ensure_config_dir()
        with open(get_config_file(), 'w', encoding='utf-8') as f:
            json.dump(config, f, indent=4)
    except OSError as e:
        logger.warning("Erro ao salvar configurações: %s", e)


def resolve_threads(flag: Optional[int], config: Optional[Dict[str, Any]] = None) -> int:
    """
    Resolve o número de threads: flag > PYREGNORM_THREADS > configuração > núcleos.

    Args:
        flag: Valor de --threads (ou None)
        config: Configuração carregada

    Returns:
        Número de threads (>= 1)
    """
    if flag is not None:
        return max(1, int(flag))

    env_value = os.environ.get(THREADS_ENV)
    if env_value:
        try:
            return max(1, int(env_value))
        except ValueError:
            logger.warning("Valor inválido em %s: %r", THREADS_ENV, env_value)

    configured = (config or {}).get("threads")
    if configured:
        return max(1, int(configured))
    return os.cpu_count() or 1


def get_app_version() -> str:
    """
    Retorna a versão atual do aplicativo.

    Returns:
        String com versão do aplicativo
    """
    return __version__

"""
Módulo de saída - envelope JSON dos comandos e arquivos CSV dos gráficos.
"""

import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from pyregnorm.core.sim import CdfGrid, Histogram

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"


@dataclass
class OutputEnvelope:
    """
    Envelope comum a todos os comandos.

    Attributes:
        command: Nome do comando
        config_echo: Configuração resolvida (suficiente para repetir a execução)
        results: Conteúdo específico do comando
        seed: Semente mestre (0 quando não há sorteio)
        timing: Tempo de execução em segundos
    """
    command: str
    config_echo: Dict[str, Any]
    results: Dict[str, Any]
    seed: int = 0
    timing: float = 0.0
    schema_version: str = field(default=SCHEMA_VERSION)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': self.schema_version,
            'command': self.command,
            'config_echo': self.config_echo,
            'results': self.results,
            'seed': self.seed,
            'timing': self.timing,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default, allow_nan=True)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Objeto não serializável em JSON: {type(value).__name__}")


def write_envelope(envelope: OutputEnvelope, path: Optional[str] = None) -> None:
    """
    Escreve o envelope em `path` ou na saída padrão.

    Args:
        envelope: Envelope a serializar
        path: Arquivo de destino (None para stdout)
    """
    text = envelope.to_json()
    if path is None:
        sys.stdout.write(text + "\n")
        return
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text + "\n")
    logger.info("Resultado salvo em %s", path)


def write_cdf_csv(path: str, grid: CdfGrid) -> None:
    """Grade da CDF: colunas x, empirical_cdf, limit_cdf."""
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['x', 'empirical_cdf', 'limit_cdf'])
        for row in zip(grid.x, grid.empirical_cdf, grid.limit_cdf):
            writer.writerow([repr(float(v)) for v in row])
    logger.info("CDF salva em %s", path)


def write_pdf_csv(path: str, histogram: Histogram) -> None:
    """Histograma: colunas bin_center, empirical_density, limit_density."""
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(['bin_center', 'empirical_density', 'limit_density'])
        rows = zip(histogram.bin_centers, histogram.empirical_density, histogram.limit_density)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    logger.info("Histograma salvo em %s", path)

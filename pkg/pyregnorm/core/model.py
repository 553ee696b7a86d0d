"""
Módulo model - Processo gerador dos dados Y = X beta + eps

Sequências beta, covariância KMS, amostragem gaussiana exata em O(p) por
linha pela recursão AR(1) e geração em fluxo de (X, Y).
"""

import csv
import logging
import math
import os
from dataclasses import dataclass
from typing import Any, Dict, Iterator, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, signal, special

from pyregnorm.core.errors import BudgetExceededError, DomainError

logger = logging.getLogger(__name__)

HYPERBOLIC = 'hyperbolic'
EXPLICIT = 'explicit'

DEFAULT_BLOCK_ROWS = 64
DEFAULT_DENSE_CAP = 4_000_000


@dataclass(frozen=True)
class BetaSpec:
    """
    Sequência de coeficientes beta.

    Attributes:
        kind: 'hyperbolic' (beta_j = 1/j) ou 'explicit'
        values: Coeficientes explícitos (apenas para kind='explicit')
        source: Origem dos valores explícitos (ex.: caminho do CSV)
    """
    kind: str
    values: Tuple[float, ...] = ()
    source: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in (HYPERBOLIC, EXPLICIT):
            raise DomainError(f"Tipo de beta desconhecido: {self.kind}")
        if self.kind == EXPLICIT:
            values = tuple(float(v) for v in self.values)
            if not values:
                raise DomainError("Beta explícito precisa de ao menos um valor")
            if not all(math.isfinite(v) for v in values):
                raise DomainError("Beta explícito contém valores não finitos")
            object.__setattr__(self, 'values', values)

    @classmethod
    def hyperbolic(cls) -> 'BetaSpec':
        """beta_j = 1/j, j >= 1."""
        return cls(HYPERBOLIC)

    @classmethod
    def explicit(cls, values: Sequence[float], source: Optional[str] = None) -> 'BetaSpec':
        return cls(EXPLICIT, tuple(values), source)

    @classmethod
    def from_csv(cls, path: str) -> 'BetaSpec':
        """
        Carrega beta explícito de um CSV de uma coluna.

        O cabeçalho é opcional; linhas vazias são ignoradas.

        Args:
            path: Caminho do arquivo

        Returns:
            BetaSpec explícito

        Raises:
            DomainError: Se o arquivo não puder ser lido ou tiver valores inválidos
        """
        values = []
        try:
            with open(path, 'r', encoding='utf-8', newline='') as f:
                for line_no, row in enumerate(csv.reader(f), start=1):
                    if not row or not row[0].strip():
                        continue
                    try:
                        values.append(float(row[0]))
                    except ValueError:
                        if line_no == 1 and not values:
                            continue  # cabeçalho
                        raise DomainError(f"Valor inválido na linha {line_no} de {path}: {row[0]!r}")
        except OSError as e:
            raise DomainError(f"Erro ao ler arquivo de beta: {str(e)}") from e

        logger.debug("Beta explícito com %d valores carregado de %s", len(values), path)
        return cls.explicit(values, source=os.path.abspath(path))

    @property
    def is_hyperbolic(self) -> bool:
        return self.kind == HYPERBOLIC

    def values_for(self, p: int) -> np.ndarray:
        """
        Primeiros p coeficientes (completados com zeros para explícitos curtos).
        """
        if p < 1:
            raise DomainError(f"p deve ser >= 1: {p}")
        if self.is_hyperbolic:
            return 1.0 / np.arange(1, p + 1, dtype=float)
        out = np.zeros(p)
        m = min(p, len(self.values))
        out[:m] = self.values[:m]
        return out

    def to_dict(self) -> Dict[str, Any]:
        if self.is_hyperbolic:
            return {'kind': HYPERBOLIC}
        return {'kind': EXPLICIT, 'source': self.source, 'values': list(self.values)}


@dataclass(frozen=True)
class ModelConfig:
    """
    Configuração completa do processo gerador.

    Attributes:
        n: Número de observações
        p: Número de preditores
        rho: Parâmetro KMS, |rho| < 1
        sigma_eps2: Variância do erro
        beta: Sequência de coeficientes
    """
    n: int
    p: int
    rho: float
    sigma_eps2: float
    beta: BetaSpec

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n deve ser inteiro >= 1: {self.n}")
        if int(self.p) != self.p or self.p < 1:
            raise DomainError(f"p deve ser inteiro >= 1: {self.p}")
        if not abs(self.rho) < 1:
            raise DomainError(f"Parâmetro KMS deve satisfazer |rho| < 1: {self.rho}")
        if not self.sigma_eps2 > 0:
            raise DomainError(f"Variância do erro deve ser > 0: {self.sigma_eps2}")
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'p', int(self.p))
        object.__setattr__(self, 'rho', float(self.rho))
        object.__setattr__(self, 'sigma_eps2', float(self.sigma_eps2))

    @classmethod
    def from_aspect(cls, n: int, c: float, rho: float, sigma_eps2: float,
                    beta: BetaSpec) -> 'ModelConfig':
        """Constrói a configuração com p = round(c*n)."""
        if not c > 0:
            raise DomainError(f"Razão c deve ser > 0: {c}")
        p = max(1, int(round(c * n)))
        return cls(n, p, rho, sigma_eps2, beta)

    @property
    def c(self) -> float:
        """Razão de aspecto realizada p/n."""
        return self.p / self.n

    def beta_values(self) -> np.ndarray:
        return self.beta.values_for(self.p)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'p': self.p,
            'c': self.c,
            'rho': self.rho,
            'sigma_eps2': self.sigma_eps2,
            'beta': self.beta.to_dict(),
        }


class Dataset(NamedTuple):
    """Par denso (X, Y) para instâncias pequenas."""
    x: np.ndarray
    y: np.ndarray


def kms_entry(rho: float, i: int, j: int) -> float:
    """
    Entrada (i, j) da matriz KMS: rho^|i-j| (identidade quando rho = 0).
    """
    if not abs(rho) < 1:
        raise DomainError(f"Parâmetro KMS deve satisfazer |rho| < 1: {rho}")
    if i == j:
        return 1.0
    if rho == 0:
        return 0.0
    return rho ** abs(i - j)


def kms_matrix(rho: float, p: int) -> np.ndarray:
    """Matriz KMS densa p x p."""
    if not abs(rho) < 1:
        raise DomainError(f"Parâmetro KMS deve satisfazer |rho| < 1: {rho}")
    return linalg.toeplitz(np.power(rho, np.arange(p, dtype=float)))


def kms_trace_sq(rho: float, p: int) -> float:
    """
    tr(Sigma^2) exato para a matriz KMS.

    tr = p + 2 r (p(1-r) - 1 + r^p) / (1-r)^2, com r = rho^2. Quando
    p(1-r) <= 1 o numerador cancela e a soma p + 2 sum_d (p-d) r^d é
    usada diretamente.
    """
    if not abs(rho) < 1:
        raise DomainError(f"Parâmetro KMS deve satisfazer |rho| < 1: {rho}")
    if p < 1:
        raise DomainError(f"p deve ser >= 1: {p}")
    r = rho * rho
    if r == 0:
        return float(p)
    q = (1.0 - abs(rho)) * (1.0 + abs(rho))
    if p * q <= 1.0:
        lags = np.arange(1, p, dtype=float)
        return p + 2.0 * math.fsum((p - lags) * np.power(r, lags))
    r_p = math.exp(p * math.log1p(-q))
    return p + 2.0 * r * (p * q - 1.0 + r_p) / (q * q)


def beta_tail_sq(beta: BetaSpec, p: int) -> float:
    """
    Cauda sum_{j>p} beta_j^2.

    Para beta hiperbólico usa a trigama: sum_{j>p} j^-2 = psi'(p+1).
    """
    if p < 1:
        raise DomainError(f"p deve ser >= 1: {p}")
    if beta.is_hyperbolic:
        return float(special.polygamma(1, p + 1))
    tail = np.asarray(beta.values[p:], dtype=float)
    return float(np.sum(tail * tail)) if tail.size else 0.0


def _ar1_rows(z: np.ndarray, rho: float) -> np.ndarray:
    """Aplica x_1 = z_1, x_j = rho x_{j-1} + sqrt(1-rho^2) z_j linha a linha."""
    innov = z.copy()
    innov[:, 1:] *= math.sqrt(1.0 - rho * rho)
    return signal.lfilter([1.0], [1.0, -rho], innov, axis=1)


def iter_row_blocks(config: ModelConfig, rng_stream: np.random.Generator,
                    block_rows: int = DEFAULT_BLOCK_ROWS) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """
    Gera (X, y) em blocos de linhas, sem materializar a matriz n x p.

    Por bloco de b linhas o fluxo fornece primeiro b*p normais padrão (o
    desenho) e depois b normais (os erros).

    Args:
        config: Configuração do modelo
        rng_stream: Fluxo aleatório exclusivo
        block_rows: Linhas por bloco

    Yields:
        Tuplas (X_bloco de forma (b, p), y_bloco de forma (b,))
    """
    if block_rows < 1:
        raise DomainError(f"block_rows deve ser >= 1: {block_rows}")
    beta = config.beta_values()
    sigma_eps = math.sqrt(config.sigma_eps2)

    remaining = config.n
    while remaining > 0:
        b = min(block_rows, remaining)
        z = rng_stream.standard_normal((b, config.p))
        eps = rng_stream.standard_normal(b)
        x = _ar1_rows(z, config.rho)
        yield x, x @ beta + sigma_eps * eps
        remaining -= b


def sample_row(config: ModelConfig, rng_stream: np.random.Generator) -> Tuple[np.ndarray, float]:
    """
    Sorteia uma linha (x, y) com x ~ N_p(0, Sigma_KMS) em O(p).
    """
    z = rng_stream.standard_normal((1, config.p))
    eps = rng_stream.standard_normal(1)
    x = _ar1_rows(z, config.rho)[0]
    y = float(x @ config.beta_values() + math.sqrt(config.sigma_eps2) * eps[0])
    return x, y


def dense_dataset(config: ModelConfig, rng_stream: np.random.Generator,
                  block_rows: int = DEFAULT_BLOCK_ROWS,
                  cap: int = DEFAULT_DENSE_CAP) -> Dataset:
    """
    Materializa (X, Y) denso quando n*p <= cap.

    Raises:
        BudgetExceededError: Se n*p exceder o limite
    """
    if config.n * config.p > cap:
        raise BudgetExceededError(
            f"Dataset denso com {config.n * config.p} entradas excede o limite {cap}"
        )
    blocks = list(iter_row_blocks(config, rng_stream, block_rows))
    return Dataset(np.vstack([b[0] for b in blocks]), np.concatenate([b[1] for b in blocks]))

"""
Módulo limitlaw - Lei normal limite de ||X'Y||^2

Centralização (constantes finitas ou limites), escala n^(3/2) e
variância s^2 = s_1^2 + s_2^2.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, NamedTuple, Optional, Union

from pyregnorm.core.errors import DomainError, HypothesisWarning, IdentityMismatchError
from pyregnorm.core.kappa import KappaSet, kappa_finite, kappa_limit
from pyregnorm.core.model import BetaSpec, ModelConfig, beta_tail_sq

logger = logging.getLogger(__name__)

DECOMPOSITION_TOLERANCE = 1e-9


class CenteringMode(str, Enum):
    """Constantes finitas (kappa_i,p) ou limites (kappa_i)."""
    FINITE = 'finite'
    LIMIT = 'limit'


ModeLike = Union[CenteringMode, str]


class VarianceParts(NamedTuple):
    s2: float
    s1_sq: float
    s2_sq: float


@dataclass(frozen=True)
class LimitLaw:
    """
    Parâmetros da lei limite do estatístico normalizado.

    Attributes:
        centering: Valor subtraído de ||X'Y||^2
        scale: n^(3/2)
        s2: Variância limite s^2
        s1_sq: Componente s_1^2
        s2_sq: Componente s_2^2
        c: Razão p/n realizada
        centering_mode: Modo de centralização
        kappas: Constantes limite usadas na variância
    """
    centering: float
    scale: float
    s2: float
    s1_sq: float
    s2_sq: float
    c: float
    centering_mode: CenteringMode
    kappas: KappaSet

    @property
    def s(self) -> float:
        return math.sqrt(self.s2)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'centering': self.centering,
            'scale': self.scale,
            's2': self.s2,
            's1_sq': self.s1_sq,
            's2_sq': self.s2_sq,
            'c': self.c,
            'centering_mode': self.centering_mode.value,
            'kappas': self.kappas.to_dict(),
        }


def default_centering_mode(beta: BetaSpec) -> CenteringMode:
    """Limite para beta hiperbólico, finito caso contrário."""
    return CenteringMode.LIMIT if beta.is_hyperbolic else CenteringMode.FINITE


def variance_s2(kappas: KappaSet, c: float, sigma_eps2: float, rho: float) -> VarianceParts:
    """
    Variância limite s^2 e sua decomposição s_1^2 + s_2^2.

    Args:
        kappas: Constantes limite
        c: Razão de aspecto p/n
        sigma_eps2: Variância do erro
        rho: Parâmetro KMS

    Returns:
        VarianceParts(s2, s1_sq, s2_sq)

    Raises:
        DomainError: Para parâmetros inválidos ou s^2 <= 0
        IdentityMismatchError: Se s_1^2 + s_2^2 divergir de s^2
    """
    if not c > 0:
        raise DomainError(f"Razão c deve ser > 0: {c}")
    if not abs(rho) < 1:
        raise DomainError(f"Parâmetro KMS deve satisfazer |rho| < 1: {rho}")
    if not sigma_eps2 > 0:
        raise DomainError(f"Variância do erro deve ser > 0: {sigma_eps2}")

    k1, k2, k3 = kappas.kappa1, kappas.kappa2, kappas.kappa3
    sz2 = k1 + sigma_eps2
    kms_ratio = (1.0 + rho * rho) / (1.0 - rho * rho)

    s2 = 4.0 * k2 ** 2 + 4.0 * sz2 * (2.0 * k2 * c + k3) + 2.0 * c * sz2 ** 2 * (c + kms_ratio)
    s1_sq = 8.0 * k2 ** 2 + 8.0 * c * sz2 * k2 + 2.0 * c * c * sz2 ** 2
    s2_sq = 2.0 * c * kms_ratio * sz2 ** 2 + 4.0 * sz2 * k3 - 4.0 * k2 ** 2

    if not s2 > 0:
        raise DomainError(f"Variância limite não positiva ({s2}): constantes kappa inconsistentes")
    if abs(s1_sq + s2_sq - s2) > DECOMPOSITION_TOLERANCE * max(1.0, s2):
        raise IdentityMismatchError(
            f"Erro ao decompor s^2: {s1_sq} + {s2_sq} != {s2}"
        )
    return VarianceParts(s2, s1_sq, s2_sq)


def _check_tail_hypotheses(config: ModelConfig) -> None:
    if config.beta.is_hyperbolic:
        # |beta_j| j = 1 e cauda ~ 1/p
        logger.debug(
            "Hipóteses de cauda certificadas para beta hiperbólico (p * cauda = %.4f)",
            config.p * beta_tail_sq(config.beta, config.p),
        )
        return
    warnings.warn(
        "Centralização limite com beta explícito: as hipóteses de cauda não podem "
        "ser certificadas a partir de um vetor finito",
        HypothesisWarning,
        stacklevel=3,
    )


def centering(config: ModelConfig, mode: ModeLike,
              kappas: Optional[KappaSet] = None) -> float:
    """
    Centralização de ||X'Y||^2.

    Args:
        config: Configuração do modelo
        mode: 'finite' (kappa_i,p) ou 'limit' (kappa_i, c = p/n)
        kappas: Constantes já calculadas no modo correspondente (opcional)

    Returns:
        Valor da centralização

    Warns:
        HypothesisWarning: Modo limite com beta explícito
    """
    mode = CenteringMode(mode)
    n, p = config.n, config.p
    if mode is CenteringMode.FINITE:
        ks = kappas if kappas is not None else kappa_finite(config)
        return n * n * ks.kappa2 + p * n * (ks.kappa1 + config.sigma_eps2)

    _check_tail_hypotheses(config)
    ks = kappas if kappas is not None else kappa_limit(config.beta, config.rho)
    return n * n * (ks.kappa2 + config.c * (ks.kappa1 + config.sigma_eps2))


def limit_law(config: ModelConfig, mode: Optional[ModeLike] = None) -> LimitLaw:
    """
    Monta a lei limite (centralização, escala e variância) da configuração.

    Args:
        config: Configuração do modelo
        mode: Modo de centralização; padrão depende de beta

    Returns:
        LimitLaw
    """
    mode = default_centering_mode(config.beta) if mode is None else CenteringMode(mode)
    limits = kappa_limit(config.beta, config.rho)
    center = centering(config, mode, limits if mode is CenteringMode.LIMIT else None)
    parts = variance_s2(limits, config.c, config.sigma_eps2, config.rho)

    logger.debug("Lei limite: centralização=%.6g, s2=%.6g (%s)", center, parts.s2, mode.value)
    return LimitLaw(
        centering=center,
        scale=config.n ** 1.5,
        s2=parts.s2,
        s1_sq=parts.s1_sq,
        s2_sq=parts.s2_sq,
        c=config.c,
        centering_mode=mode,
        kappas=limits,
    )


def statistic_mean(config: ModelConfig) -> float:
    """
    Média exata E||X'Y||^2 = n^2 kappa_2,p + pn(kappa_1,p + sigma^2) + n kappa_2,p.
    """
    ks = kappa_finite(config)
    n, p = config.n, config.p
    return n * n * ks.kappa2 + p * n * (ks.kappa1 + config.sigma_eps2) + n * ks.kappa2


def independent_s2(beta1: float, c: float, sigma_eps2: float) -> float:
    """s^2 no caso rho = 0, em que kappa_i = beta(1)."""
    return (
        2.0 * beta1 ** 2 * (4.0 + 5.0 * c + c * c)
        + 4.0 * beta1 * sigma_eps2 * (1.0 + 3.0 * c + c * c)
        + 2.0 * sigma_eps2 ** 2 * (c + c * c)
    )


def independent_centering(beta1: float, c: float, sigma_eps2: float, n: int) -> float:
    """Centralização limite no caso rho = 0."""
    return n * n * (beta1 + c * (beta1 + sigma_eps2))

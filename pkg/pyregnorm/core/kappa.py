"""
Módulo kappa - Constantes kappa_1, kappa_2 e kappa_3

Valores para p finito em O(p) por recursões geométricas, a família de
séries beta(x), b_1, b_2 (e derivadas) e as identidades que levam aos
limites, com as formas fechadas para beta_j = 1/j.
"""

import logging
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy import signal

from pyregnorm.core.errors import DomainError, IdentityMismatchError, TruncationWarning
from pyregnorm.core.model import BetaSpec, ModelConfig, beta_tail_sq, kms_matrix
from pyregnorm.core.specfun import PI2_OVER_6, dilog
from pyregnorm.core.vg import ProductVectorSpec

logger = logging.getLogger(__name__)

FINITE_P = 'finite_p'
LIMIT = 'limit'

DEFAULT_SERIES_TRUNCATION = 1_000_000
TRUNCATION_TOLERANCE = 1e-10
IDENTITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class KappaSet:
    """
    Trio (kappa_1, kappa_2, kappa_3).

    Attributes:
        kappa1: Forma quadrática beta' Sigma beta
        kappa2: beta' Sigma^2 beta
        kappa3: beta' Sigma^3 beta
        mode: 'finite_p' ou 'limit'
        p: Dimensão (apenas em modo finite_p)
    """
    kappa1: float
    kappa2: float
    kappa3: float
    mode: str
    p: Optional[int] = None

    def __post_init__(self) -> None:
        if self.mode not in (FINITE_P, LIMIT):
            raise DomainError(f"Modo de kappa desconhecido: {self.mode}")
        if self.mode == FINITE_P and self.p is None:
            raise DomainError("KappaSet finito requer p")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class ThetaProfile:
    """
    Perfil t_k = sum_l beta_l rho^|k-l| e a variância sigma_Z^2 = kappa_1,p + sigma_eps^2.
    """
    t: np.ndarray
    sigma_z2: float

    @property
    def sigma_z(self) -> float:
        return math.sqrt(self.sigma_z2)

    @property
    def theta(self) -> np.ndarray:
        """theta_k^(p) = t_k / sigma_Z."""
        return self.t / self.sigma_z


@dataclass(frozen=True)
class SeriesFunctions:
    """
    Os nove valores da família de séries avaliados em rho.

    Attributes:
        beta_1: beta(1) = sum beta_j^2
        beta_rho: beta(rho)
        beta_rho2: beta(rho^2)
        beta_d1_rho2: beta^(1)(rho^2) = sum j beta_j^2 rho^(2j)
        b1: b_1(rho) = sum_{k<j} beta_j beta_k rho^(j-k)
        b2: b_2(rho) = sum_{k<j} beta_j beta_k rho^(j+k)
        b1_d1: rho b_1'(rho)
        b2_d1: rho b_2'(rho)
        b_d2: rho^2 b_1''(rho) + b_1^(1)(rho)
        truncation_error: Estimativa do erro de truncamento (0 quando exato)
    """
    beta_1: float
    beta_rho: float
    beta_rho2: float
    beta_d1_rho2: float
    b1: float
    b2: float
    b1_d1: float
    b2_d1: float
    b_d2: float
    truncation_error: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _check_rho(rho: float) -> None:
    if not abs(rho) < 1:
        raise DomainError(f"Parâmetro KMS deve satisfazer |rho| < 1: {rho}")


def _geometric_forward(values: np.ndarray, rho: float) -> np.ndarray:
    """F_k = sum_{l<=k} values_l rho^(k-l)."""
    return signal.lfilter([1.0], [1.0, -rho], values)


def _kms_apply(values: np.ndarray, rho: float) -> np.ndarray:
    """Produto Sigma_KMS @ values em O(p)."""
    forward = _geometric_forward(values, rho)
    backward = _geometric_forward(values[::-1], rho)[::-1]
    return forward + backward - values


def _kappas_from_values(beta: np.ndarray, rho: float):
    t = _kms_apply(beta, rho)
    kappa1 = math.fsum(beta * t)
    kappa2 = math.fsum(t * t)
    kappa3 = math.fsum(t * _kms_apply(t, rho))
    return t, kappa1, kappa2, kappa3


def theta_profile(config: ModelConfig) -> ThetaProfile:
    """
    Calcula o perfil t e sigma_Z^2 da configuração.

    Args:
        config: Configuração do modelo

    Returns:
        ThetaProfile com t (não normalizado) e sigma_Z^2
    """
    beta = config.beta_values()
    t = _kms_apply(beta, config.rho)
    kappa1 = math.fsum(beta * t)
    return ThetaProfile(t, kappa1 + config.sigma_eps2)


def kappa_finite(config: ModelConfig) -> KappaSet:
    """
    kappa_1,p, kappa_2,p e kappa_3,p exatos em O(p).

    Args:
        config: Configuração do modelo

    Returns:
        KappaSet em modo finite_p
    """
    _, k1, k2, k3 = _kappas_from_values(config.beta_values(), config.rho)
    # formas quadráticas em matriz PSD; resíduos negativos vêm de arredondamento
    return KappaSet(max(k1, 0.0), max(k2, 0.0), max(k3, 0.0), FINITE_P, config.p)


def _hyperbolic_series(rho: float) -> SeriesFunctions:
    log1m = math.log1p(-rho)
    return SeriesFunctions(
        beta_1=PI2_OVER_6,
        beta_rho=dilog(rho),
        beta_rho2=dilog(rho * rho),
        beta_d1_rho2=-math.log1p(-rho * rho),
        b1=0.5 * log1m ** 2 + dilog(rho),
        b2=0.5 * (log1m ** 2 - dilog(rho * rho)),
        b1_d1=-log1m / (1.0 - rho),
        b2_d1=math.log1p(-rho * rho) - rho * log1m / (1.0 - rho),
        b_d2=(rho - rho * log1m) / (1.0 - rho) ** 2,
    )


def _truncated_series(beta: np.ndarray, rho: float, truncation_error: float) -> SeriesFunctions:
    j = np.arange(1, beta.size + 1, dtype=float)
    sq = beta * beta

    below = signal.lfilter([0.0, rho], [1.0, -rho], beta)
    lag1 = _geometric_forward(below, rho)
    lag2 = _geometric_forward(2.0 * lag1 - below, rho)

    g = beta * np.power(rho, j)
    g_prev = np.cumsum(g) - g
    h = j * g
    h_prev = np.cumsum(h) - h

    return SeriesFunctions(
        beta_1=math.fsum(sq),
        beta_rho=math.fsum(sq * np.power(rho, j)),
        beta_rho2=math.fsum(sq * np.power(rho * rho, j)),
        beta_d1_rho2=math.fsum(j * sq * np.power(rho * rho, j)),
        b1=math.fsum(beta * below),
        b2=math.fsum(g * g_prev),
        b1_d1=math.fsum(beta * lag1),
        b2_d1=math.fsum(g * (j * g_prev + h_prev)),
        b_d2=math.fsum(beta * lag2),
        truncation_error=truncation_error,
    )


def _truncation_estimate(head: np.ndarray, tail_sq: float, rho: float) -> float:
    if tail_sq <= 0:
        return 0.0
    head_sq = float(np.sum(head * head))
    arho = abs(rho)
    return (tail_sq + math.sqrt(tail_sq * head_sq)) * (1.0 + arho) / (1.0 - arho) ** 3


def series_functions(beta: BetaSpec, rho: float,
                     truncation: int = DEFAULT_SERIES_TRUNCATION,
                     closed_form: bool = True) -> SeriesFunctions:
    """
    Avalia beta(1), beta(rho), beta(rho^2), beta^(1)(rho^2), b_1, b_2 e derivadas.

    Para beta hiperbólico usa as formas fechadas com dilogaritmo (a menos
    que closed_form=False, quando a série truncada é usada como conferência).

    Args:
        beta: Sequência de coeficientes
        rho: Parâmetro KMS
        truncation: Número máximo de termos das séries
        closed_form: Usa formas fechadas quando disponíveis

    Returns:
        SeriesFunctions

    Warns:
        TruncationWarning: Se o erro estimado de truncamento passar de 1e-10
    """
    _check_rho(rho)
    if truncation < 1:
        raise DomainError(f"Truncamento deve ser >= 1: {truncation}")

    if beta.is_hyperbolic and closed_form:
        return _hyperbolic_series(rho)

    if beta.is_hyperbolic:
        terms = truncation
    else:
        terms = min(truncation, len(beta.values))
    head = beta.values_for(terms)
    estimate = _truncation_estimate(head, beta_tail_sq(beta, terms), rho)

    if estimate > TRUNCATION_TOLERANCE:
        warnings.warn(
            f"Séries truncadas em {terms} termos: erro estimado {estimate:.3e}",
            TruncationWarning,
            stacklevel=2,
        )
    logger.debug("Séries avaliadas com %d termos (erro estimado %.3e)", terms, estimate)
    return _truncated_series(head, rho, estimate)


def kappa_from_series(sf: SeriesFunctions, rho: float) -> KappaSet:
    """
    Limites kappa_1, kappa_2, kappa_3 a partir das nove funções de série.
    """
    _check_rho(rho)
    r = rho * rho
    one_m = 1.0 - r

    kappa1 = sf.beta_1 + 2.0 * sf.b1
    kappa2 = (
        sf.beta_1 * (1.0 + r) / one_m
        - sf.beta_rho2 / one_m
        + 2.0 * (sf.b1_d1 + sf.b1 * (1.0 + r) / one_m - sf.b2 / one_m)
    )
    kappa3 = (
        ((1.0 + 4.0 * r + r * r) * (sf.beta_1 + 2.0 * sf.b1)
         - (1.0 + 3.0 * r) * (sf.beta_rho2 + 2.0 * sf.b2)) / one_m ** 2
        + (3.0 * sf.b1_d1 * (1.0 + r) - 2.0 * (sf.b2_d1 + sf.beta_d1_rho2)) / one_m
        + sf.b_d2
    )
    return KappaSet(kappa1, kappa2, kappa3, LIMIT)


def kappa_closed_form(rho: float) -> KappaSet:
    """
    Limites simplificados para beta_j = 1/j.

    Args:
        rho: Parâmetro KMS

    Returns:
        KappaSet em modo limit
    """
    _check_rho(rho)
    log1m = math.log1p(-rho)
    r = rho * rho
    one_m = 1.0 - r

    kappa1 = PI2_OVER_6 + log1m ** 2 + 2.0 * dilog(rho)
    kappa2 = ((1.0 + r) * kappa1 - log1m ** 2 - 2.0 * (1.0 + rho) * log1m) / one_m
    kappa3 = (
        kappa2 * (1.0 + 3.0 * r) / one_m
        + ((-1.0 + rho + 2.0 * r) * (1.0 + rho) * log1m
           + rho * (1.0 + rho) ** 2 - 2.0 * r * r * kappa1) / one_m ** 2
    )
    return KappaSet(kappa1, kappa2, kappa3, LIMIT)


def _assert_close(name: str, lhs: float, rhs: float, tolerance: float) -> None:
    if abs(lhs - rhs) > tolerance * max(1.0, abs(rhs)):
        raise IdentityMismatchError(
            f"Erro ao conferir {name}: {lhs!r} != {rhs!r} (diferença {abs(lhs - rhs):.3e})"
        )


def kappa_limit(beta: BetaSpec, rho: float,
                truncation: int = DEFAULT_SERIES_TRUNCATION) -> KappaSet:
    """
    Limites de kappa_1,p, kappa_2,p e kappa_3,p quando p cresce.

    Para beta hiperbólico avalia as duas rotas (identidades gerais e formas
    simplificadas) e exige concordância relativa de 1e-9.

    Args:
        beta: Sequência de coeficientes
        rho: Parâmetro KMS
        truncation: Termos das séries para beta explícito

    Returns:
        KappaSet em modo limit

    Raises:
        IdentityMismatchError: Se as duas rotas discordarem
    """
    general = kappa_from_series(series_functions(beta, rho, truncation), rho)
    if not beta.is_hyperbolic:
        return general

    closed = kappa_closed_form(rho)
    _assert_close('kappa1', general.kappa1, closed.kappa1, IDENTITY_TOLERANCE)
    _assert_close('kappa2', general.kappa2, closed.kappa2, IDENTITY_TOLERANCE)
    _assert_close('kappa3', general.kappa3, closed.kappa3, IDENTITY_TOLERANCE)
    return closed


def product_vector_spec(config: ModelConfig) -> ProductVectorSpec:
    """
    Vetor de produtos que descreve X'Y: rho^(kl) = rho^|k-l|, rho^(k) = theta_k^(p),
    sigma_1^(k) = 1 e sigma_2 = sigma_Z. Monta matrizes densas; use p pequeno.
    """
    profile = theta_profile(config)
    return ProductVectorSpec(
        rho_cross=profile.theta,
        rho_within=kms_matrix(config.rho, config.p),
        sigma1=np.ones(config.p),
        sigma2=profile.sigma_z,
    )

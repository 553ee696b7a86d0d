"""
Módulo vg - Distribuição variance-gamma

Densidade, função característica, amostrador exato, propriedades de
fechamento e as representações de produtos de gaussianas correlacionadas.
Objetos de distribuição são imutáveis; a amostragem exige um fluxo
aleatório passado explicitamente (um por thread).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import special

from pyregnorm.core.errors import CovarianceError, DomainError, SingularityError
from pyregnorm.core.specfun import QuadratureSpec, integrate, log_bessel_k

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# autovalores de Sigma_U em [-EIG_CLIP, 0) são truncados para zero
EIG_CLIP = 1e-10

CDF_QUADRATURE = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-10, max_subdivisions=400)


@dataclass(frozen=True)
class VgParams:
    """
    Parâmetros (r, theta, sigma, mu) da distribuição variance-gamma.

    Attributes:
        r: Forma, r > 0
        theta: Assimetria
        sigma: Escala, sigma > 0
        mu: Locação
    """
    r: float
    theta: float
    sigma: float
    mu: float = 0.0

    def __post_init__(self) -> None:
        values = (self.r, self.theta, self.sigma, self.mu)
        if not all(math.isfinite(v) for v in values):
            raise DomainError(f"Parâmetros VG não finitos: {values}")
        if self.r <= 0:
            raise DomainError(f"Parâmetro de forma r deve ser > 0: {self.r}")
        if self.sigma <= 0:
            raise DomainError(f"Parâmetro de escala sigma deve ser > 0: {self.sigma}")

    @property
    def mean(self) -> float:
        """E Q = mu + r*theta."""
        return self.mu + self.r * self.theta

    @property
    def variance(self) -> float:
        """Var Q = r*sigma^2 + 2*r*theta^2."""
        return self.r * self.sigma ** 2 + 2.0 * self.r * self.theta ** 2


@dataclass(frozen=True)
class BivariateGaussianSpec:
    """Par gaussiano centrado com desvios sigma1, sigma2 e correlação rho."""
    sigma1: float
    sigma2: float
    rho: float

    def __post_init__(self) -> None:
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise DomainError(f"Desvios devem ser positivos: {self.sigma1}, {self.sigma2}")
        if not abs(self.rho) < 1:
            raise DomainError(f"Correlação deve satisfazer |rho| < 1: {self.rho}")

    def covariance(self) -> np.ndarray:
        off = self.rho * self.sigma1 * self.sigma2
        return np.array([[self.sigma1 ** 2, off], [off, self.sigma2 ** 2]])


@dataclass(frozen=True, eq=False)
class ProductVectorSpec:
    """
    Especificação do vetor de somas de produtos (xi_1^(k) xi_2), k = 1..p.

    Attributes:
        rho_cross: Correlações rho^(k) = Corr(xi_1^(k), xi_2)
        rho_within: Matriz de correlações rho^(kl) = Corr(xi_1^(k), xi_1^(l))
        sigma1: Desvios sigma_1^(k)
        sigma2: Desvio de xi_2
    """
    rho_cross: np.ndarray
    rho_within: np.ndarray
    sigma1: np.ndarray
    sigma2: float
    p: int = field(init=False)

    def __post_init__(self) -> None:
        rho_cross = np.atleast_1d(np.asarray(self.rho_cross, dtype=float))
        rho_within = np.atleast_2d(np.asarray(self.rho_within, dtype=float))
        sigma1 = np.atleast_1d(np.asarray(self.sigma1, dtype=float))
        p = rho_cross.size

        if p < 1:
            raise DomainError("Vetor de correlações cruzadas vazio")
        if rho_within.shape != (p, p) or sigma1.shape != (p,):
            raise DomainError(
                f"Dimensões incompatíveis: rho_cross {p}, rho_within {rho_within.shape}, "
                f"sigma1 {sigma1.shape}"
            )
        if np.any(np.abs(rho_cross) >= 1):
            raise DomainError("Correlações cruzadas devem satisfazer |rho^(k)| < 1")
        if not np.allclose(rho_within, rho_within.T, atol=1e-12):
            raise DomainError("Matriz rho^(kl) deve ser simétrica")
        if not np.allclose(np.diag(rho_within), 1.0, atol=1e-12):
            raise DomainError("Matriz rho^(kl) deve ter diagonal unitária")
        if np.linalg.eigvalsh(rho_within).min() < -EIG_CLIP:
            raise DomainError("Matriz rho^(kl) não é positiva semidefinida")
        if np.any(sigma1 <= 0) or not self.sigma2 > 0:
            raise DomainError("Desvios sigma1, sigma2 devem ser positivos")

        object.__setattr__(self, 'rho_cross', rho_cross)
        object.__setattr__(self, 'rho_within', rho_within)
        object.__setattr__(self, 'sigma1', sigma1)
        object.__setattr__(self, 'p', p)


def vg_pdf(params: VgParams, x: ArrayLike) -> Union[float, np.ndarray]:
    """
    Densidade variance-gamma.

    Args:
        params: Parâmetros da distribuição
        x: Ponto(s) de avaliação

    Returns:
        Valor(es) da densidade, não negativos

    Raises:
        SingularityError: Se x == mu e r <= 1 (densidade diverge)
    """
    r, theta, sigma, mu = params.r, params.theta, params.sigma, params.mu
    x_arr = np.asarray(x, dtype=float)
    dist = np.abs(x_arr - mu)
    at_center = dist == 0

    if r <= 1 and np.any(at_center):
        raise SingularityError(f"Densidade VG com r={r} diverge em x = mu = {mu}")

    nu = (r - 1.0) / 2.0
    root = math.sqrt(theta ** 2 + sigma ** 2)
    alpha = root / sigma ** 2
    log_norm = -math.log(sigma) - 0.5 * math.log(math.pi) - special.gammaln(r / 2.0)

    safe = np.where(at_center, 1.0, dist)
    log_body = nu * np.log(safe / (2.0 * root)) + log_bessel_k(abs(nu), alpha * safe)
    if r > 1:
        # limite de pequeno argumento K_nu(z) ~ Gamma(nu)/2 (z/2)^(-nu)
        log_center = special.gammaln(nu) - math.log(2.0) + nu * math.log(sigma ** 2 / root ** 2)
        log_body = np.where(at_center, log_center, log_body)

    values = np.exp(log_norm + theta * (x_arr - mu) / sigma ** 2 + log_body)
    if values.ndim == 0:
        return float(values)
    return values


def vg_cdf(params: VgParams, x_sorted: ArrayLike,
           spec: QuadratureSpec = CDF_QUADRATURE) -> np.ndarray:
    """
    Função de distribuição em abscissas ordenadas.

    A CDF é acumulada por quadraturas encadeadas entre abscissas
    consecutivas, com quebra em mu onde a densidade pode ser singular.

    Args:
        params: Parâmetros da distribuição
        x_sorted: Abscissas em ordem crescente
        spec: Tolerâncias de cada quadratura

    Returns:
        Vetor F(x_i), truncado em [0, 1]
    """
    xs = np.atleast_1d(np.asarray(x_sorted, dtype=float))
    if xs.size == 0:
        return xs.copy()
    if np.any(np.diff(xs) < 0):
        raise DomainError("Abscissas da CDF devem estar ordenadas")

    mu = params.mu

    def density(u: float) -> float:
        return vg_pdf(params, u)

    def piece(lo: float, hi: float) -> float:
        if lo < mu < hi:
            return integrate(density, lo, mu, spec) + integrate(density, mu, hi, spec)
        return integrate(density, lo, hi, spec)

    # F(x_0) pela cauda infinita até min(x_0, mu)
    start = xs[0]
    if start <= mu:
        total = integrate(density, -np.inf, start, spec)
    else:
        total = integrate(density, -np.inf, mu, spec) + integrate(density, mu, start, spec)

    out = np.empty_like(xs)
    out[0] = total
    for i in range(1, xs.size):
        total += piece(xs[i - 1], xs[i])
        out[i] = total
    return np.clip(out, 0.0, 1.0)


def vg_cf(params: VgParams, t: ArrayLike) -> Union[complex, np.ndarray]:
    """
    Função característica e^{i mu t} / (1 + sigma^2 t^2 - 2 i theta t)^{r/2}.

    Args:
        params: Parâmetros da distribuição
        t: Argumento(s) reais

    Returns:
        Valor(es) complexos
    """
    t_arr = np.asarray(t, dtype=float)
    base = 1.0 + params.sigma ** 2 * t_arr ** 2 - 2j * params.theta * t_arr
    values = np.exp(1j * params.mu * t_arr) / base ** (params.r / 2.0)
    if values.ndim == 0:
        return complex(values)
    return values


def vg_sample(params: VgParams, rng_stream: np.random.Generator, count: int) -> np.ndarray:
    """
    Amostras i.i.d. de mu + theta*W + sigma*sqrt(W)*U, W ~ Gamma(r/2, 1/2).

    Args:
        params: Parâmetros da distribuição
        rng_stream: Fluxo aleatório exclusivo do chamador
        count: Número de amostras (>= 1)

    Returns:
        Vetor de `count` amostras
    """
    if count < 1:
        raise DomainError(f"Número de amostras deve ser >= 1: {count}")
    w = rng_stream.gamma(shape=params.r / 2.0, scale=2.0, size=count)
    u = rng_stream.standard_normal(count)
    return params.mu + params.theta * w + params.sigma * np.sqrt(w) * u


def vg_convolve(first: VgParams, second: VgParams) -> VgParams:
    """Lei da soma de VG independentes com theta e sigma comuns."""
    if not (math.isclose(first.theta, second.theta, rel_tol=1e-12, abs_tol=1e-15)
            and math.isclose(first.sigma, second.sigma, rel_tol=1e-12)):
        raise DomainError("Soma fechada exige theta e sigma iguais")
    return VgParams(first.r + second.r, first.theta, first.sigma, first.mu + second.mu)


def vg_scale(params: VgParams, a: float) -> VgParams:
    """Lei de a*Q para a > 0."""
    if not a > 0:
        raise DomainError(f"Fator de escala deve ser positivo: {a}")
    return VgParams(params.r, a * params.theta, a * params.sigma, a * params.mu)


def gaussian_product_law(spec: BivariateGaussianSpec) -> VgParams:
    """
    Lei do produto xi_1*xi_2 de um par gaussiano correlacionado.

    Returns:
        VG(1, rho*s1*s2, sqrt(1-rho^2)*s1*s2, 0)
    """
    return gaussian_product_sum_law(spec, 1)


def gaussian_product_sum_law(spec: BivariateGaussianSpec, n: int) -> VgParams:
    """
    Lei de sum_{j<=n} xi_1j*xi_2j para pares i.i.d.

    Returns:
        VG(n, rho*s1*s2, sqrt(1-rho^2)*s1*s2, 0)
    """
    if n < 1:
        raise DomainError(f"Número de parcelas deve ser >= 1: {n}")
    scale = spec.sigma1 * spec.sigma2
    return VgParams(float(n), spec.rho * scale, math.sqrt(1.0 - spec.rho ** 2) * scale, 0.0)


def gaussian_product_sample(spec: BivariateGaussianSpec, rng_stream: np.random.Generator,
                            count: int, n: int = 1) -> np.ndarray:
    """
    Simula diretamente sum_{j<=n} xi_1j*xi_2j a partir de pares gaussianos.

    Args:
        spec: Par gaussiano
        rng_stream: Fluxo aleatório
        count: Número de réplicas
        n: Parcelas por réplica

    Returns:
        Vetor de `count` somas de produtos
    """
    if count < 1 or n < 1:
        raise DomainError(f"count e n devem ser >= 1: {count}, {n}")
    z1 = rng_stream.standard_normal((count, n))
    z2 = rng_stream.standard_normal((count, n))
    xi1 = spec.sigma1 * z1
    xi2 = spec.sigma2 * (spec.rho * z1 + math.sqrt(1.0 - spec.rho ** 2) * z2)
    return np.sum(xi1 * xi2, axis=1)


def _sigma_u(spec: ProductVectorSpec) -> np.ndarray:
    rho_k = spec.rho_cross
    resid = np.sqrt(1.0 - rho_k ** 2)
    return (spec.rho_within - np.outer(rho_k, rho_k)) / np.outer(resid, resid)


def _symmetric_factor(matrix: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(matrix)
    smallest = float(eigvals.min())
    if smallest < -EIG_CLIP:
        raise CovarianceError(
            f"Sigma_U não é positiva semidefinida (menor autovalor {smallest:.3e})"
        )
    eigvals = np.clip(eigvals, 0.0, None)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.T


def product_vector_sample(spec: ProductVectorSpec, n: int, rng_stream: np.random.Generator,
                          count: Optional[int] = None) -> np.ndarray:
    """
    Sorteia o vetor (sum_j xi_1j^(k) xi_2j)_k pela representação com W_n comum.

    Cada componente é sigma1^(k)*sigma2*(rho^(k) W_n + sqrt(1-rho^(k)^2) sqrt(W_n) U_k),
    com W_n ~ Gamma(n/2, 1/2) e U ~ N(0, Sigma_U).

    Args:
        spec: Especificação do vetor
        n: Número de parcelas
        rng_stream: Fluxo aleatório
        count: Se dado, devolve `count` sorteios com uma só fatoração

    Returns:
        Vetor (p,) ou matriz (count, p)

    Raises:
        CovarianceError: Se Sigma_U tiver autovalor abaixo de -1e-10
    """
    if n < 1:
        raise DomainError(f"Número de parcelas deve ser >= 1: {n}")
    draws = 1 if count is None else int(count)
    if draws < 1:
        raise DomainError(f"count deve ser >= 1: {count}")

    factor = _symmetric_factor(_sigma_u(spec))
    w = rng_stream.gamma(shape=n / 2.0, scale=2.0, size=draws)
    z = rng_stream.standard_normal((draws, spec.p))
    u = z @ factor.T

    rho_k = spec.rho_cross
    inner = rho_k * w[:, None] + np.sqrt(1.0 - rho_k ** 2) * np.sqrt(w)[:, None] * u
    values = spec.sigma1 * spec.sigma2 * inner
    return values[0] if count is None else values

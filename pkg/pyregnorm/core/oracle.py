"""
Módulo oracle - Implementações de força bruta para conferência

Somas literais, quadraturas de mistura, estatístico denso e derivadas
numéricas. Nenhuma função aqui reaproveita o caminho de produção que
confere; as somas usam apenas aritmética elementar.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from pyregnorm.core.errors import BudgetExceededError, DomainError
from pyregnorm.core.model import DEFAULT_BLOCK_ROWS, ModelConfig
from pyregnorm.core.specfun import DEFAULT_QUADRATURE, PI2_OVER_6, QuadratureSpec, integrate
from pyregnorm.core.vg import ProductVectorSpec, VgParams

logger = logging.getLogger(__name__)

# e^-41.45 ~ 1e-18
BESSEL_CUTOFF = 41.45
PSD_TOLERANCE = 1e-10
MIXTURE_QUADRATURE = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-9, max_subdivisions=400)


@dataclass(frozen=True)
class OracleBudget:
    """
    Limites de custo dos oráculos.

    Attributes:
        max_p_quartic: Maior p aceito nas somas O(p^4)
        max_dense_np: Maior p das somas O(p^2); o estatístico denso aceita
            n*p <= max_dense_np^2
        mc_trials: Maior número de ensaios de simulação direta
    """
    max_p_quartic: int = 40
    max_dense_np: int = 200
    mc_trials: int = 100_000

    def __post_init__(self) -> None:
        if min(self.max_p_quartic, self.max_dense_np, self.mc_trials) < 1:
            raise DomainError("Limites do oráculo devem ser positivos")


DEFAULT_BUDGET = OracleBudget()


def _power_table(rho: float, size: int):
    table = [1.0]
    for _ in range(1, size):
        table.append(table[-1] * rho)
    return table


def _beta_list(config: ModelConfig):
    return [float(v) for v in config.beta_values()]


def kappa1_brute(config: ModelConfig, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """kappa_1,p = sum_{k,l} beta_k beta_l rho^|k-l| por laço duplo."""
    p = config.p
    if p > budget.max_dense_np:
        raise BudgetExceededError(f"p={p} excede o limite do oráculo ({budget.max_dense_np})")
    beta = _beta_list(config)
    pw = _power_table(config.rho, p)
    total = 0.0
    for k in range(p):
        for l in range(p):
            total += beta[k] * beta[l] * pw[abs(k - l)]
    return total


def kappa2_brute(config: ModelConfig, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """kappa_2,p = sum_{k,l,j} beta_l beta_j rho^|k-l| rho^|k-j| por laço triplo."""
    p = config.p
    if p > budget.max_dense_np:
        raise BudgetExceededError(f"p={p} excede o limite do oráculo ({budget.max_dense_np})")
    beta = _beta_list(config)
    pw = _power_table(config.rho, p)
    total = 0.0
    for k in range(p):
        for l in range(p):
            for j in range(p):
                total += beta[l] * beta[j] * pw[abs(k - l)] * pw[abs(k - j)]
    return total


def kappa3_brute(config: ModelConfig, budget: OracleBudget = DEFAULT_BUDGET) -> float:
    """
    kappa_3,p pela soma quádrupla literal.

    kappa_3,p = sum_{k,l,j,j'} beta_j beta_j' rho^|j-k| rho^|k-l| rho^|l-j'|

    Raises:
        BudgetExceededError: Se p > max_p_quartic
    """
    p = config.p
    if p > budget.max_p_quartic:
        raise BudgetExceededError(f"p={p} excede o limite O(p^4) ({budget.max_p_quartic})")
    beta = _beta_list(config)
    pw = _power_table(config.rho, p)
    total = 0.0
    for k in range(p):
        for l in range(p):
            middle = pw[abs(k - l)]
            for j in range(p):
                left = beta[j] * pw[abs(j - k)] * middle
                for jj in range(p):
                    total += left * beta[jj] * pw[abs(l - jj)]
    return total


def kms_trace_sq_brute(rho: float, p: int) -> float:
    """tr(Sigma^2) = sum_{i,j} rho^(2|i-j|) por laço duplo."""
    pw = _power_table(rho * rho, p)
    return math.fsum(pw[abs(i - j)] for i in range(p) for j in range(p))


def min_kms_eigenvalue(rho: float, p: int) -> float:
    """Menor autovalor da matriz KMS montada entrada a entrada."""
    matrix = np.empty((p, p))
    for i in range(p):
        for j in range(p):
            matrix[i, j] = 1.0 if i == j else rho ** abs(i - j)
    return float(np.linalg.eigvalsh(matrix)[0])


def _dilog_power_series(x: float) -> float:
    terms = []
    power = x
    for k in range(1, 400):
        term = power / (k * k)
        terms.append(term)
        if abs(term) < 1e-20:
            break
        power *= x
    return math.fsum(terms)


def dilog_series(x: float) -> float:
    """
    Li2(x) pela série de potências, com reflexão e Landen para |x| > 1/2.

    Args:
        x: Argumento real, x <= 1

    Returns:
        Li2(x)
    """
    if math.isnan(x) or x > 1.0:
        raise DomainError(f"Dilogaritmo real definido apenas para x <= 1: {x}")
    if x == 1.0:
        return PI2_OVER_6
    if abs(x) <= 0.5:
        return _dilog_power_series(x)
    if x > 0.5:
        # reflexão de Euler
        return PI2_OVER_6 - math.log(x) * math.log1p(-x) - dilog_series(1.0 - x)
    # Landen: x/(x-1) cai em (0, 1)
    return -dilog_series(x / (x - 1.0)) - 0.5 * math.log1p(-x) ** 2


def bessel_k_integral(nu: float, x: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """
    K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, com o limite superior
    truncado onde x cosh t - nu t passa de 41.45.
    """
    if nu < 0 or not x > 0:
        raise DomainError(f"Argumentos inválidos para K_nu(x): nu={nu}, x={x}")

    upper = 1.0
    while x * math.sinh(upper) <= nu or x * math.cosh(upper) - nu * upper <= BESSEL_CUTOFF:
        upper *= 1.5

    def integrand(t: float) -> float:
        base = -x * math.cosh(t)
        return 0.5 * (math.exp(base + nu * t) + math.exp(base - nu * t))

    peak = math.asinh(nu / x) if nu > 0 else 0.0
    return integrate(integrand, 0.0, upper, spec, points=[peak])


def vg_pdf_quadrature(params: VgParams, x: float,
                      spec: QuadratureSpec = MIXTURE_QUADRATURE) -> float:
    """
    Densidade VG pela mistura gaussiana sobre W ~ Gamma(r/2, escala 2).

    Args:
        params: Parâmetros VG
        x: Ponto de avaliação

    Returns:
        int_0^inf phi((x-mu-theta w)/(sigma sqrt w))/(sigma sqrt w) gamma(w) dw
    """
    half_r = 0.5 * params.r
    log_norm_gamma = -math.lgamma(half_r) - half_r * math.log(2.0)
    log_sqrt_2pi = 0.5 * math.log(2.0 * math.pi)
    shift = x - params.mu

    def integrand(w: float) -> float:
        if w <= 0:
            return 0.0
        scale = params.sigma * math.sqrt(w)
        z = (shift - params.theta * w) / scale
        log_val = (-0.5 * z * z - log_sqrt_2pi - math.log(scale)
                   + log_norm_gamma + (half_r - 1.0) * math.log(w) - 0.5 * w)
        return math.exp(log_val)

    split = max(params.r, 1.0)
    return integrate(integrand, 0.0, split, spec) + integrate(integrand, split, math.inf, spec)


def dense_statistic(config: ModelConfig, rng_stream: np.random.Generator,
                    budget: OracleBudget = DEFAULT_BUDGET,
                    block_rows: int = DEFAULT_BLOCK_ROWS) -> float:
    """
    ||X'Y||^2 por produto matricial denso, com X = Z L' e L triangular explícita.

    Consome o fluxo na mesma ordem da geração em blocos.

    Raises:
        BudgetExceededError: Se n*p exceder max_dense_np^2
    """
    n, p, rho = config.n, config.p, config.rho
    if n * p > budget.max_dense_np ** 2:
        raise BudgetExceededError(
            f"Estatístico denso limitado a n*p <= {budget.max_dense_np ** 2}: n={n}, p={p}"
        )
    innovation = math.sqrt(1.0 - rho * rho)
    lower = np.zeros((p, p))
    for j in range(p):
        for k in range(j + 1):
            lower[j, k] = rho ** (j - k) * (1.0 if k == 0 else innovation)

    x_blocks, eps_blocks = [], []
    remaining = n
    while remaining > 0:
        b = min(block_rows, remaining)
        x_blocks.append(rng_stream.standard_normal((b, p)) @ lower.T)
        eps_blocks.append(rng_stream.standard_normal(b))
        remaining -= b

    x = np.vstack(x_blocks)
    y = x @ config.beta_values() + math.sqrt(config.sigma_eps2) * np.concatenate(eps_blocks)
    h = x.T @ y
    return float(h @ h)


class SigmaUReport(NamedTuple):
    matrix: np.ndarray
    min_eigenvalue: float
    is_psd: bool


def sigma_u_matrix(spec: ProductVectorSpec) -> SigmaUReport:
    """
    Matriz Sigma_U entrada a entrada e seu menor autovalor.

    sigma_U^(k,l) = (rho^(kl) - rho^(k) rho^(l)) / sqrt((1 - rho^(k)^2)(1 - rho^(l)^2))
    """
    p = spec.p
    matrix = np.empty((p, p))
    for k in range(p):
        rk = float(spec.rho_cross[k])
        for l in range(p):
            rl = float(spec.rho_cross[l])
            numerator = float(spec.rho_within[k, l]) - rk * rl
            matrix[k, l] = numerator / math.sqrt((1.0 - rk * rk) * (1.0 - rl * rl))
    smallest = float(np.linalg.eigvalsh(matrix)[0])
    return SigmaUReport(matrix, smallest, smallest >= -PSD_TOLERANCE)


def product_vector_direct(spec: ProductVectorSpec, n: int, rng_stream: np.random.Generator,
                          count: int, budget: OracleBudget = DEFAULT_BUDGET) -> np.ndarray:
    """
    Simula (sum_j xi_1j^(k) xi_2j)_k diretamente da normal conjunta (xi_1, xi_2).

    Returns:
        Matriz (count, p)
    """
    if count > budget.mc_trials:
        raise BudgetExceededError(f"count={count} excede o limite de ensaios ({budget.mc_trials})")
    p = spec.p
    cov = np.empty((p + 1, p + 1))
    cov[:p, :p] = spec.rho_within * np.outer(spec.sigma1, spec.sigma1)
    cov[:p, p] = cov[p, :p] = spec.rho_cross * spec.sigma1 * spec.sigma2
    cov[p, p] = spec.sigma2 ** 2
    draws = rng_stream.multivariate_normal(np.zeros(p + 1), cov, size=(count, n))
    return np.sum(draws[:, :, :p] * draws[:, :, p:], axis=1)


class SeriesBrute(NamedTuple):
    beta_1: float
    beta_rho: float
    beta_rho2: float
    beta_d1_rho2: float
    b1: float
    b2: float
    b1_d1: float
    b2_d1: float
    b_d2: float


def series_functions_brute(beta: Sequence[float], rho: float) -> SeriesBrute:
    """Somas duplas literais da família de séries para um beta finito (índices a partir de 1)."""
    values = [float(v) for v in beta]
    m = len(values)
    single = [0.0] * 4
    double = [0.0] * 5
    for j in range(1, m + 1):
        bj = values[j - 1]
        single[0] += bj * bj
        single[1] += bj * bj * rho ** j
        single[2] += bj * bj * rho ** (2 * j)
        single[3] += j * bj * bj * rho ** (2 * j)
        for k in range(1, j):
            weight = bj * values[k - 1]
            lag = j - k
            double[0] += weight * rho ** lag
            double[1] += weight * rho ** (j + k)
            double[2] += weight * lag * rho ** lag
            double[3] += weight * (j + k) * rho ** (j + k)
            double[4] += weight * lag * lag * rho ** lag
    return SeriesBrute(*single, *double)


def finite_difference(f: Callable[[float], float], x: float, h: float = 1e-5) -> float:
    """Derivada central de primeira ordem."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def second_difference(f: Callable[[float], float], x: float, h: float = 1e-4) -> float:
    """Segunda derivada central."""
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)


def log_ratio_integral(rho: float, spec: Optional[QuadratureSpec] = None) -> float:
    """int_0^rho log(1 - rho u) / (u (1 - u)) du por quadratura."""
    spec = spec or DEFAULT_QUADRATURE

    def integrand(u: float) -> float:
        return math.log1p(-rho * u) / (u * (1.0 - u))

    return integrate(integrand, 0.0, rho, spec)

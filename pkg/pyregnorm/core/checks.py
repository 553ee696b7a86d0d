"""
Módulo checks - Suítes de conferência contra os oráculos

Cada suíte devolve uma lista de CheckResult com os dois lados da
identidade, a diferença e a tolerância aplicada.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List

import numpy as np

from pyregnorm.core import oracle
from pyregnorm.core.errors import DomainError
from pyregnorm.core.kappa import (
    kappa_closed_form, kappa_finite, kappa_from_series, series_functions,
)
from pyregnorm.core.model import BetaSpec, ModelConfig, kms_trace_sq
from pyregnorm.core.oracle import DEFAULT_BUDGET, OracleBudget
from pyregnorm.core.sim import statistic
from pyregnorm.core.specfun import bessel_k, dilog
from pyregnorm.core.streams import make_stream, replication_stream
from pyregnorm.core.vg import (
    BivariateGaussianSpec, VgParams, gaussian_product_law, gaussian_product_sample, vg_cdf, vg_cf,
    vg_convolve, vg_pdf, vg_scale,
)

logger = logging.getLogger(__name__)

RHO_GRID = (-0.9, -0.5, 0.0, 0.3, 0.7)
LOG_INTEGRAL_RHO_GRID = (-0.9, -0.5, 0.3, 0.7, 0.95)
CLOSED_FORM_RHO_GRID = (-0.95, -0.6, 0.0, 0.3, 0.5, 0.7, 0.9)
VG_PARAM_SETS = (
    VgParams(3.0, 0.5, 1.0, 0.0),
    VgParams(2.0, 0.0, 1.0, 0.0),
    VgParams(5.0, -0.3, 0.8, 1.0),
    VgParams(1.5, 0.2, 1.5, -0.5),
)


@dataclass(frozen=True)
class CheckResult:
    """
    Resultado de uma identidade conferida.

    Attributes:
        name: Identificação da identidade
        lhs: Valor do caminho de produção
        rhs: Valor de referência
        gap: |lhs - rhs|
        tolerance: Tolerância (relativa a max(1, |rhs|) quando relative=True)
        passed: Se a identidade foi satisfeita
        relative: Tipo de tolerância
    """
    name: str
    lhs: float
    rhs: float
    gap: float
    tolerance: float
    passed: bool
    relative: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def compare(name: str, lhs: float, rhs: float, tolerance: float,
            relative: bool = False) -> CheckResult:
    """Monta um CheckResult comparando os dois lados."""
    gap = abs(float(lhs) - float(rhs))
    bound = tolerance * max(1.0, abs(float(rhs))) if relative else tolerance
    return CheckResult(name, float(lhs), float(rhs), gap, tolerance, gap <= bound, relative)


def specfun_suite(_budget: OracleBudget = DEFAULT_BUDGET) -> List[CheckResult]:
    results = []
    for x in (-1.0, -0.75, -0.3, 0.0, 0.25, 0.5, 0.8, 1.0):
        results.append(compare(f"dilog({x}) = série", dilog(x), oracle.dilog_series(x), 1e-12))
    for x in (0.1, 0.3, 0.5, 0.7, 0.9):
        lhs = dilog(x) + dilog(-x)
        results.append(compare(f"duplicação em {x}", lhs, 0.5 * dilog(x * x), 1e-10))
    for x in (-0.9, -0.5, 0.3, 0.7, 0.9):
        lhs = dilog(x / (x - 1.0)) + dilog(x)
        results.append(compare(f"Landen em {x}", lhs, -0.5 * math.log1p(-x) ** 2, 1e-10))
    for rho in LOG_INTEGRAL_RHO_GRID:
        rhs = -0.5 * (dilog(rho * rho) + math.log1p(-rho) ** 2)
        results.append(compare(f"integral log(1-rho u)/(u(1-u)) em rho={rho}",
                               oracle.log_ratio_integral(rho), rhs, 1e-8))
    for nu in (0.0, 0.5, 1.0, 2.5):
        for x in (0.5, 1.0, 5.0):
            results.append(compare(f"K_{nu}({x}) = representação integral",
                                   bessel_k(nu, x), oracle.bessel_k_integral(nu, x), 1e-8,
                                   relative=True))
    return results


def vg_suite(budget: OracleBudget = DEFAULT_BUDGET) -> List[CheckResult]:
    results = []
    for params in VG_PARAM_SETS:
        for x in np.linspace(-3.2, 3.4, 10):
            x = float(x)
            results.append(compare(
                f"vg_pdf{tuple(asdict(params).values())} em {x:.3f} = mistura gama",
                vg_pdf(params, x), oracle.vg_pdf_quadrature(params, x), 1e-7,
            ))

    first, second = VgParams(1.5, 0.4, 1.2, 0.3), VgParams(2.5, 0.4, 1.2, -1.0)
    joined = vg_convolve(first, second)
    scaled = vg_scale(first, 2.5)
    for t in (-3.0, -0.7, 0.4, 1.9):
        product = vg_cf(first, t) * vg_cf(second, t)
        results.append(compare(f"fechamento por soma em t={t}",
                               abs(product - vg_cf(joined, t)), 0.0, 1e-12))
        results.append(compare(f"fechamento por escala em t={t}",
                               abs(vg_cf(first, 2.5 * t) - vg_cf(scaled, t)), 0.0, 1e-12))

    results.append(_product_ks_check(BivariateGaussianSpec(2.0, 3.0, 0.5), budget))
    return results


def _product_ks_check(spec: BivariateGaussianSpec, budget: OracleBudget) -> CheckResult:
    """Produtos simulados contra a CDF variance-gamma numa grade de 101 pontos."""
    count = min(budget.mc_trials, 100_000)
    sample = np.sort(gaussian_product_sample(spec, make_stream(2024), count))
    grid = np.quantile(sample, np.linspace(0.01, 0.99, 101))
    empirical = np.searchsorted(sample, grid, side='right') / count
    distance = float(np.max(np.abs(empirical - vg_cdf(gaussian_product_law(spec), grid))))
    return compare(f"produto de normais (rho={spec.rho}) ~ VG, {count} sorteios",
                   distance, 0.0, 1.63 / math.sqrt(count))


def _kappa_configs():
    rng = np.random.default_rng(2024)
    random_beta = BetaSpec.explicit(rng.normal(size=15))
    for rho in RHO_GRID:
        for p in (1, 2, 8, 15):
            yield ModelConfig(p, p, rho, 1.0, BetaSpec.hyperbolic())
            yield ModelConfig(p, p, rho, 1.0, random_beta)
    yield ModelConfig(40, 40, 0.7, 1.0, BetaSpec.hyperbolic())


def kappa_suite(budget: OracleBudget = DEFAULT_BUDGET) -> List[CheckResult]:
    results = []
    for config in _kappa_configs():
        label = f"p={config.p}, rho={config.rho}, beta={config.beta.kind}"
        ks = kappa_finite(config)
        if config.p <= budget.max_dense_np:
            results.append(compare(f"kappa1,p força bruta ({label})",
                                   ks.kappa1, oracle.kappa1_brute(config, budget), 1e-10,
                                   relative=True))
            results.append(compare(f"kappa2,p força bruta ({label})",
                                   ks.kappa2, oracle.kappa2_brute(config, budget), 1e-10,
                                   relative=True))
        if config.p <= budget.max_p_quartic:
            results.append(compare(f"kappa3,p força bruta ({label})",
                                   ks.kappa3, oracle.kappa3_brute(config, budget), 1e-10,
                                   relative=True))
        else:
            logger.warning("kappa3,p força bruta omitido para %s: limite O(p^4) é %d",
                           label, budget.max_p_quartic)

    hyperbolic = BetaSpec.hyperbolic()
    for rho in CLOSED_FORM_RHO_GRID:
        general = kappa_from_series(series_functions(hyperbolic, rho), rho)
        closed = kappa_closed_form(rho)
        for name in ('kappa1', 'kappa2', 'kappa3'):
            results.append(compare(f"{name} forma fechada = identidades gerais (rho={rho})",
                                   getattr(general, name), getattr(closed, name), 1e-9,
                                   relative=True))
    return results


def trace_suite(budget: OracleBudget = DEFAULT_BUDGET) -> List[CheckResult]:
    results = []
    for rho in (-0.95, -0.6, 0.0, 0.3, 0.7, 0.9):
        for p in (1, 2, 10, 50, 200):
            if p > budget.max_dense_np:
                continue
            results.append(compare(f"tr(Sigma^2) p={p}, rho={rho}",
                                   kms_trace_sq(rho, p), oracle.kms_trace_sq_brute(rho, p),
                                   1e-12, relative=True))
        for p in (2, 6, 12):
            smallest = oracle.min_kms_eigenvalue(rho, p)
            results.append(CheckResult(f"menor autovalor KMS p={p}, rho={rho}",
                                       smallest, 0.0, smallest, 0.0, smallest > 0))
    return results


def statistic_suite(budget: OracleBudget = DEFAULT_BUDGET) -> List[CheckResult]:
    """Estatístico em fluxo contra o produto matricial denso sobre o mesmo fluxo."""
    results = []
    for n, p, rho, block_rows in ((40, 30, 0.5, 64), (100, 60, -0.7, 7), (150, 150, 0.9, 64)):
        if n * p > budget.max_dense_np ** 2:
            logger.warning("Estatístico denso omitido para n=%d, p=%d: limite n*p <= %d",
                           n, p, budget.max_dense_np ** 2)
            continue
        config = ModelConfig(n, p, rho, 4.0, BetaSpec.hyperbolic())
        streamed = statistic(config, replication_stream(42, n), block_rows)
        dense = oracle.dense_statistic(config, replication_stream(42, n), budget, block_rows)
        results.append(compare(f"||X'Y||^2 em fluxo = denso (n={n}, p={p}, rho={rho})",
                               streamed, dense, 1e-10, relative=True))
    return results


SUITES: Dict[str, Callable[[OracleBudget], List[CheckResult]]] = {
    'specfun': specfun_suite,
    'vg': vg_suite,
    'kappa': kappa_suite,
    'trace': trace_suite,
    'statistic': statistic_suite,
}


def run_checks(suite: str = 'all', budget: OracleBudget = DEFAULT_BUDGET) -> List[CheckResult]:
    """
    Executa uma suíte de conferências.

    Args:
        suite: 'specfun', 'vg', 'kappa', 'trace', 'statistic' ou 'all'
        budget: Limites de custo dos oráculos

    Returns:
        Lista de resultados

    Raises:
        DomainError: Para nome de suíte desconhecido
    """
    if suite == 'all':
        names = list(SUITES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise DomainError(f"Suíte desconhecida: {suite}")

    results = []
    for name in names:
        logger.info("Executando suíte %s", name)
        suite_results = SUITES[name](budget)
        failed = sum(not r.passed for r in suite_results)
        if failed:
            logger.warning("Suíte %s: %d de %d identidades falharam", name, failed,
                           len(suite_results))
        results.extend(suite_results)
    return results

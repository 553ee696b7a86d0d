"""
Módulo sim - Estatístico ||X'Y||^2 e motor de Monte Carlo

Cálculo em fluxo do estatístico, normalização pela lei limite, réplicas
independentes em paralelo e comparação da distribuição empírica com
N(0, s^2).
"""

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from pyregnorm.core.errors import DomainError
from pyregnorm.core.limitlaw import CenteringMode, LimitLaw, default_centering_mode, limit_law
from pyregnorm.core.model import DEFAULT_BLOCK_ROWS, BetaSpec, ModelConfig, iter_row_blocks
from pyregnorm.core.streams import MAX_SEED, replication_stream

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int], None]

GRID_PADDING = 0.05


@dataclass(frozen=True)
class McConfig:
    """
    Configuração de um estudo de Monte Carlo.

    Attributes:
        model: Processo gerador
        reps: Número de réplicas
        master_seed: Semente mestre (64 bits)
        centering_mode: Modo de centralização (padrão depende de beta)
        cdf_grid_points: Pontos da grade da CDF empírica
        histogram_bins: Número de classes do histograma
        block_rows: Linhas geradas por bloco
    """
    model: ModelConfig
    reps: int = 1000
    master_seed: int = 42
    centering_mode: Optional[CenteringMode] = None
    cdf_grid_points: int = 512
    histogram_bins: int = 40
    block_rows: int = DEFAULT_BLOCK_ROWS

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise DomainError(f"reps deve ser >= 1: {self.reps}")
        if not 0 <= self.master_seed <= MAX_SEED:
            raise DomainError(f"Semente fora do intervalo de 64 bits: {self.master_seed}")
        if self.cdf_grid_points < 2:
            raise DomainError(f"cdf_grid_points deve ser >= 2: {self.cdf_grid_points}")
        if self.histogram_bins < 1:
            raise DomainError(f"histogram_bins deve ser >= 1: {self.histogram_bins}")
        if self.block_rows < 1:
            raise DomainError(f"block_rows deve ser >= 1: {self.block_rows}")
        mode = self.centering_mode
        mode = default_centering_mode(self.model.beta) if mode is None else CenteringMode(mode)
        object.__setattr__(self, 'centering_mode', mode)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'model': self.model.to_dict(),
            'reps': self.reps,
            'master_seed': self.master_seed,
            'centering_mode': self.centering_mode.value,
            'cdf_grid_points': self.cdf_grid_points,
            'histogram_bins': self.histogram_bins,
            'block_rows': self.block_rows,
        }


class CdfGrid(NamedTuple):
    x: np.ndarray
    empirical_cdf: np.ndarray
    limit_cdf: np.ndarray


class Histogram(NamedTuple):
    bin_edges: np.ndarray
    bin_centers: np.ndarray
    empirical_density: np.ndarray
    limit_density: np.ndarray


@dataclass(frozen=True, eq=False)
class McSummary:
    """
    Resultado de um estudo de Monte Carlo.

    Attributes:
        normalized_values: Réplicas normalizadas, em ordem crescente
        ks_distance: Distância KS até N(0, s^2)
        limit: Lei limite usada na normalização
        empirical_cdf: Grade (x, F empírica, F limite)
        empirical_pdf: Histograma e densidade limite nos centros
        runtime_seconds: Tempo de execução
    """
    normalized_values: np.ndarray
    ks_distance: float
    limit: LimitLaw
    empirical_cdf: CdfGrid
    empirical_pdf: Histogram
    runtime_seconds: float

    @property
    def mean(self) -> float:
        return float(np.mean(self.normalized_values))

    @property
    def variance(self) -> float:
        """Variância amostral (divisor N-1; zero com uma réplica)."""
        if self.normalized_values.size < 2:
            return 0.0
        return float(np.var(self.normalized_values, ddof=1))

    def to_dict(self) -> Dict[str, Any]:
        """Campos determinísticos do resumo (sem o tempo de execução)."""
        return {
            'reps': int(self.normalized_values.size),
            'ks_distance': self.ks_distance,
            'mean': self.mean,
            'variance': self.variance,
            'limit': self.limit.to_dict(),
            'normalized_values': self.normalized_values.tolist(),
            'empirical_cdf': {
                'x': self.empirical_cdf.x.tolist(),
                'empirical_cdf': self.empirical_cdf.empirical_cdf.tolist(),
                'limit_cdf': self.empirical_cdf.limit_cdf.tolist(),
            },
            'empirical_pdf': {
                'bin_edges': self.empirical_pdf.bin_edges.tolist(),
                'bin_center': self.empirical_pdf.bin_centers.tolist(),
                'empirical_density': self.empirical_pdf.empirical_density.tolist(),
                'limit_density': self.empirical_pdf.limit_density.tolist(),
            },
        }


def statistic(config: ModelConfig, rng_stream: np.random.Generator,
              block_rows: int = DEFAULT_BLOCK_ROWS) -> float:
    """
    Calcula ||X'Y||^2 em fluxo, com memória O(p).

    H = X'Y é acumulado bloco a bloco com soma compensada (Neumaier) e
    sum_k H_k^2 é somado com math.fsum.

    Args:
        config: Configuração do modelo
        rng_stream: Fluxo aleatório exclusivo da réplica
        block_rows: Linhas por bloco

    Returns:
        Valor do estatístico
    """
    total = np.zeros(config.p)
    compensation = np.zeros(config.p)
    for x_block, y_block in iter_row_blocks(config, rng_stream, block_rows):
        term = x_block.T @ y_block
        updated = total + term
        compensation += np.where(
            np.abs(total) >= np.abs(term),
            (total - updated) + term,
            (term - updated) + total,
        )
        total = updated
    h = total + compensation
    return math.fsum(h * h)


def normalized_statistic(config: ModelConfig, law: LimitLaw, rng_stream: np.random.Generator,
                         block_rows: int = DEFAULT_BLOCK_ROWS) -> float:
    """(||X'Y||^2 - centralização) / n^(3/2)."""
    return (statistic(config, rng_stream, block_rows) - law.centering) / law.scale


def ks_distance(sorted_sample: np.ndarray, s: float) -> float:
    """
    Distância de Kolmogorov-Smirnov entre a amostra e N(0, s^2).

    Avaliada nos pontos de salto: max(|i/N - Phi(x_i/s)|, |(i-1)/N - Phi(x_i/s)|).

    Args:
        sorted_sample: Amostra em ordem crescente
        s: Desvio padrão da normal de referência

    Returns:
        Distância em [0, 1]

    Raises:
        DomainError: Se s <= 0, amostra vazia ou fora de ordem
    """
    if not s > 0:
        raise DomainError(f"Desvio padrão deve ser > 0: {s}")
    values = np.asarray(sorted_sample, dtype=float)
    if values.size == 0:
        raise DomainError("Amostra vazia")
    if np.any(np.diff(values) < 0):
        raise DomainError("Amostra deve estar em ordem crescente")

    n = values.size
    cdf = stats.norm.cdf(values / s)
    upper = np.arange(1, n + 1) / n
    lower = np.arange(0, n) / n
    return float(max(np.max(np.abs(upper - cdf)), np.max(np.abs(lower - cdf))))


def _padded_range(values: np.ndarray):
    lo, hi = float(values[0]), float(values[-1])
    span = hi - lo
    pad = GRID_PADDING * span if span > 0 else 0.5
    return lo - pad, hi + pad


def empirical_cdf_grid(sorted_sample: np.ndarray, s: float, points: int) -> CdfGrid:
    """CDF empírica e limite numa grade uniforme sobre [min, max] com 5% de folga."""
    lo, hi = _padded_range(sorted_sample)
    x = np.linspace(lo, hi, points)
    ecdf = np.searchsorted(sorted_sample, x, side='right') / sorted_sample.size
    return CdfGrid(x, ecdf, stats.norm.cdf(x / s))


def empirical_histogram(sorted_sample: np.ndarray, s: float, bins: int) -> Histogram:
    """Histograma normalizado com classes iguais sobre [min, max] com 5% de folga."""
    lo, hi = _padded_range(sorted_sample)
    edges = np.linspace(lo, hi, bins + 1)
    density, edges = np.histogram(sorted_sample, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return Histogram(edges, centers, density, stats.norm.pdf(centers, scale=s))


def _resolve_workers(threads: Optional[int]) -> int:
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise DomainError(f"Número de threads deve ser >= 1: {threads}")
    return int(threads)


class MonteCarloRunner:
    """
    Executa as réplicas de um estudo de Monte Carlo.

    Cada réplica usa o fluxo (master_seed, índice), de modo que o resultado
    não depende do número de threads nem da ordem de execução.
    """

    def __init__(self, progress_callback: Optional[ProgressCallback] = None):
        """
        Inicializa o executor.

        Args:
            progress_callback: Função chamada com (concluídas, total)
        """
        self.progress_callback = progress_callback

    def _notify(self, done: int, total: int) -> None:
        if self.progress_callback:
            self.progress_callback(done, total)

    def run(self, mc: McConfig, threads: Optional[int] = None) -> McSummary:
        """
        Roda o estudo.

        Args:
            mc: Configuração do estudo
            threads: Número de threads (padrão: todos os núcleos)

        Returns:
            McSummary
        """
        workers = _resolve_workers(threads)
        law = limit_law(mc.model, mc.centering_mode)
        logger.info(
            "Iniciando %d réplicas (n=%d, p=%d, rho=%g) com %d threads",
            mc.reps, mc.model.n, mc.model.p, mc.model.rho, workers,
        )

        def replicate(index: int) -> float:
            rng = replication_stream(mc.master_seed, index)
            return normalized_statistic(mc.model, law, rng, mc.block_rows)

        start = time.perf_counter()
        values = np.empty(mc.reps)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map devolve na ordem dos índices
            for index, value in enumerate(pool.map(replicate, range(mc.reps))):
                values[index] = value
                self._notify(index + 1, mc.reps)

        values.sort()
        summary = McSummary(
            normalized_values=values,
            ks_distance=ks_distance(values, law.s),
            limit=law,
            empirical_cdf=empirical_cdf_grid(values, law.s, mc.cdf_grid_points),
            empirical_pdf=empirical_histogram(values, law.s, mc.histogram_bins),
            runtime_seconds=time.perf_counter() - start,
        )
        logger.info("Réplicas concluídas: KS=%.4f em %.2fs", summary.ks_distance,
                    summary.runtime_seconds)
        return summary


def run_mc(mc: McConfig, threads: Optional[int] = None,
           progress_callback: Optional[ProgressCallback] = None) -> McSummary:
    """Atalho para MonteCarloRunner(progress_callback).run(mc, threads)."""
    return MonteCarloRunner(progress_callback).run(mc, threads)


# (c, n) de cada par de painéis: n = 500 para c = 1 e n = 160 para c = 10
STUDY_ASPECTS: Tuple[Tuple[float, int], ...] = ((1.0, 500), (10.0, 160))
# o último valor é a variante de sinal positivo de -0.95
STUDY_RHOS: Tuple[float, ...] = (0.3, -0.6, 0.7, 0.9, -0.95, 0.95)


class StudyPanel(NamedTuple):
    """Um painel do estudo: beta hiperbólico com (rho, c, n)."""
    rho: float
    c: float
    n: int

    @property
    def label(self) -> str:
        return f"rho={self.rho:g}_c={self.c:g}"


class PanelResult(NamedTuple):
    panel: StudyPanel
    config: McConfig
    summary: McSummary

    def to_dict(self) -> Dict[str, Any]:
        """Resumo compacto do painel (sem réplicas nem grades)."""
        return {
            'label': self.panel.label,
            'rho': self.panel.rho,
            'c': self.panel.c,
            'n': self.config.model.n,
            'p': self.config.model.p,
            'ks_distance': self.summary.ks_distance,
            'mean': self.summary.mean,
            'variance': self.summary.variance,
            's2': self.summary.limit.s2,
        }


def study_panels(rhos: Sequence[float] = STUDY_RHOS,
                 aspects: Sequence[Tuple[float, int]] = STUDY_ASPECTS) -> List[StudyPanel]:
    """Painéis (rho, c, n) na ordem rho-major."""
    return [StudyPanel(float(rho), float(c), int(n)) for rho in rhos for c, n in aspects]


def run_study(panels: Sequence[StudyPanel], reps: int = 1000, master_seed: int = 42,
              sigma_eps2: float = 4.0, threads: Optional[int] = None,
              centering_mode: Optional[CenteringMode] = None,
              progress_callback: Optional[ProgressCallback] = None) -> List[PanelResult]:
    """
    Roda o estudo de Monte Carlo em cada painel, com beta hiperbólico.

    Todos os painéis usam a mesma semente mestre; cada um é reprodutível
    isoladamente.

    Args:
        panels: Painéis a executar
        reps: Réplicas por painel
        master_seed: Semente mestre
        sigma_eps2: Variância do erro
        threads: Número de threads
        centering_mode: Centralização (padrão: limit)
        progress_callback: Recebe (concluídas, total) de cada painel

    Returns:
        Um PanelResult por painel, na ordem dada
    """
    if not panels:
        raise DomainError("Estudo sem painéis")
    runner = MonteCarloRunner(progress_callback)
    results = []
    for panel in panels:
        model = ModelConfig.from_aspect(panel.n, panel.c, panel.rho, sigma_eps2,
                                        BetaSpec.hyperbolic())
        mc = McConfig(model, reps=reps, master_seed=master_seed, centering_mode=centering_mode)
        logger.info("Painel %s (n=%d, p=%d)", panel.label, model.n, model.p)
        results.append(PanelResult(panel, mc, runner.run(mc, threads)))
    return results

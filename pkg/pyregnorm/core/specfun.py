"""
Módulo specfun - Funções especiais usadas nas formas fechadas

Dilogaritmo real, função de Bessel modificada de segunda espécie e a
quadratura adaptativa compartilhada pelos oráculos. Todas as funções são
puras e podem ser chamadas de qualquer thread.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special

from pyregnorm.core.errors import ConvergenceError, DomainError

ArrayLike = Union[float, Sequence[float], np.ndarray]

# Li2(1) = zeta(2)
PI2_OVER_6 = math.pi ** 2 / 6.0


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Tolerâncias da quadratura adaptativa.

    Attributes:
        abs_tol: Alvo de erro absoluto
        rel_tol: Alvo de erro relativo
        max_subdivisions: Número máximo de subintervalos da bisseção
    """
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol deve ser positivo: {self.abs_tol}")
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol deve ser positivo: {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise DomainError(f"max_subdivisions deve ser >= 1: {self.max_subdivisions}")


DEFAULT_QUADRATURE = QuadratureSpec()


def dilog(x: ArrayLike) -> Union[float, np.ndarray]:
    """
    Dilogaritmo real Li2(x) = -int_0^x log(1-u)/u du.

    Args:
        x: Argumento real (ou vetor) com x <= 1

    Returns:
        Li2(x), escalar para entrada escalar

    Raises:
        DomainError: Se algum x > 1
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(x_arr)) or np.any(x_arr > 1.0):
        raise DomainError(f"Dilogaritmo real definido apenas para x <= 1: {x}")

    values = special.spence(1.0 - x_arr)
    values = np.where(x_arr == 1.0, PI2_OVER_6, values)
    if values.ndim == 0:
        return float(values)
    return values


def _check_bessel_args(nu: float, x: ArrayLike) -> np.ndarray:
    x_arr = np.asarray(x, dtype=float)
    if nu < 0 or math.isnan(nu):
        raise DomainError(f"Ordem da função de Bessel deve ser >= 0: {nu}")
    if np.any(~(x_arr > 0)):
        raise DomainError(f"Argumento da função de Bessel deve ser > 0: {x}")
    return x_arr


def bessel_k(nu: float, x: ArrayLike) -> Union[float, np.ndarray]:
    """
    Função de Bessel modificada de segunda espécie K_nu(x).

    Args:
        nu: Ordem, nu >= 0
        x: Argumento, x > 0

    Returns:
        K_nu(x)

    Raises:
        DomainError: Para x <= 0 ou nu < 0
    """
    x_arr = _check_bessel_args(nu, x)
    values = special.kv(nu, x_arr)
    if np.ndim(values) == 0:
        return float(values)
    return values


def _log_bessel_k_uniform(nu: float, x: np.ndarray) -> np.ndarray:
    """
    Expansão assintótica uniforme de log K_nu(nu z) em ordem alta.

    Quatro termos da série de Debye; erro relativo O(nu^-4) uniforme em z.
    """
    z = x / nu
    root = np.sqrt(1.0 + z * z)
    t2 = 1.0 / (1.0 + z * z)
    t = np.sqrt(t2)
    eta = root + np.log(z / (1.0 + root))
    u1 = t * (3.0 - 5.0 * t2) / 24.0
    u2 = t2 * (81.0 - 462.0 * t2 + 385.0 * t2 ** 2) / 1152.0
    u3 = t * t2 * (30375.0 - 369603.0 * t2 + 765765.0 * t2 ** 2 - 425425.0 * t2 ** 3) / 414720.0
    series = 1.0 - u1 / nu + u2 / nu ** 2 - u3 / nu ** 3
    return 0.5 * np.log(np.pi / (2.0 * nu)) - 0.5 * np.log(root) - nu * eta + np.log(series)


def log_bessel_k(nu: float, x: ArrayLike) -> Union[float, np.ndarray]:
    """
    Logaritmo de K_nu(x), estável para argumentos grandes e ordens altas.

    Usa a versão exponencialmente escalada kve(nu, x) = e^x K_nu(x); onde
    ela transborda (ordem alta, argumento pequeno) recorre à expansão
    uniforme em nu.
    """
    x_arr = _check_bessel_args(nu, x)
    with np.errstate(over='ignore', divide='ignore'):
        values = np.log(special.kve(nu, x_arr)) - x_arr
    overflow = ~np.isfinite(values)
    if np.any(overflow) and nu > 0:
        values = np.where(overflow, _log_bessel_k_uniform(nu, x_arr), values)
    if np.ndim(values) == 0:
        return float(values)
    return values


def integrate(f: Callable[[float], float], a: float, b: float,
              spec: QuadratureSpec = DEFAULT_QUADRATURE,
              points: Optional[Sequence[float]] = None) -> float:
    """
    Integra f em [a, b] por bisseção adaptativa com regra de Gauss-Kronrod.

    Os nós de cada painel nunca tocam as extremidades, de modo que
    singularidades integráveis (ou removíveis) nas pontas são aceitas.

    Args:
        f: Função real de uma variável
        a: Limite inferior (pode ser -inf)
        b: Limite superior (pode ser +inf)
        spec: Tolerâncias e limite de subdivisões
        points: Pontos interiores de quebra (apenas para limites finitos)

    Returns:
        Estimativa da integral

    Raises:
        ConvergenceError: Se a tolerância não for atingida
    """
    if a == b:
        return 0.0

    kwargs = {}
    if points is not None and math.isfinite(a) and math.isfinite(b):
        lo, hi = min(a, b), max(a, b)
        inner = [pt for pt in points if lo < pt < hi]
        if inner:
            kwargs['points'] = inner

    result = sp_integrate.quad(
        f, a, b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        full_output=1,
        **kwargs,
    )
    value, abserr = float(result[0]), float(result[1])

    # quad anexa uma mensagem ao resultado quando falha
    if len(result) > 3:
        raise ConvergenceError(
            f"Erro ao integrar em [{a}, {b}]: {result[3]} (erro estimado {abserr:.3e})"
        )
    if not math.isfinite(value):
        raise ConvergenceError(f"Erro ao integrar em [{a}, {b}]: resultado não finito")
    if abserr > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise ConvergenceError(
            f"Erro ao integrar em [{a}, {b}]: erro estimado {abserr:.3e} acima da tolerância"
        )
    return value

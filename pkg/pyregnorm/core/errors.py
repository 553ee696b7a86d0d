"""
Exceções e avisos do PyRegNorm.
"""


class PyRegNormError(Exception):
    """Erro base de todas as falhas do pacote."""


class DomainError(PyRegNormError, ValueError):
    """Argumento fora do domínio de definição da operação."""


class SingularityError(DomainError):
    """Densidade avaliada exatamente no seu ponto singular."""


class ConvergenceError(PyRegNormError, RuntimeError):
    """Quadratura adaptativa não atingiu a tolerância pedida."""


class CovarianceError(PyRegNormError, ValueError):
    """Matriz de covariância não é positiva semidefinida."""


class BudgetExceededError(PyRegNormError):
    """Oráculo chamado acima do orçamento configurado."""


class IdentityMismatchError(PyRegNormError, ArithmeticError):
    """Duas rotas independentes para a mesma constante discordam."""


class HypothesisWarning(UserWarning):
    """Hipóteses do teorema com constantes limite não podem ser certificadas."""


class TruncationWarning(UserWarning):
    """Erro estimado de truncamento de série acima do alvo."""

"""
PyRegNorm - Lei limite normal de ||X'Y||^2 em regressão linear de alta dimensão

Este pacote contém os módulos necessários para calcular as constantes
kappa, a variância limite s^2 e a centragem da estatística ||X'Y||^2 sob
covariância de Kac-Murdock-Szegö, simular a estatística por Monte Carlo e
verificar cada identidade fechada contra oráculos de força bruta.
"""

__version__ = '1.0.0'
__author__ = 'Desenvolvedor PyRegNorm'
__license__ = 'MIT'

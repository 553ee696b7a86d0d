"""
Módulo utils - Contém configuração e utilitários de saída
"""

"""
Módulo core - Contém a lógica numérica principal do PyRegNorm
"""

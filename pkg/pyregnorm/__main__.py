#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Módulo principal para execução do PyRegNorm.
Este é o ponto de entrada principal do aplicativo quando executado como pacote.
"""

import argparse
import os
import sys
from typing import Optional, Sequence

# Adicionar o diretório atual ao PYTHONPATH
sys.path.insert(0, os.path.abspath(os.path.dirname(os.path.dirname(__file__))))

from pyregnorm.cli import build_parser, run_cli


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Analisa os argumentos de linha de comando.

    Returns:
        Argumentos analisados
    """
    return build_parser().parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Função principal.

    Returns:
        Código de saída do comando
    """
    return run_cli(argv)


if __name__ == "__main__":
    sys.exit(main())

"""
Interface de linha de comando do PyRegNorm.
"""

from pyregnorm.cli.commands import build_parser, run_cli

__all__ = ['build_parser', 'run_cli']

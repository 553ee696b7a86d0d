#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Ponto de entrada principal para o PyRegNorm.
Este arquivo permite executar a ferramenta diretamente da raiz do projeto.
"""

import sys

from pyregnorm.__main__ import main

if __name__ == "__main__":
    sys.exit(main())

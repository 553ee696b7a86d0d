#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Script de instalação do PyRegNorm.
"""

import os
import re
from setuptools import setup, find_packages

# Caminho do diretório atual
here = os.path.abspath(os.path.dirname(__file__))


def get_version():
    """
    Extrai a versão do pacote do arquivo __init__.py
    """
    with open(os.path.join(here, 'pyregnorm', '__init__.py'), encoding='utf-8') as f:
        init_py = f.read()
    return re.search(r"__version__ = ['\"]([^'\"]+)['\"]", init_py).group(1)


with open(os.path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

requirements = [
    'numpy>=1.22',
    'scipy>=1.8',
]

test_requirements = [
    'pytest>=7.0',
    'hypothesis>=6.0',
]

setup(
    name='pyregnorm',
    version=get_version(),
    description="Lei limite normal de ||X'Y||^2 em regressão de alta dimensão com covariância KMS",
    long_description=long_description,
    long_description_content_type='text/markdown',
    author='Desenvolvedor PyRegNorm',
    packages=find_packages(include=['pyregnorm', 'pyregnorm.*']),
    entry_points={
        'console_scripts': [
            'pyregnorm=pyregnorm.__main__:main',
        ],
    },
    include_package_data=True,
    install_requires=requirements,
    extras_require={'test': test_requirements},
    python_requires='>=3.8',
    keywords='regressão, alta dimensão, variance-gamma, dilogaritmo, monte carlo, KMS',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: Portuguese (Brazilian)',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)

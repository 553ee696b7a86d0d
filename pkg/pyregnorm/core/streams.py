"""
Fluxos aleatórios reprodutíveis por chave.

Cada réplica de Monte Carlo recebe o seu próprio gerador Philox, chaveado
por (semente mestra, índice da réplica). Fluxos nunca são compartilhados
entre threads.
"""

import numpy as np

from pyregnorm.core.errors import DomainError

MAX_SEED = 2 ** 64 - 1


def make_stream(master_seed: int, *key: int) -> np.random.Generator:
    """
    Cria um gerador baseado em contador para a chave dada.

    Args:
        master_seed: Semente mestra de 64 bits (não negativa)
        *key: Componentes adicionais da chave (ex.: índice da réplica)

    Returns:
        Gerador numpy com bit generator Philox

    Raises:
        DomainError: Se a semente ou alguma componente for negativa
    """
    if not 0 <= int(master_seed) <= MAX_SEED:
        raise DomainError(f"Semente fora do intervalo [0, 2^64): {master_seed}")
    if any(int(k) < 0 for k in key):
        raise DomainError(f"Chave de fluxo com componente negativa: {key}")

    seed_seq = np.random.SeedSequence(entropy=int(master_seed),
                                      spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seed_seq))


def replication_stream(master_seed: int, index: int) -> np.random.Generator:
    """Fluxo da réplica `index` sob a semente mestra."""
    return make_stream(master_seed, index)

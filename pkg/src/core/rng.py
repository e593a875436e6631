"""
Derivacion de flujos aleatorios a partir de la semilla maestra.

- agent_stream(seed, agent_id): flujo por agente/entidad, semilla `seed XOR id`, de
  modo que anadir agentes no altera el ruido de los demas.
- substream(seed, *keys): flujo por subsistema (solver MPC, estimador de riesgo...)
  usando SeedSequence con la tupla (seed, *keys).
"""
from __future__ import annotations
import zlib
import numpy as np


def agent_stream(seed: int, agent_id: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) ^ int(agent_id))


def _key(value) -> int:
    if isinstance(value, str):
        return zlib.crc32(value.encode("utf-8"))
    return int(value) & 0xFFFFFFFF


def substream(seed: int, *keys) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *(_key(k) for k in keys)]))

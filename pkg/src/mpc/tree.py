"""
Arbol de escenarios del intruso y funciones de coste/separacion.
"""
from __future__ import annotations
import math
from typing import Tuple

import numpy as np

from environment.models import step_unicycle
from mpc.config import MpcConfig
from mpc.dubins import DubinsIntent
from utils.errors import ConfigurationError

# codigos de rama: 0 -> giro maximo, 1 -> giro minimo, 2 -> Dubins
BRANCH_MAX, BRANCH_MIN, BRANCH_DUBINS = 0, 1, 2


def branch_code(j: int, k: int, robust_horizon: int, branches: int = 3) -> int:
    """
    Descripción
        FUNCIÓN: Codigo de rama del escenario j (1..M) en el paso k < N_r:
        c = ceil(j / 3^(N_r-k-1)) mod 3.
    """
    m = branches ** robust_horizon
    if not 1 <= j <= m:
        raise ConfigurationError(f"scenario index {j} outside 1..{m}")
    if not 0 <= k < robust_horizon:
        return BRANCH_DUBINS
    return math.ceil(j / branches ** (robust_horizon - k - 1)) % branches


def intruder_branch_input(j: int, k: int, config: MpcConfig, intent: DubinsIntent, t: float) -> Tuple[float, float]:
    """(v, u) del intruso en el escenario j y paso k; tras N_r siempre Dubins."""
    lo, hi = config.intruder_u_bounds
    code = branch_code(j, k, config.robust_horizon, config.branches)
    if code == BRANCH_MAX:
        u = hi
    elif code == BRANCH_MIN:
        u = lo
    else:
        u = intent.dubins_input(t + k * config.t_e)
    return config.intruder_v_max, u


def predict_intruder_tree(config: MpcConfig, s2_t, intent: DubinsIntent, t: float) -> np.ndarray:
    """
    Descripción
        FUNCIÓN: Propaga el intruso en los M escenarios.

    Retorno
        - np.ndarray: forma (M, N+1, 3); [j, 0] es el estado actual en todos.
    """
    m, n = config.scenarios, config.horizon
    tree = np.empty((m, n + 1, 3))
    tree[:, 0, :] = np.asarray(s2_t, dtype=float)
    for j in range(1, m + 1):
        s = tree[j - 1, 0]
        for k in range(n):
            v, u = intruder_branch_input(j, k, config, intent, t)
            s = step_unicycle(s, v, u, config.t_e)
            tree[j - 1, k + 1] = s
    return tree


def separation(s1, s2, R: float = 1.0) -> np.ndarray:
    """sqrt(R * ((x1-x2)^2 + (y1-y2)^2)); admite difusion de ejes."""
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    d = s1[..., :2] - s2[..., :2]
    return np.sqrt(R * np.sum(d * d, axis=-1))


def _weighted(e: np.ndarray, W: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", e, W, e), 0.0))


def scenario_cost(trajectory, target, Q, Q_f) -> np.ndarray:
    """
    Descripción
        FUNCIÓN: ||s_N - s_T||_{Q_f} + sum_{k=0}^{N-1} ||s_k - s_T||_Q con
        ||e||_W = sqrt(e^T W e). Acepta lotes (..., N+1, 3).

    Excepciones
        - ConfigurationError: dimensiones incompatibles.
    """
    traj = np.asarray(trajectory, dtype=float)
    target = np.asarray(target, dtype=float)
    Q = np.asarray(Q, dtype=float)
    Q_f = np.asarray(Q_f, dtype=float)
    if traj.ndim < 2 or traj.shape[-1] != target.shape[-1] or Q.shape != (traj.shape[-1],) * 2 or Q_f.shape != Q.shape:
        raise ConfigurationError("dimension mismatch in scenario cost")
    err = traj - target
    return _weighted(err[..., -1, :], Q_f) + np.sum(_weighted(err[..., :-1, :], Q), axis=-1)

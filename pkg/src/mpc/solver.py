"""
Resolucion del MPC robusto por entropia cruzada.

Descripción
-------------------
    MÓDULO: Transcripcion directa: las variables de decision son las secuencias
    (v_0..v_{N-1}, u_0..u_{N-1}) del aparato propio, compartidas por los M
    escenarios del intruso (no anticipativas). Cada iteracion:
        1) muestrea candidatos antiteticos alrededor de la media actual,
        2) los recorta a las cotas y los propaga con el modelo uniciclo,
        3) evalua coste + PENALTY * violacion de separacion en todos los escenarios,
        4) reajusta media/desviacion con los mejores (elites).

    Se conserva el mejor candidato visto: primero los factibles por coste, si no
    hay ninguno el de menor violacion total. Determinista dada la semilla.
"""
from __future__ import annotations
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from configs.package import CONF
from mpc.config import MpcConfig
from mpc.dubins import DubinsIntent
from mpc.tree import predict_intruder_tree, scenario_cost, separation
from utils.logger import get_logger

log = get_logger("MPC")


@dataclass
class MpcSolution:
    """
    Descripción
        CLASE: Resultado de `solve_mpc`.

    Atributos
        - v / u (np.ndarray): secuencias de entrada (N,); se aplica solo v[0], u[0].
        - cost (float): coste sin penalizacion.
        - trajectory (np.ndarray): prediccion propia (N+1, 3).
        - tree (np.ndarray): prediccion del intruso (M, N+1, 3).
        - feasible (bool): separacion >= rho en k = 1..N para todos los escenarios.
        - max_violation (float): max(rho - separacion) (0 si factible).
        - violating_scenario (Optional[int]): escenario j (1..M) con la peor violacion.
        - report (Dict[str, Any]): informe de restricciones.
    """
    v: np.ndarray
    u: np.ndarray
    cost: float
    trajectory: np.ndarray
    tree: np.ndarray
    feasible: bool
    max_violation: float = 0.0
    violating_scenario: Optional[int] = None
    report: Dict[str, Any] = field(default_factory=dict)

    @property
    def first_input(self) -> Tuple[float, float]:
        return float(self.v[0]), float(self.u[0])


def rollout(s0: Sequence[float], v: np.ndarray, u: np.ndarray, t_e: float) -> np.ndarray:
    """Propaga el uniciclo para un lote de secuencias (C, N) -> (C, N+1, 3)."""
    v = np.atleast_2d(v)
    u = np.atleast_2d(u)
    c, n = v.shape
    out = np.empty((c, n + 1, 3))
    out[:, 0, :] = np.asarray(s0, dtype=float)
    for k in range(n):
        s = out[:, k, :]
        out[:, k + 1, 0] = s[:, 0] + t_e * v[:, k] * np.cos(s[:, 2])
        out[:, k + 1, 1] = s[:, 1] + t_e * v[:, k] * np.sin(s[:, 2])
        out[:, k + 1, 2] = s[:, 2] + t_e * u[:, k]
    return out


def _pursuit(config: MpcConfig, s_t: np.ndarray, target: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Heuristica de persecucion: gira hacia el objetivo y frena al llegar."""
    n, t_e = config.horizon, config.t_e
    v_lo, v_hi = config.v_bounds
    u_lo, u_hi = config.u_bounds
    v = np.zeros(n)
    u = np.zeros(n)
    s = s_t.copy()
    for k in range(n):
        d = target[:2] - s[:2]
        dist = float(np.hypot(*d))
        err = math.remainder(math.atan2(d[1], d[0]) - s[2], CONF.CONST.TWO_PI) if dist > 1e-9 else 0.0
        u[k] = min(u_hi, max(u_lo, err / t_e))
        v[k] = min(v_hi, max(v_lo, min(dist / t_e, v_hi * max(0.0, math.cos(err)))))
        s = s + t_e * np.array([v[k] * math.cos(s[2]), v[k] * math.sin(s[2]), u[k]])
    return v, u


def _seeds(config: MpcConfig, s_t: np.ndarray, target: np.ndarray,
           warm_start: Optional[Tuple[np.ndarray, np.ndarray]]) -> Tuple[np.ndarray, np.ndarray]:
    n = config.horizon
    v_lo, v_hi = config.v_bounds
    u_lo, u_hi = config.u_bounds
    pv, pu = _pursuit(config, s_t, target)
    vs = [pv, np.full(n, min(v_hi, max(v_lo, 0.0))), np.full(n, v_hi), np.full(n, v_hi), np.full(n, v_hi)]
    us = [pu, np.zeros(n), np.zeros(n), np.full(n, u_hi), np.full(n, u_lo)]
    if warm_start is not None:
        wv, wu = (np.asarray(a, dtype=float) for a in warm_start)
        if wv.shape == (n,) and wu.shape == (n,):
            vs.insert(0, np.append(wv[1:], wv[-1]))
            us.insert(0, np.append(wu[1:], wu[-1]))
    return np.clip(np.array(vs), v_lo, v_hi), np.clip(np.array(us), u_lo, u_hi)


def _evaluate(config: MpcConfig, s_t, target, tree, v, u):
    traj = rollout(s_t, v, u, config.t_e)
    cost = scenario_cost(traj, target, config.Q, config.Q_f)
    # separacion (C, M, N) en k = 1..N
    sep = separation(traj[:, None, 1:, :], tree[None, :, 1:, :], config.R)
    violation = np.maximum(config.rho - sep, 0.0).sum(axis=(1, 2))
    return traj, cost, violation, sep


def solve_mpc(config: MpcConfig, s_t: Sequence[float], s2_t: Optional[Sequence[float]], intent: Optional[DubinsIntent],
              target: Sequence[float], t: float = 0.0, seed: int = 0,
              warm_start: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> MpcSolution:
    """
    Descripción
        FUNCIÓN: Resuelve el MPC con arbol de escenarios en el instante t.

    Argumentos
        - config (MpcConfig)
        - s_t (Sequence[float]): estado propio (x, y, sigma).
        - s2_t (Optional[Sequence[float]]): estado del intruso (None = sin intruso).
        - intent (DubinsIntent): intencion del intruso.
        - target (Sequence[float]): estado objetivo propio s_T.
        - t (float): tiempo desde el inicio del camino de Dubins.
        - seed (int): semilla del muestreo.
        - warm_start (Optional[Tuple]): solucion (v, u) del paso anterior.

    Retorno
        - MpcSolution: mejor esfuerzo; `feasible` False trae el informe de violacion.
    """
    s_t = np.asarray(s_t, dtype=float)
    target = np.asarray(target, dtype=float)
    n = config.horizon
    lo = np.concatenate([np.full(n, config.v_bounds[0]), np.full(n, config.u_bounds[0])])
    hi = np.concatenate([np.full(n, config.v_bounds[1]), np.full(n, config.u_bounds[1])])
    rng = np.random.default_rng(seed)

    # 1) arbol del intruso (independiente de la decision propia)
    if s2_t is None or intent is None:
        tree = np.empty((0, n + 1, 3))
    else:
        tree = predict_intruder_tree(config, s2_t, intent, t)

    # 2) candidatos semilla
    sv, su = _seeds(config, s_t, target, warm_start)
    pool = np.hstack([sv, su])

    best_x: Optional[np.ndarray] = None
    best_key = (math.inf, math.inf)
    mean = pool[0].copy()
    std = np.maximum((hi - lo) / 2.0, CONF.MPC.MIN_STD)
    quarter = config.candidates // 4

    for it in range(config.iterations + 1):
        if it == 0:
            cand = np.vstack([pool, mean[None, :]])
        else:
            # 3) muestreo antitetico en v y u por separado
            eps = rng.standard_normal((quarter, 2 * n)) * std
            ev = eps.copy()
            ev[:, n:] = 0.0
            eu = eps - ev
            cand = np.vstack([mean + ev + eu, mean - ev + eu, mean + ev - eu, mean - ev - eu, mean[None, :]])
        cand = np.clip(cand, lo, hi)
        _, cost, violation, _ = _evaluate(config, s_t, target, tree, cand[:, :n], cand[:, n:])
        if not config.enforce_separation:
            violation = np.zeros_like(violation)
        penalized = cost + config.penalty * violation

        order = np.lexsort((cost, violation))
        top = order[0]
        key = (float(violation[top]), float(cost[top]))
        if key < best_key:
            best_key = key
            best_x = cand[top].copy()

        # 4) reajuste con elites (las semillas solo fijan la media inicial)
        if it == 0:
            mean = cand[top].copy()
            continue
        elites = cand[np.argsort(penalized, kind="stable")[: config.elites]]
        mean = elites.mean(axis=0)
        std = np.maximum(elites.std(axis=0), CONF.MPC.MIN_STD)

    assert best_x is not None
    v, u = best_x[:n], best_x[n:]
    traj, cost, _, sep = _evaluate(config, s_t, target, tree, v[None, :], u[None, :])
    gap = config.rho - sep[0]
    if gap.size == 0:
        gap = np.full((1, n), -math.inf)
    worst = float(gap.max())
    feasible = worst <= 0.0 or not config.enforce_separation
    j_worst = int(np.unravel_index(np.argmax(gap), gap.shape)[0]) + 1
    initial_gap = float(config.rho - separation(s_t, tree[0, 0], config.R)) if len(tree) else -math.inf
    report = {
        "feasible": feasible,
        "max_violation": max(0.0, worst),
        "scenario": j_worst if worst > 0.0 else None,
        "step": int(np.unravel_index(np.argmax(gap), gap.shape)[1]) + 1 if worst > 0.0 else None,
        "initial_violation": max(0.0, initial_gap),
    }
    if worst > 0.0 and config.enforce_separation:
        log.warning("no feasible candidate at t=%.3f: violation %.4f in scenario %d", t, worst, j_worst)
    return MpcSolution(
        v=v.copy(), u=u.copy(), cost=float(cost[0]), trajectory=traj[0], tree=tree,
        feasible=feasible, max_violation=max(0.0, worst),
        violating_scenario=j_worst if worst > 0.0 else None, report=report,
    )

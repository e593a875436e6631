"""
Riesgo de aceptar una tarea nueva.

Descripción
-------------------
    MÓDULO: `estimate_task_risk` simula por Monte-Carlo (ruido de actuacion) el
    robot ejecutando su cola actual con la tarea nueva al final, con el
    controlador nominal, y evalua sobre cada trayectoria la conjuncion de las
    formulas pendientes (plazos de todas las tareas y permanencia en el almacen).

        riesgo = 1 - p_hat,   p_hat = fraccion de ejecuciones que cumplen

    La tarea nueva empieza a ejecutarse `delay` pasos despues de la puja (retardo
    de adjudicacion). El riesgo es conjunto: incluye los plazos de la cola actual.
"""
from __future__ import annotations
from typing import Optional, Sequence

import numpy as np

from configs.package import CONF
from core.awareness import AwarenessVector
from logic.risk import estimate_risk
from logic.stl import Trace
from tasking.formulas import queue_formula
from tasking.nominal import WaypointPursuit
from tasking.regions import Warehouse, default_warehouse
from tasking.tasks import CapabilityProfile, Commitment, FetchTask
from utils.logger import get_logger

log = get_logger("TaskRisk")


def rollout(state: Sequence[float], profile: CapabilityProfile, plan: Commitment, warehouse: Warehouse,
            now: int, horizon: int, rng: Optional[np.random.Generator], dt: float = 1.0) -> Trace:
    """
    Descripción
        FUNCIÓN: Una ejecucion del compromiso desde `now` durante `horizon` pasos.
        `plan` se modifica (pasar una copia).

    Retorno
        - Trace: horizon + 1 muestras de posicion con tiempos (now + j) * dt.
    """
    model = profile.model()
    pursuit = WaypointPursuit(warehouse, profile, dt)
    pos = np.asarray(state, dtype=float)[:2].copy()
    if plan.park is None:
        plan.park = pos.copy()
    samples = [pos.copy()]
    for j in range(int(horizon)):
        step = int(now) + j
        plan.advance(pos, step, warehouse)
        u = pursuit.velocity(pos, plan, step)
        pos = model.step(pos, u, dt, rng)
        samples.append(pos.copy())
    return Trace.uniform(np.array(samples), dt, int(now) * dt)


def estimate_task_risk(
    state: Sequence[float],
    profile: CapabilityProfile,
    commitments: Commitment,
    task: FetchTask,
    n_samples: int = CONF.TASKING.RISK_SAMPLES,
    seed: int = 0,
    warehouse: Optional[Warehouse] = None,
    now: Optional[int] = None,
    dt: float = 1.0,
    delay: int = CONF.TASKING.AWARD_DELAY,
    awareness: Optional[AwarenessVector] = None,
) -> float:
    """
    Descripción
        FUNCIÓN: Riesgo de anadir `task` a los compromisos del robot.

    Argumentos
        - state (Sequence[float]): posicion actual del robot.
        - profile (CapabilityProfile): velocidad y ruido del robot.
        - commitments (Commitment): cola actual (no se modifica).
        - task (FetchTask): tarea anunciada.
        - n_samples (int): ejecuciones Monte-Carlo.
        - seed (int): semilla; mismo seed -> mismo riesgo.
        - warehouse (Warehouse): planta; por defecto `default_warehouse()`.
        - now (Optional[int]): paso de la puja; por defecto el de emision de la tarea.
        - delay (int): pasos entre la puja y el inicio de la ejecucion.
        - awareness (Optional[AwarenessVector]): si se da, recibe el riesgo.

    Retorno
        - float: riesgo en [0, 1].
    """
    warehouse = warehouse or default_warehouse()
    now = task.issue_step if now is None else int(now)

    # 1) plan hipotetico: cola actual + tarea nueva
    plan = commitments.copy()
    candidate = FetchTask(task.id, task.origin, task.destination, task.deadline, task.issue_step)
    candidate.assign(plan.agent_id)
    plan.add(candidate, now + int(delay))
    pending = [(t, t.id in plan.visited) for t in plan.queue]

    # 2) alguna tarea ya vencida: sin muestreo
    if any(t.due_step < now for t, _ in pending):
        risk = 1.0
    else:
        formula, horizon = queue_formula(pending, warehouse, now, dt)

        def source(rng: np.random.Generator) -> Trace:
            return rollout(state, profile, plan.copy(), warehouse, now, horizon, rng, dt)

        estimate = estimate_risk(source, formula, int(n_samples), int(seed))
        risk = float(estimate.risk)
    log.debug("agent %s task %s risk %.3f", plan.agent_id, task.id, risk)
    if awareness is not None:
        awareness.set_risk(risk)
    return risk

"""
Subasta voraz con umbral de riesgo.

Tareas en orden de vencimiento (empates por id); cada una va al agente aun libre
en esta ronda con menor riesgo entre los que pujan <= epsilon (empates por id de
agente). Las tareas sin puja valida quedan abiertas y marcadas.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping

from configs.package import CONF
from tasking.tasks import FetchTask, TaskStatus
from utils.errors import ConfigurationError
from utils.logger import get_logger

log = get_logger("Allocation")


@dataclass
class Allocation:
    """
    Atributos
        - assignments (Dict[int, int]): id de tarea -> id de agente.
        - flagged (List[int]): tareas sin puja <= epsilon.
        - winning_risk (Dict[int, float]): riesgo pujado por el ganador.
    """
    assignments: Dict[int, int] = field(default_factory=dict)
    flagged: List[int] = field(default_factory=list)
    winning_risk: Dict[int, float] = field(default_factory=dict)


def allocate(
    tasks: Iterable[FetchTask],
    bids: Mapping[int, Mapping[int, float]],
    epsilon: float = CONF.TASKING.RISK_THRESHOLD,
) -> Allocation:
    """
    Descripción
        FUNCIÓN: Asigna tareas abiertas a partir de las pujas de riesgo.

    Argumentos
        - tasks (Iterable[FetchTask]): tareas abiertas (las demas se ignoran).
        - bids (Mapping[task_id, Mapping[agent_id, riesgo]])
        - epsilon (float): riesgo maximo aceptado, en [0, 1].

    Retorno
        - Allocation
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigurationError(f"risk threshold must lie in [0, 1], got {epsilon}")
    out = Allocation()
    taken = set()
    ordered = sorted((t for t in tasks if t.status == TaskStatus.OPEN), key=lambda t: (t.due_step, t.id))
    for task in ordered:
        offers = [(float(r), int(a)) for a, r in bids.get(task.id, {}).items()
                  if int(a) not in taken and float(r) <= epsilon]
        if not offers:
            out.flagged.append(task.id)
            log.info("task %s has no bid within risk %.3f", task.id, epsilon)
            continue
        risk, agent = min(offers)
        out.assignments[task.id] = agent
        out.winning_risk[task.id] = risk
        taken.add(agent)
    return out

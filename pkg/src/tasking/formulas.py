"""
Traduccion de tareas del almacen a formulas STL sobre la posicion (x1, x2).

Descripción
-------------------
    MÓDULO: Una tarea de recogida con plazo d emitida en el paso s se cumple si
    el robot visita el origen y despues el destino con la llegada al destino en
    un paso <= s + d. Con muestras enteras la formula exacta es

        OR_{k=0..d} F[k,k] (en-origen & F[0,d-k] en-destino)

    (las ventanas de cada rama suman d). Una vuelta a casa es F[0,d] en-casa. La
    regla de permanencia anade G[0,d] en-almacen.

    Los intervalos se expresan en tiempo (pasos * dt) y se evaluan en el tiempo
    de inicio de la traza.
"""
from __future__ import annotations
from typing import Iterable, Tuple

from environment.geometry import Rect
from logic.formula import FalseF, Formula, always, conjunction, disjunction, eventually, in_box
from tasking.regions import Warehouse
from tasking.tasks import FetchTask


def box_formula(box: Rect) -> Formula:
    return in_box((box.lo_x, box.lo_y), (box.hi_x, box.hi_y))


def remaining_formula(task: FetchTask, warehouse: Warehouse, now: int, origin_visited: bool = False,
                      dt: float = 1.0) -> Formula:
    """
    Descripción
        FUNCIÓN: Parte pendiente de una tarea vista desde el paso `now`.

    Argumentos
        - origin_visited (bool): el origen ya se visito antes de `now`.

    Retorno
        - Formula: FalseF si la tarea ya vencio.

    Excepciones
        - UnknownRegionError: region desconocida.
    """
    dest = box_formula(warehouse.region(task.destination))
    origin = None if task.origin is None else box_formula(warehouse.region(task.origin))
    left = task.due_step - int(now)
    if left < 0:
        return FalseF()
    if origin is None or origin_visited:
        return eventually(dest, 0.0, left * dt)
    branches = [eventually(conjunction(origin, eventually(dest, 0.0, (left - k) * dt)), k * dt, k * dt)
                for k in range(left + 1)]
    return disjunction(*branches)


def warehouse_formula(warehouse: Warehouse, horizon: int, dt: float = 1.0) -> Formula:
    """G[0,horizon] en-almacen."""
    return always(box_formula(warehouse.bounds), 0.0, max(0, int(horizon)) * dt)


def task_to_formula(task: FetchTask, warehouse: Warehouse, keep_inside: bool = True, dt: float = 1.0) -> Formula:
    """
    Descripción
        FUNCIÓN: Formula de la tarea evaluada en su paso de emision.

    Argumentos
        - keep_inside (bool): conjunta la permanencia en el almacen durante el plazo.

    Excepciones
        - UnknownRegionError: origen o destino desconocido.
    """
    phi = remaining_formula(task, warehouse, task.issue_step, dt=dt)
    if keep_inside:
        phi = conjunction(phi, warehouse_formula(warehouse, task.deadline, dt))
    return phi


def queue_formula(pending: Iterable[Tuple[FetchTask, bool]], warehouse: Warehouse, now: int,
                  dt: float = 1.0) -> Tuple[Formula, int]:
    """
    Descripción
        FUNCIÓN: Conjuncion de las partes pendientes de una cola de tareas mas la
        permanencia hasta el ultimo vencimiento.

    Argumentos
        - pending (Iterable[(FetchTask, origen_visitado)])

    Retorno
        - (Formula, horizonte en pasos desde `now`)
    """
    parts = []
    horizon = 0
    for task, visited in pending:
        parts.append(remaining_formula(task, warehouse, now, visited, dt))
        horizon = max(horizon, task.due_step - int(now))
    parts.append(warehouse_formula(warehouse, horizon, dt))
    return conjunction(*parts), horizon

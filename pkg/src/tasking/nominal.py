"""
Controlador nominal de los robots del almacen.

Persecucion de puntos de paso a velocidad maxima: cada tramo (hacia el origen o
hacia el destino de la tarea en curso) se planifica con el grafo de visibilidad
al empezar y se sigue con `FollowPath`. Sin tarea, el robot mantiene su punto de
espera. Lo usan el ejecutor de tareas y las simulaciones del estimador de riesgo.
"""
from __future__ import annotations
from typing import Optional, Sequence, Tuple

import numpy as np

from environment.paths import PolylinePath
from environment.steering import FollowPath
from tasking.regions import Warehouse
from tasking.tasks import CapabilityProfile, Commitment


class WaypointPursuit:
    """
    Descripción
        CLASE: Consigna de velocidad para la cabeza de un compromiso.

    Argumentos
        - warehouse (Warehouse)
        - profile (CapabilityProfile)
        - dt (float)

    Atributos
        - leg (Optional[(task_id, region)]): tramo en curso.
        - follower (Optional[FollowPath])
    """

    def __init__(self, warehouse: Warehouse, profile: CapabilityProfile, dt: float = 1.0):
        self.warehouse = warehouse
        self.max_speed = float(profile.max_speed)
        self.dt = float(dt)
        self.leg: Optional[Tuple[int, str]] = None
        self.follower: Optional[FollowPath] = None

    def _hold(self, position: np.ndarray, park: Optional[np.ndarray]) -> np.ndarray:
        if park is None:
            return np.zeros(2)
        v = (park - position) / self.dt
        speed = float(np.linalg.norm(v))
        if speed > self.max_speed:
            v = v * (self.max_speed / speed)
        return np.clip(v, -self.max_speed, self.max_speed)

    def velocity(self, position: Sequence[float], plan: Commitment, step: int) -> np.ndarray:
        """
        Descripción
            MÉTODO: Velocidad para el paso `step` (tras `plan.advance`).

        Excepciones
            - PathConstructionError: no hay ruta hasta la region objetivo.
        """
        pos = np.asarray(position, dtype=float)[:2]
        head = plan.head(step)
        if head is None:
            self.leg, self.follower = None, None
            return self._hold(pos, plan.park)
        region = head.origin if plan.origin_pending(head) else head.destination
        if self.leg != (head.id, region):
            goal = self.warehouse.approach_point(region, pos)
            path = PolylinePath(self.warehouse.plan(pos, goal))
            self.leg = (head.id, region)
            self.follower = FollowPath(path, self.max_speed, self.dt)
        # recorte contra la caja de entrada del modelo
        return np.clip(self.follower.velocity(pos), -self.max_speed, self.max_speed)

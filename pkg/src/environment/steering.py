"""
Seguimiento de rutas ("chase the rabbit") para robots de integrador simple.
"""
from __future__ import annotations
import math
from typing import Sequence

import numpy as np

from environment.paths import PolylinePath


class FollowPath:
    """
    Descripción
        CLASE: Consigna de velocidad para avanzar por una `PolylinePath`.
        1) current_param <- path.get_param(posicion, current_param)
        2) target_param <- current_param + max_speed * dt
        3) target_pos <- path.get_position(target_param)
        4) velocidad = (target_pos - posicion) / dt, limitada a max_speed
           (llegada: al final de la ruta el robot se detiene sobre el ultimo punto).

    Argumentos
        - path (PolylinePath)
        - max_speed (float): velocidad maxima (unidades/s).
        - dt (float): periodo de muestreo.
    """

    def __init__(self, path: PolylinePath, max_speed: float, dt: float, current_param: float = 0.0) -> None:
        self.path = path
        self.max_speed = float(max_speed)
        self.dt = float(dt)
        self.current_param = float(current_param)

    def velocity(self, position: Sequence[float]) -> np.ndarray:
        # 1) Parametro mas cercano
        self.current_param = self.path.get_param(position, self.current_param)
        # 2-3) Objetivo adelantado
        tx, ty = self.path.get_position(self.current_param + self.max_speed * self.dt)
        # 4) Velocidad limitada
        vx, vy = (tx - float(position[0])) / self.dt, (ty - float(position[1])) / self.dt
        speed = math.hypot(vx, vy)
        if speed > self.max_speed:
            vx, vy = vx / speed * self.max_speed, vy / speed * self.max_speed
        return np.array([vx, vy])

    def finished(self, position: Sequence[float], tol: float = 1e-6) -> bool:
        ex, ey = self.path.end
        return math.hypot(ex - float(position[0]), ey - float(position[1])) <= tol

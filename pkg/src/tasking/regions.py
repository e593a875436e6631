"""
Geometria del almacen: limites, regiones con nombre y muros.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from configs.package import CONF
from environment.geometry import Rect
from environment.pathfinder import VisibilityGraph
from utils.errors import ConfigurationError, PathConstructionError, UnknownRegionError


@dataclass
class Warehouse:
    """
    Descripción
        CLASE: Planta del almacen.

    Atributos
        - bounds (Rect): el almacen; salir de el viola la regla de permanencia.
        - regions (Dict[str, Rect]): casas (H-*), puntos de coleccion (CP-*) y PICKUP.
        - walls (List[Rect]): muros (obstaculos del mundo).
        - margin (float): inflado de los muros para planificar.

    Métodos y Funciones
        - region: caja de una region por nombre.
        - approach_point: punto de la region (con margen interior) mas cercano a una posicion.
        - plan: ruta poligonal entre dos puntos esquivando los muros.
    """
    bounds: Rect
    regions: Dict[str, Rect]
    walls: List[Rect] = field(default_factory=list)
    margin: float = CONF.TASKING.WALL_MARGIN

    def __post_init__(self):
        for name, box in self.regions.items():
            if not (self.bounds.contains((box.lo_x, box.lo_y)) and self.bounds.contains((box.hi_x, box.hi_y))):
                raise ConfigurationError(f"region {name!r} lies outside the warehouse")

    def region(self, name: str) -> Rect:
        try:
            return self.regions[name]
        except KeyError:
            raise UnknownRegionError(f"unknown region {name!r}; known: {sorted(self.regions)}") from None

    @cached_property
    def planner(self) -> VisibilityGraph:
        return VisibilityGraph(self.walls, self.margin, self.bounds)

    def approach_point(self, name: str, position: Sequence[float],
                       inset: float = CONF.TASKING.APPROACH_INSET) -> Tuple[float, float]:
        box = self.region(name)
        ix = min(inset, 0.5 * (box.hi_x - box.lo_x))
        iy = min(inset, 0.5 * (box.hi_y - box.lo_y))
        x = float(np.clip(position[0], box.lo_x + ix, box.hi_x - ix))
        y = float(np.clip(position[1], box.lo_y + iy, box.hi_y - iy))
        return x, y

    def plan(self, start: Sequence[float], goal: Sequence[float]) -> List[Tuple[float, float]]:
        path = self.planner.find_path(start, goal)
        if path is None:
            raise PathConstructionError(f"no path from {tuple(start[:2])} to {tuple(goal[:2])}")
        return path

    # --------------------
    # Serializacion
    # --------------------
    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Warehouse":
        return cls(
            bounds=Rect.from_list(data["bounds"]),
            regions={k: Rect.from_list(v) for k, v in data["regions"].items()},
            walls=[Rect.from_list(w) for w in data.get("walls", [])],
            margin=float(data.get("margin", CONF.TASKING.WALL_MARGIN)),
        )


def default_warehouse() -> Warehouse:
    """Almacen 20 x 12 con dos casas, tres puntos de coleccion, zona de recogida y dos muros."""
    return Warehouse(
        bounds=Rect(0.0, 0.0, 20.0, 12.0),
        regions={
            "H-1": Rect(1.0, 1.0, 4.0, 3.0),
            "H-2": Rect(16.0, 1.0, 19.0, 3.0),
            "CP-1": Rect(3.0, 8.0, 5.0, 10.0),
            "CP-2": Rect(9.0, 3.0, 11.0, 5.0),
            "CP-3": Rect(15.0, 8.0, 17.0, 10.0),
            "PICKUP": Rect(9.0, 9.0, 11.0, 11.0),
        },
        walls=[Rect(6.5, 3.0, 7.5, 7.0), Rect(12.5, 3.0, 13.5, 7.0)],
    )

"""
Entidades fisicas del entorno.
"""
from __future__ import annotations
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from environment.geometry import Rect, distance
from environment.models import Model
from utils.errors import ConfigurationError


@dataclass(frozen=True)
class Disc:
    radius: float = 0.0


@dataclass(frozen=True)
class Box:
    """Caja alineada centrada en la pose de la entidad."""
    width: float
    height: float


Shape = Union[Disc, Box]


class Entity:
    """
    Descripción
        CLASE: Objeto fisico del mundo: pose, modelo (None = obstaculo estatico) y forma.

    Atributos
        - id (int)
        - pose (np.ndarray): estado; dimension = model.state_dim si hay modelo.
        - model (Optional[Model])
        - shape (Shape)

    Excepciones
        - ConfigurationError: dimension de la pose distinta de la del modelo.
    """

    def __init__(self, entity_id: int, pose: Sequence[float], model: Optional[Model] = None,
                 shape: Optional[Shape] = None):
        self.id = int(entity_id)
        self.pose = np.asarray(pose, dtype=float).copy()
        self.model = model
        self.shape = shape or Disc(0.0)
        if model is not None and self.pose.shape != (model.state_dim,):
            raise ConfigurationError(
                f"entity {self.id}: pose has dimension {self.pose.size}, model {model.name} expects {model.state_dim}"
            )

    @property
    def static(self) -> bool:
        return self.model is None

    @property
    def position(self) -> np.ndarray:
        return self.pose[:2]

    def footprint(self) -> Union[Rect, Disc]:
        if isinstance(self.shape, Box):
            cx, cy = float(self.pose[0]), float(self.pose[1])
            hw, hh = 0.5 * self.shape.width, 0.5 * self.shape.height
            return Rect(cx - hw, cy - hh, cx + hw, cy + hh)
        return self.shape

    def touches_rect(self, rect: Rect) -> bool:
        fp = self.footprint()
        if isinstance(fp, Rect):
            return fp.overlaps(rect)
        return rect.distance_to(self.position) < fp.radius or rect.strictly_contains(self.position, 0.0)

    def touches(self, other: "Entity") -> bool:
        mine, theirs = self.footprint(), other.footprint()
        if isinstance(theirs, Rect):
            return self.touches_rect(theirs)
        if isinstance(mine, Rect):
            return other.touches_rect(mine)
        if mine.radius <= 0.0 and theirs.radius <= 0.0:
            return False
        return distance(self.position, other.position) < mine.radius + theirs.radius

    def copy(self) -> "Entity":
        return Entity(self.id, self.pose, self.model, self.shape)

    def __repr__(self) -> str:
        kind = self.model.name if self.model else "static"
        return f"Entity(id={self.id}, {kind}, pose={self.pose.tolist()})"

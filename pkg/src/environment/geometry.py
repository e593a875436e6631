"""
Geometria plana: rectangulos alineados con los ejes y utilidades de angulos.

Coordenadas (x, y) como tuplas de floats o arrays numpy de longitud >= 2; solo
se usan las dos primeras componentes (el rumbo de un uniciclo se ignora).
"""
from __future__ import annotations
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from configs.package import CONF

Vector2 = Tuple[float, float]


def wrap_angle(angle: float) -> float:
    """Lleva un angulo a [-pi, pi). El rumbo de los modelos se guarda sin envolver."""
    return (float(angle) + CONF.CONST.PI) % CONF.CONST.TWO_PI - CONF.CONST.PI


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(float(a[0]) - float(b[0]), float(a[1]) - float(b[1]))


@dataclass(frozen=True)
class Rect:
    """Caja [lo_x, hi_x] x [lo_y, hi_y] (cerrada)."""
    lo_x: float
    lo_y: float
    hi_x: float
    hi_y: float

    def __post_init__(self):
        if self.hi_x < self.lo_x or self.hi_y < self.lo_y:
            raise ValueError(f"degenerate rectangle {self}")

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "Rect":
        lo_x, lo_y, hi_x, hi_y = (float(v) for v in values)
        return cls(lo_x, lo_y, hi_x, hi_y)

    @property
    def center(self) -> Vector2:
        return (0.5 * (self.lo_x + self.hi_x), 0.5 * (self.lo_y + self.hi_y))

    @property
    def half_extents(self) -> Vector2:
        return (0.5 * (self.hi_x - self.lo_x), 0.5 * (self.hi_y - self.lo_y))

    def contains(self, p: Sequence[float], tol: float = 0.0) -> bool:
        return (self.lo_x - tol <= p[0] <= self.hi_x + tol) and (self.lo_y - tol <= p[1] <= self.hi_y + tol)

    def strictly_contains(self, p: Sequence[float], tol: float = CONF.CONST.EPS) -> bool:
        return (self.lo_x + tol < p[0] < self.hi_x - tol) and (self.lo_y + tol < p[1] < self.hi_y - tol)

    def inflate(self, margin: float) -> "Rect":
        return Rect(self.lo_x - margin, self.lo_y - margin, self.hi_x + margin, self.hi_y + margin)

    def corners(self) -> List[Vector2]:
        return [(self.lo_x, self.lo_y), (self.hi_x, self.lo_y), (self.hi_x, self.hi_y), (self.lo_x, self.hi_y)]

    def distance_to(self, p: Sequence[float]) -> float:
        """Distancia euclidiana de un punto a la caja (0 dentro)."""
        dx = max(self.lo_x - p[0], 0.0, p[0] - self.hi_x)
        dy = max(self.lo_y - p[1], 0.0, p[1] - self.hi_y)
        return math.hypot(dx, dy)

    def overlaps(self, other: "Rect") -> bool:
        return not (other.lo_x > self.hi_x or other.hi_x < self.lo_x or other.lo_y > self.hi_y or other.hi_y < self.lo_y)

    def signed_margin(self, p: Sequence[float]) -> float:
        """Margen de pertenencia: > 0 dentro, < 0 fuera (distancia al borde por ejes)."""
        return min(p[0] - self.lo_x, self.hi_x - p[0], p[1] - self.lo_y, self.hi_y - p[1])

    def blocks_segment(self, a: Sequence[float], b: Sequence[float]) -> bool:
        """
        Descripción
            MÉTODO: Indica si el segmento a-b atraviesa el interior abierto de la caja
            (recorte Liang-Barsky). Un segmento que solo toca o recorre el borde no bloquea.
        """
        ax, ay = float(a[0]), float(a[1])
        dx, dy = float(b[0]) - ax, float(b[1]) - ay
        t0, t1 = 0.0, 1.0
        for p, q in ((-dx, ax - self.lo_x), (dx, self.hi_x - ax), (-dy, ay - self.lo_y), (dy, self.hi_y - ay)):
            if p == 0.0:
                if q < 0.0:
                    return False
                continue
            r = q / p
            if p < 0.0:
                t0 = max(t0, r)
            else:
                t1 = min(t1, r)
            if t0 > t1:
                return False
        mid = 0.5 * (t0 + t1)
        return self.strictly_contains((ax + mid * dx, ay + mid * dy))

"""
Rutas poligonales abiertas parametrizadas por longitud de arco.

Interfaz usada por el seguimiento de rutas:
- get_param(position, last_param) -> float
  Longitud de arco del punto de la ruta mas cercano a `position`. `last_param`
  centra una busqueda local por segmentos (ventana `search_window`); si la ventana
  no da un candidato razonable se busca en toda la ruta.
- get_position(param) -> (x, y)
  Punto de la ruta a longitud de arco `param` (recortado a [0, length]).
"""
from __future__ import annotations
import bisect
import math
from typing import List, Sequence, Tuple

Vector2 = Tuple[float, float]


def _dot(a: Vector2, b: Vector2) -> float:
    return a[0] * b[0] + a[1] * b[1]


def _sub(a: Vector2, b: Vector2) -> Vector2:
    return (a[0] - b[0], a[1] - b[1])


def _lerp(a: Vector2, b: Vector2, t: float) -> Vector2:
    return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def _dist2(a: Vector2, b: Vector2) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


class PolylinePath:
    """
    Ruta representada por una lista de vertices, abierta.
    Parametrizacion: longitud de arco desde el primer vertice.
    """

    def __init__(self, points: Sequence[Sequence[float]], search_window: int = 4) -> None:
        if len(points) < 2:
            raise ValueError("PolylinePath requires at least 2 points")
        self.points: List[Vector2] = [(float(p[0]), float(p[1])) for p in points]
        self.segment_count = len(self.points) - 1
        self.search_window = max(1, int(search_window))
        # longitud acumulada al inicio de cada vertice
        self.cumulative = [0.0]
        for a, b in zip(self.points, self.points[1:]):
            self.cumulative.append(self.cumulative[-1] + math.sqrt(_dist2(a, b)))

    @property
    def length(self) -> float:
        return self.cumulative[-1]

    @property
    def end(self) -> Vector2:
        return self.points[-1]

    def _project(self, seg_idx: int, p: Vector2) -> Tuple[float, float]:
        a, b = self.points[seg_idx], self.points[seg_idx + 1]
        ab = _sub(b, a)
        ab_len2 = _dot(ab, ab)
        t = 0.0 if ab_len2 == 0 else max(0.0, min(1.0, _dot(_sub(p, a), ab) / ab_len2))
        d2 = _dist2(_lerp(a, b, t), p)
        return d2, self.cumulative[seg_idx] + t * math.sqrt(ab_len2)

    def _segment_of(self, param: float) -> int:
        idx = bisect.bisect_right(self.cumulative, param) - 1
        return max(0, min(self.segment_count - 1, idx))

    def get_param(self, position: Sequence[float], last_param: float = 0.0) -> float:
        p = (float(position[0]), float(position[1]))
        last_seg = self._segment_of(last_param or 0.0)
        best_d2, best_param = math.inf, 0.0
        for seg_idx in range(max(0, last_seg - self.search_window),
                             min(self.segment_count, last_seg + self.search_window + 1)):
            d2, param = self._project(seg_idx, p)
            if d2 < best_d2:
                best_d2, best_param = d2, param
        if best_d2 > 1e6:
            for seg_idx in range(self.segment_count):
                d2, param = self._project(seg_idx, p)
                if d2 < best_d2:
                    best_d2, best_param = d2, param
        return float(best_param)

    def get_position(self, param: float) -> Vector2:
        s = max(0.0, min(self.length, float(param)))
        seg_idx = self._segment_of(s)
        seg_len = self.cumulative[seg_idx + 1] - self.cumulative[seg_idx]
        t = 0.0 if seg_len == 0 else (s - self.cumulative[seg_idx]) / seg_len
        return _lerp(self.points[seg_idx], self.points[seg_idx + 1], t)

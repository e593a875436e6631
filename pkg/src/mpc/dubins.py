"""
Intencion del intruso: camino de Dubins a velocidad maxima constante.

Descripción
-------------------
    MÓDULO: Construye la familia CSC/CCC (LSL, RSR, LSR, RSL, LRL, RLR) por
    tangentes entre circulos de giro de radio v_max / min(u_max, -u_min), valida
    cada candidato integrando su punto final y se queda con el mas corto.

    dubins_input(t) = (sigma_D(t + t_e) - sigma_D(t)) / t_e, recortado a las
    cotas de giro; 0 tras la llegada.
"""
from __future__ import annotations
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from configs.package import CONF
from utils.errors import PathConstructionError

TWO_PI = CONF.CONST.TWO_PI
_SNAP = 1e-9


def _mod(angle: float) -> float:
    m = angle % TWO_PI
    return 0.0 if m > TWO_PI - _SNAP or m < _SNAP else m


def _angle(v: Sequence[float]) -> float:
    return math.atan2(v[1], v[0])


@dataclass(frozen=True)
class Segment:
    kind: str      # "L", "S" o "R"
    length: float  # arco (rad) para L/R, distancia para S


def _advance(state: Tuple[float, float, float], seg: Segment, r: float, amount: float) -> Tuple[float, float, float]:
    """Avanza `amount` (en unidades del segmento) a lo largo de `seg`."""
    x, y, th = state
    if seg.kind == "S":
        return x + amount * math.cos(th), y + amount * math.sin(th), th
    if seg.kind == "L":
        return x + r * (math.sin(th + amount) - math.sin(th)), y + r * (math.cos(th) - math.cos(th + amount)), th + amount
    return x + r * (math.sin(th) - math.sin(th - amount)), y + r * (math.cos(th - amount) - math.cos(th)), th - amount


def _candidates(p0, th0, p1, th1, r) -> List[Tuple[str, List[Segment]]]:
    lc0 = (p0[0] - r * math.sin(th0), p0[1] + r * math.cos(th0))
    rc0 = (p0[0] + r * math.sin(th0), p0[1] - r * math.cos(th0))
    lc1 = (p1[0] - r * math.sin(th1), p1[1] + r * math.cos(th1))
    rc1 = (p1[0] + r * math.sin(th1), p1[1] - r * math.cos(th1))
    out = []

    def vec(a, b):
        return (b[0] - a[0], b[1] - a[1])

    # LSL / RSR: tangente exterior
    v = vec(lc0, lc1)
    phi = _angle(v)
    out.append(("LSL", [Segment("L", _mod(phi - th0)), Segment("S", math.hypot(*v)), Segment("L", _mod(th1 - phi))]))
    v = vec(rc0, rc1)
    phi = _angle(v)
    out.append(("RSR", [Segment("R", _mod(th0 - phi)), Segment("S", math.hypot(*v)), Segment("R", _mod(phi - th1))]))
    # LSR / RSL: tangente interior (requiere D >= 2r)
    v = vec(lc0, rc1)
    d = math.hypot(*v)
    if d >= 2 * r:
        straight = math.sqrt(max(0.0, d * d - 4 * r * r))
        phi = _angle(v) + math.atan2(2 * r, straight)
        out.append(("LSR", [Segment("L", _mod(phi - th0)), Segment("S", straight), Segment("R", _mod(phi - th1))]))
    v = vec(rc0, lc1)
    d = math.hypot(*v)
    if d >= 2 * r:
        straight = math.sqrt(max(0.0, d * d - 4 * r * r))
        phi = _angle(v) - math.atan2(2 * r, straight)
        out.append(("RSL", [Segment("R", _mod(th0 - phi)), Segment("S", straight), Segment("L", _mod(th1 - phi))]))
    # LRL / RLR: circulo intermedio tangente a ambos (D < 4r)
    for word, c0, c1, first in (("LRL", lc0, lc1, "L"), ("RLR", rc0, rc1, "R")):
        v = vec(c0, c1)
        d = math.hypot(*v)
        if d >= 4 * r or d == 0.0:
            continue
        h = math.sqrt(4 * r * r - (d / 2) ** 2)
        mid = (c0[0] + v[0] / 2, c0[1] + v[1] / 2)
        normal = (-v[1] / d, v[0] / d)
        for side in (1.0, -1.0):
            c2 = (mid[0] + side * h * normal[0], mid[1] + side * h * normal[1])
            a = _angle(vec(c0, c2))
            b = _angle(vec(c1, c2))
            if first == "L":
                phi1, phi2 = a + math.pi / 2, b + math.pi / 2
                segs = [Segment("L", _mod(phi1 - th0)), Segment("R", _mod(phi1 - phi2)), Segment("L", _mod(th1 - phi2))]
            else:
                phi1, phi2 = a - math.pi / 2, b - math.pi / 2
                segs = [Segment("R", _mod(th0 - phi1)), Segment("L", _mod(phi2 - phi1)), Segment("R", _mod(phi2 - th1))]
            out.append((word, segs))
    return out


class DubinsIntent:
    """
    Descripción
        CLASE: Camino de Dubins de `start` a `target` recorrido a `v_max`.

    Argumentos
        - start / target (Sequence[float]): (x, y, sigma).
        - v_max (float): velocidad lineal constante.
        - u_bounds (Tuple[float, float]): cotas de velocidad angular (u_min < 0 < u_max).
        - t_e (float): periodo usado por `dubins_input`.

    Atributos
        - radius (float): radio de giro minimo.
        - word (str): tipo de camino elegido (p. ej. "LSL").
        - segments (List[Segment])
        - length / duration (float)

    Excepciones
        - PathConstructionError: cotas que no permiten girar en ambos sentidos o
          ningun candidato alcanza el objetivo.
    """

    def __init__(self, start: Sequence[float], target: Sequence[float], v_max: float,
                 u_bounds: Tuple[float, float], t_e: float = 1.0):
        self.start = tuple(float(v) for v in start)
        self.target = tuple(float(v) for v in target)
        self.v_max = float(v_max)
        self.u_bounds = (float(u_bounds[0]), float(u_bounds[1]))
        self.t_e = float(t_e)
        if not (self.v_max > 0 and self.u_bounds[0] < 0 < self.u_bounds[1]):
            raise PathConstructionError("Dubins intent needs v_max > 0 and turn-rate bounds around 0")
        self.turn_rate = min(self.u_bounds[1], -self.u_bounds[0])
        self.radius = self.v_max / self.turn_rate
        self.word, self.segments = self._shortest()
        self.length = sum(s.length * (self.radius if s.kind != "S" else 1.0) for s in self.segments)
        self.duration = self.length / self.v_max

    def _shortest(self) -> Tuple[str, List[Segment]]:
        p0, th0 = self.start[:2], self.start[2]
        p1, th1 = self.target[:2], self.target[2]
        scale = 1.0 + math.hypot(p1[0] - p0[0], p1[1] - p0[1])
        best: Optional[Tuple[float, str, List[Segment]]] = None
        for word, segs in _candidates(p0, th0, p1, th1, self.radius):
            state = (p0[0], p0[1], th0)
            for seg in segs:
                state = _advance(state, seg, self.radius, seg.length)
            heading_err = abs(math.remainder(state[2] - th1, TWO_PI))
            if math.hypot(state[0] - p1[0], state[1] - p1[1]) > 1e-6 * scale or heading_err > 1e-6:
                continue
            total = sum(s.length * (self.radius if s.kind != "S" else 1.0) for s in segs)
            if best is None or total < best[0] - 1e-12:
                best = (total, word, segs)
        if best is None:
            raise PathConstructionError(f"no Dubins path from {self.start} to {self.target}")
        return best[1], best[2]

    def state_at(self, t: float) -> np.ndarray:
        """Estado sobre el camino en el instante t (se mantiene en el objetivo tras llegar)."""
        remaining = max(0.0, float(t)) * self.v_max
        state = self.start
        for seg in self.segments:
            seg_dist = seg.length * (self.radius if seg.kind != "S" else 1.0)
            if remaining >= seg_dist:
                state = _advance(state, seg, self.radius, seg.length)
                remaining -= seg_dist
                continue
            amount = remaining if seg.kind == "S" else remaining / self.radius
            return np.array(_advance(state, seg, self.radius, amount))
        return np.array(state)

    def heading_at(self, t: float) -> float:
        return float(self.state_at(t)[2])

    def arrived(self, t: float) -> bool:
        return float(t) >= self.duration - 1e-9

    def dubins_input(self, t: float) -> float:
        if self.arrived(t):
            return 0.0
        rate = (self.heading_at(t + self.t_e) - self.heading_at(t)) / self.t_e
        return float(min(self.u_bounds[1], max(self.u_bounds[0], rate)))


def dubins_input(intent: DubinsIntent, t: float) -> float:
    return intent.dubins_input(t)

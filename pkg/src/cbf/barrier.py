"""
Construccion de funciones barrera a partir de tareas STL.

Descripción
-------------------
    MÓDULO: Para F[a,b] mu o G[a,b] mu con mu concavo (predicado afin o bola):

        b(x, t) = mu(x) - gamma(t)

    gamma va lineal desde gamma(t0) = mu(x0) - delta0 hasta 0 en t*, y vale 0
    despues (t* = t0 + b para F, t* = t0 + a para G), con
    delta0 = min(DELTA_MAX, |mu(x0)| / 2). Asi b(x0, t0) = delta0 y b >= 0 para
    t >= t* implica mu(x) >= 0 dentro de la ventana.

    Las tareas independientes de un agente se combinan con smooth-min
        b = -(1/kappa) log sum_j exp(-kappa b_j)  <=  min_j b_j
"""
from __future__ import annotations
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from configs.package import CONF
from logic.formula import Always, And, Eventually, Formula, NormPredicate, Predicate
from utils.errors import UnsupportedTaskError

ConcavePredicate = Union[Predicate, NormPredicate]
TIME_TOL = 1e-9


def _predicate_gradient(pred: ConcavePredicate, x: np.ndarray) -> np.ndarray:
    if isinstance(pred, Predicate):
        return pred.gradient(x.size)
    return pred.gradient(x)


@dataclass(frozen=True)
class BarrierTask:
    """
    Descripción
        CLASE: Barrera temporal de una tarea STL.

    Atributos
        - predicate (ConcavePredicate): mu.
        - operator (str): "F" o "G".
        - window (Tuple[float, float]): ventana absoluta [t0 + a, t0 + b].
        - t0 / t_star (float)
        - gamma0 / delta0 (float)
        - lam (float): pendiente clase-K (> 0).
        - nu (float): margen de muestreo (>= 0); endurece la restriccion.
        - kind (str): "independent" o "collaborative".
        - edge (Optional[Tuple[int, int]]): (lider, seguidor) si es colaborativa.
        - text (str): formula original.
    """
    predicate: ConcavePredicate
    operator: str
    window: Tuple[float, float]
    t0: float
    t_star: float
    gamma0: float
    delta0: float
    lam: float = CONF.CBF.LAMBDA
    nu: float = 0.0
    kind: str = "independent"
    edge: Optional[Tuple[int, int]] = None
    text: str = ""

    def gamma(self, t: float) -> float:
        if t >= self.t_star or self.t_star - self.t0 <= TIME_TOL:
            return 0.0
        frac = (max(t, self.t0) - self.t0) / (self.t_star - self.t0)
        return self.gamma0 * (1.0 - frac)

    def time_derivative(self, t: float, dt: Optional[float] = None) -> float:
        """
        d b / d t = -d gamma / d t. Con `dt` se usa la secante sobre
        [t, t + dt] (exacta para la retencion de orden cero).
        """
        if dt is not None and dt > 0:
            return -(self.gamma(t + dt) - self.gamma(t)) / dt
        if t >= self.t_star or self.t_star - self.t0 <= TIME_TOL:
            return 0.0
        return self.gamma0 / (self.t_star - self.t0)

    def predicate_value(self, x) -> float:
        return float(self.predicate.value(np.asarray(x, dtype=float)))

    def value(self, x, t: float) -> float:
        return self.predicate_value(x) - self.gamma(t)

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return _predicate_gradient(self.predicate, x)

    def active(self, t: float) -> bool:
        return t <= self.window[1] + TIME_TOL


def build_barrier(task: Formula, x0: Sequence[float], t0: float = 0.0, lam: float = CONF.CBF.LAMBDA,
                  nu: float = 0.0, kind: str = "independent",
                  edge: Optional[Tuple[int, int]] = None) -> BarrierTask:
    """
    Descripción
        FUNCIÓN: Construye la barrera de F[a,b] mu o G[a,b] mu en (x0, t0).

    Excepciones
        - UnsupportedTaskError: operador sin intervalo, nodo distinto de F/G,
          predicado no concavo o parametros lam <= 0 / nu < 0.
    """
    if not isinstance(task, (Always, Eventually)):
        raise UnsupportedTaskError(f"barrier tasks must be F[a,b] mu or G[a,b] mu, got {task.to_text()}")
    if task.interval is None:
        raise UnsupportedTaskError(f"barrier task needs a bounded interval: {task.to_text()}")
    pred = task.child
    if not isinstance(pred, (Predicate, NormPredicate)) or not pred.concave:
        raise UnsupportedTaskError(f"barrier predicate must be concave (affine or norm <= r): {task.to_text()}")
    if not lam > 0:
        raise UnsupportedTaskError(f"class-K slope must be > 0, got {lam}")
    if nu < 0:
        raise UnsupportedTaskError(f"sampled-data margin must be >= 0, got {nu}")
    x0 = np.asarray(x0, dtype=float)
    mu0 = float(pred.value(x0))
    delta0 = min(CONF.CBF.DELTA_MAX, abs(mu0) / 2.0)
    a, b = float(task.interval.a), float(task.interval.b)
    operator = "F" if isinstance(task, Eventually) else "G"
    t_star = t0 + (b if operator == "F" else a)
    return BarrierTask(
        predicate=pred, operator=operator, window=(t0 + a, t0 + b), t0=float(t0), t_star=float(t_star),
        gamma0=mu0 - delta0, delta0=delta0, lam=float(lam), nu=float(nu), kind=kind, edge=edge,
        text=task.to_text(),
    )


def split_conjunction(formula: Formula) -> List[Formula]:
    if isinstance(formula, And):
        return split_conjunction(formula.left) + split_conjunction(formula.right)
    return [formula]


def build_barriers(formula: Formula, x0: Sequence[float], t0: float = 0.0, **kwargs) -> List[BarrierTask]:
    """Una barrera por conjunto de nivel superior de `formula`."""
    return [build_barrier(part, x0, t0, **kwargs) for part in split_conjunction(formula)]


def smooth_min(values: Sequence[float], kappa: float = CONF.CBF.SMOOTH_MIN_KAPPA) -> Tuple[float, np.ndarray]:
    """
    Retorno
        - (valor, pesos): smooth-min y sus derivadas parciales (suman 1).
    """
    v = np.asarray(values, dtype=float)
    if v.size == 1:
        return float(v[0]), np.ones(1)
    m = float(v.min())
    z = np.exp(-kappa * (v - m))
    s = float(z.sum())
    return m - math.log(s) / kappa, z / s

"""
QP de norma minima con restricciones afines y caja, por enumeracion de activos.

    min ||u||  s.a.  a_j . u >= beta_j  (j = 1..m),  lo <= u <= hi

El optimo (unico, la funcion es estrictamente convexa) es la proyeccion del
origen sobre el poliedro; coincide con la solucion de minima norma de algun
subconjunto linealmente independiente de restricciones activas. Se enumeran
todos los subconjuntos de tamano <= dim, se resuelve cada uno en forma cerrada
(u = A^T (A A^T)^-1 b) y se elige el factible de menor norma.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence, Tuple

import numpy as np

from configs.package import CONF
from utils.logger import get_logger

log = get_logger("QP")

Constraint = Tuple[Sequence[float], float]


@dataclass
class QpResult:
    """
    Atributos
        - u (np.ndarray): solucion (o mejor esfuerzo si no es factible).
        - feasible (bool)
        - violations (Tuple[float, ...]): deficit de cada restriccion afin en la
          caja: max(0, beta_j - max_{u en caja} a_j . u) si no es factible, si no
          el deficit en `u`.
        - active (Tuple[str, ...]): restricciones activas ("c0", "lo1", "hi0"...).
    """
    u: np.ndarray
    feasible: bool
    violations: Tuple[float, ...] = ()
    active: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def max_violation(self) -> float:
        return max(self.violations, default=0.0)


def _rows(constraints: Sequence[Constraint], lo: np.ndarray, hi: np.ndarray):
    """Todas las restricciones como G u >= h con etiqueta."""
    d = lo.size
    G, h, names = [], [], []
    for j, (a, beta) in enumerate(constraints):
        G.append(np.asarray(a, dtype=float).reshape(d))
        h.append(float(beta))
        names.append(f"c{j}")
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        G.append(e)
        h.append(float(lo[i]))
        names.append(f"lo{i}")
        G.append(-e)
        h.append(-float(hi[i]))
        names.append(f"hi{i}")
    return np.array(G), np.array(h), names


def solve_min_norm(constraints: Sequence[Constraint], lo: Sequence[float], hi: Sequence[float],
                   tol: float = CONF.CBF.QP_TOL) -> QpResult:
    """
    Descripción
        FUNCIÓN: Minima norma euclidea en la caja [lo, hi] sujeta a a_j . u >= beta_j.

    Argumentos
        - constraints (Sequence[(a, beta)]): restricciones afines (puede ser vacia).
        - lo / hi (Sequence[float]): caja (ya escalada por gamma).
        - tol (float): tolerancia de factibilidad.

    Retorno
        - QpResult: si no hay punto factible, `feasible` es False, `violations`
          trae el deficit de cada restriccion y `u` es el punto de la caja con
          menor deficit total entre los candidatos.
    """
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    d = lo.size
    G, h, names = _rows(constraints, lo, hi)
    m = len(constraints)

    best: Optional[np.ndarray] = None
    best_norm = np.inf
    best_active: Tuple[int, ...] = ()
    fallback: Optional[np.ndarray] = None
    fallback_def = np.inf
    for size in range(0, d + 1):
        for subset in combinations(range(len(h)), size):
            if size == 0:
                u = np.zeros(d)
            else:
                A = G[list(subset)]
                gram = A @ A.T
                if abs(np.linalg.det(gram)) < 1e-12:
                    continue
                u = A.T @ np.linalg.solve(gram, h[list(subset)])
            slack = G @ u - h
            if np.all(slack >= -tol):
                n = float(np.linalg.norm(u))
                if n < best_norm - 1e-12:
                    best, best_norm, best_active = u, n, subset
            else:
                uc = np.clip(u, lo, hi)
                deficit = float(np.maximum(h[:m] - G[:m] @ uc, 0.0).sum())
                if deficit < fallback_def:
                    fallback, fallback_def = uc, deficit
    if best is not None:
        active = tuple(names[i] for i in best_active)
        viol = tuple(float(max(0.0, h[j] - G[j] @ best)) for j in range(m))
        return QpResult(best, True, viol, active)

    # infactible: deficit de cada restriccion frente a su maximo en la caja
    viol = []
    for j in range(m):
        a = G[j]
        reach = float(np.sum(np.maximum(a * lo, a * hi)))
        viol.append(max(0.0, float(h[j]) - reach))
    u = fallback if fallback is not None else np.clip(np.zeros(d), lo, hi)
    if max(viol, default=0.0) == 0.0:
        # cada restriccion es alcanzable por separado pero no a la vez
        viol = [max(0.0, float(h[j] - G[j] @ u)) for j in range(m)]
    log.debug("min-norm QP infeasible, violations %s", viol)
    return QpResult(u, False, tuple(viol), ())

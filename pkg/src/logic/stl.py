"""
Semantica cuantitativa STL sobre trazas muestreadas.

Descripción
-------------------
    MÓDULO: La robustez se evalua solo en las muestras de la traza (sin
    interpolar), coherente con la retencion de orden cero:
        - predicado        -> a.x(t) + c   (norma: r - ||e(x)||)
        - not / and / or   -> -rho, min, max
        - G[a,b] / F[a,b]  -> min / max sobre las muestras en [t+a, t+b]
        - phi U[a,b] psi   -> max_{t'} min(rho_psi(t'), min_{t <= t'' < t'} rho_phi(t''))
        - X                -> muestra siguiente
        - atomos           -> +inf / -inf segun las etiquetas de la muestra
    Ventana vacia: F -> -inf, G -> +inf. Sin intervalo, G/F/U recorren el resto
    de la traza.

Excepciones
-------------------
    - InsufficientTraceError: el horizonte de la formula supera la traza.
"""
from __future__ import annotations
import bisect
import math
from typing import AbstractSet, Dict, Optional, Sequence, Tuple

import numpy as np

from logic.formula import (
    Always,
    And,
    AtomicProp,
    Eventually,
    FalseF,
    Formula,
    Next,
    NormPredicate,
    Not,
    Or,
    Predicate,
    TrueF,
    Until,
)
from utils.errors import ConfigurationError, InsufficientTraceError, UnknownAtomError, UnsupportedFormulaError

TIME_TOL = 1e-9


class Trace:
    """
    Descripción
        CLASE: Senal muestreada: tiempos estrictamente crecientes y un vector de
        estado por muestra; etiquetas opcionales (proposiciones ciertas).

    Argumentos
        - times (Sequence[float])
        - states (array (n, d) o (n,))
        - labels (Optional[Sequence[set]])
    """

    def __init__(self, times: Sequence[float], states, labels: Optional[Sequence[AbstractSet[str]]] = None):
        self.times = np.asarray(times, dtype=float)
        if self.times.size == 0:
            raise ConfigurationError("trace must be non-empty")
        states = np.asarray(states, dtype=float)
        if states.ndim < 2 and (states.size == 0 or states.size % self.times.size):
            raise ConfigurationError("trace times and states differ in length")
        self.states = states.reshape(len(self.times), -1) if states.ndim < 2 else states
        if self.states.shape[0] != self.times.size:
            raise ConfigurationError("trace times and states differ in length")
        if np.any(np.diff(self.times) <= 0):
            raise ConfigurationError("trace times must be strictly increasing")
        self.labels = None if labels is None else [frozenset(l) for l in labels]
        self._t = self.times.tolist()

    @classmethod
    def uniform(cls, states, dt: float = 1.0, t0: float = 0.0, labels=None) -> "Trace":
        states = np.asarray(states, dtype=float)
        return cls(t0 + dt * np.arange(states.shape[0]), states, labels)

    def __len__(self) -> int:
        return self.times.size

    def index_of(self, t: float) -> int:
        i = bisect.bisect_left(self._t, float(t) - TIME_TOL)
        if i >= len(self._t):
            raise InsufficientTraceError(f"time {t} is beyond the trace end {self._t[-1]}")
        return i

    def window(self, i: int, interval) -> range:
        """Indices de muestra en [t_i + a, t_i + b] (o hasta el final sin intervalo)."""
        if interval is None:
            return range(i, len(self._t))
        t = self._t[i]
        if t + interval.b > self._t[-1] + TIME_TOL:
            raise InsufficientTraceError(
                f"formula needs the trace up to t={t + interval.b}, trace ends at {self._t[-1]}"
            )
        lo = bisect.bisect_left(self._t, t + interval.a - TIME_TOL)
        hi = bisect.bisect_right(self._t, t + interval.b + TIME_TOL)
        return range(lo, hi)


class _Robustness:
    def __init__(self, trace: Trace):
        self.trace = trace
        self.cache: Dict[Tuple[int, int], float] = {}

    def rho(self, f: Formula, i: int) -> float:
        key = (id(f), i)
        hit = self.cache.get(key)
        if hit is None:
            hit = self._rho(f, i)
            self.cache[key] = hit
        return hit

    def _rho(self, f: Formula, i: int) -> float:
        tr = self.trace
        if isinstance(f, (Predicate, NormPredicate)):
            return f.value(tr.states[i])
        if isinstance(f, TrueF):
            return math.inf
        if isinstance(f, FalseF):
            return -math.inf
        if isinstance(f, AtomicProp):
            if tr.labels is None:
                raise UnknownAtomError(f"trace has no labels for atomic proposition {f.name!r}")
            return math.inf if f.name in tr.labels[i] else -math.inf
        if isinstance(f, Not):
            return -self.rho(f.child, i)
        if isinstance(f, And):
            return min(self.rho(f.left, i), self.rho(f.right, i))
        if isinstance(f, Or):
            return max(self.rho(f.left, i), self.rho(f.right, i))
        if isinstance(f, Next):
            if i + 1 >= len(tr):
                raise InsufficientTraceError("next operator at the last sample")
            return self.rho(f.child, i + 1)
        if isinstance(f, Always):
            return min((self.rho(f.child, j) for j in tr.window(i, f.interval)), default=math.inf)
        if isinstance(f, Eventually):
            return max((self.rho(f.child, j) for j in tr.window(i, f.interval)), default=-math.inf)
        if isinstance(f, Until):
            best = -math.inf
            prefix = math.inf
            window = tr.window(i, f.interval)
            for j in range(i, window.stop):
                if j >= window.start:
                    best = max(best, min(self.rho(f.right, j), prefix))
                prefix = min(prefix, self.rho(f.left, j))
                if prefix <= best:
                    break
            return best
        raise UnsupportedFormulaError(f"unknown formula node {type(f).__name__}")


class _Boolean:
    """Evaluador booleano independiente (predicado cierto si valor >= 0)."""

    def __init__(self, trace: Trace):
        self.trace = trace
        self.cache: Dict[Tuple[int, int], bool] = {}

    def sat(self, f: Formula, i: int) -> bool:
        key = (id(f), i)
        hit = self.cache.get(key)
        if hit is None:
            hit = self._sat(f, i)
            self.cache[key] = hit
        return hit

    def _sat(self, f: Formula, i: int) -> bool:
        tr = self.trace
        if isinstance(f, (Predicate, NormPredicate)):
            return f.value(tr.states[i]) >= 0.0
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, AtomicProp):
            if tr.labels is None:
                raise UnknownAtomError(f"trace has no labels for atomic proposition {f.name!r}")
            return f.name in tr.labels[i]
        if isinstance(f, Not):
            return not self.sat(f.child, i)
        if isinstance(f, And):
            return self.sat(f.left, i) and self.sat(f.right, i)
        if isinstance(f, Or):
            return self.sat(f.left, i) or self.sat(f.right, i)
        if isinstance(f, Next):
            if i + 1 >= len(tr):
                raise InsufficientTraceError("next operator at the last sample")
            return self.sat(f.child, i + 1)
        if isinstance(f, Always):
            return all(self.sat(f.child, j) for j in tr.window(i, f.interval))
        if isinstance(f, Eventually):
            return any(self.sat(f.child, j) for j in tr.window(i, f.interval))
        if isinstance(f, Until):
            window = tr.window(i, f.interval)
            for j in range(i, window.stop):
                if j >= window.start and self.sat(f.right, j):
                    return True
                if not self.sat(f.left, j):
                    return False
            return False
        raise UnsupportedFormulaError(f"unknown formula node {type(f).__name__}")


def stl_robustness(trace: Trace, formula: Formula, t: float = 0.0) -> float:
    """
    Descripción
        FUNCIÓN: Robustez de `formula` en la muestra de tiempo t (tolerancia 1e-9;
        si t cae entre muestras se usa la siguiente).
    """
    return _Robustness(trace).rho(formula, trace.index_of(t))


def stl_robustness_series(trace: Trace, formula: Formula) -> np.ndarray:
    """Robustez en cada muestra donde el horizonte cabe en la traza (NaN en el resto)."""
    evaluator = _Robustness(trace)
    out = np.full(len(trace), np.nan)
    for i in range(len(trace)):
        try:
            out[i] = evaluator.rho(formula, i)
        except InsufficientTraceError:
            continue
    return out


def stl_satisfies(trace: Trace, formula: Formula, t: float = 0.0) -> bool:
    """Satisfaccion booleana en la muestra de tiempo t."""
    return _Boolean(trace).sat(formula, trace.index_of(t))

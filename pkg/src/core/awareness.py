"""
Vector de consciencia situacional por agente.

Descripción
-------------------
    MÓDULO: Define `TimeSeries` (intencion: estados/entradas planificados con
    marca de tiempo) y `AwarenessVector` (belief, intent, uncertainty, risk).

    La actualizacion de la consciencia no es una unica funcion: es la composicion
    de las fases update de los componentes de un agente en una iteracion.

Invariantes
-------------------
    - risk en [0, 1].
    - uncertainty >= 0 componente a componente.
    - tiempos de la intencion estrictamente crecientes.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Iterator, List, Tuple

import numpy as np

from utils.errors import ConfigurationError


class TimeSeries:
    """
    Descripción
        CLASE: Serie temporal de vectores reales con tiempos estrictamente crecientes.

    Métodos y Funciones
        - append: anade un punto (t, v); t debe superar al ultimo tiempo.
        - times / values: vistas como arrays.
        - copy: copia profunda.
    """

    def __init__(self, points: List[Tuple[float, np.ndarray]] | None = None):
        self._times: List[float] = []
        self._values: List[np.ndarray] = []
        for t, v in points or []:
            self.append(t, v)

    def append(self, t: float, value) -> None:
        t = float(t)
        if self._times and not t > self._times[-1]:
            raise ConfigurationError(f"intent timestamps must be strictly increasing ({t} after {self._times[-1]})")
        self._times.append(t)
        self._values.append(np.atleast_1d(np.asarray(value, dtype=float)).copy())

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self._times, dtype=float)

    @property
    def values(self) -> List[np.ndarray]:
        return [v.copy() for v in self._values]

    def __len__(self) -> int:
        return len(self._times)

    def __iter__(self) -> Iterator[Tuple[float, np.ndarray]]:
        return iter(zip(self._times, self._values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries) or len(self) != len(other):
            return False
        return self._times == other._times and all(np.array_equal(a, b) for a, b in zip(self._values, other._values))

    def copy(self) -> "TimeSeries":
        out = TimeSeries()
        out._times = list(self._times)
        out._values = [v.copy() for v in self._values]
        return out


@dataclass
class AwarenessVector:
    """
    Descripción
        CLASE: Consciencia situacional de un agente sobre si mismo o sobre otro.

    Atributos
        - belief (np.ndarray): estimacion de estado, unidades del modelo.
        - intent (TimeSeries): trayectoria/entradas planificadas.
        - uncertainty (np.ndarray): dispersion (>= 0).
        - risk (float): probabilidad de fallo en [0, 1].
        - timestamp (float): tiempo de simulacion de la ultima escritura.
    """
    belief: np.ndarray = field(default_factory=lambda: np.zeros(0))
    intent: TimeSeries = field(default_factory=TimeSeries)
    uncertainty: np.ndarray = field(default_factory=lambda: np.zeros(0))
    risk: float = 0.0
    timestamp: float = 0.0

    def __post_init__(self):
        self.belief = np.atleast_1d(np.asarray(self.belief, dtype=float)).copy()
        self.uncertainty = np.atleast_1d(np.asarray(self.uncertainty, dtype=float)).copy()
        self.validate()

    def validate(self) -> None:
        if not 0.0 <= float(self.risk) <= 1.0:
            raise ConfigurationError(f"risk must lie in [0, 1], got {self.risk}")
        if np.any(self.uncertainty < 0):
            raise ConfigurationError("uncertainty components must be >= 0")

    def set_risk(self, risk: float) -> None:
        self.risk = float(min(1.0, max(0.0, risk)))

    def copy(self) -> "AwarenessVector":
        return AwarenessVector(
            belief=self.belief.copy(),
            intent=self.intent.copy(),
            uncertainty=self.uncertainty.copy(),
            risk=float(self.risk),
            timestamp=float(self.timestamp),
        )

    def digest_parts(self) -> tuple:
        """Representacion canonica usada para el hash de estado del agente."""
        return (
            self.belief.tobytes(),
            tuple((t, v.tobytes()) for t, v in self.intent),
            self.uncertainty.tobytes(),
            float(self.risk),
            float(self.timestamp),
        )

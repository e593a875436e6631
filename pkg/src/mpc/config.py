"""
Parametros del MPC con arbol de escenarios.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np

from configs.package import CONF
from utils.errors import ConfigurationError


def _pd(name: str, m: np.ndarray) -> None:
    if m.shape != (3, 3) or not np.allclose(m, m.T):
        raise ConfigurationError(f"{name} must be a symmetric 3x3 matrix")
    if np.min(np.linalg.eigvalsh(m)) <= 0:
        raise ConfigurationError(f"{name} must be positive definite")


@dataclass
class MpcConfig:
    """
    Descripción
        CLASE: Horizonte, pesos, separacion minima y cotas de ambos aparatos.

    Atributos
        - horizon (int): N.
        - robust_horizon (int): N_r < N; M = 3^N_r escenarios.
        - Q / Q_f (np.ndarray 3x3): pesos de etapa y terminal (definidos positivos).
        - R (float): escala de la metrica de separacion.
        - rho (float): separacion horizontal minima.
        - v_bounds / u_bounds: cotas (v, u) del aparato propio.
        - intruder_u_bounds / intruder_v_max: cotas del intruso.
        - t_e (float): periodo de muestreo.
        - candidates / elites / iterations: entropia cruzada.
        - penalty (float): peso de la violacion de separacion.
        - enforce_separation (bool): False elimina la restriccion (comparaciones).
    """
    horizon: int = CONF.MPC.HORIZON
    robust_horizon: int = CONF.MPC.ROBUST_HORIZON
    Q: np.ndarray = field(default_factory=lambda: np.diag([1.0, 1.0, 0.1]))
    Q_f: np.ndarray = field(default_factory=lambda: np.diag([2.0, 2.0, 0.2]))
    R: float = 1.0
    rho: float = 4.0
    v_bounds: Tuple[float, float] = (0.0, 1.0)
    u_bounds: Tuple[float, float] = (-0.3, 0.3)
    intruder_u_bounds: Tuple[float, float] = (-0.2, 0.2)
    intruder_v_max: float = 1.0
    t_e: float = 1.0
    branches: int = CONF.MPC.BRANCHES
    candidates: int = CONF.MPC.CANDIDATES
    elites: int = CONF.MPC.ELITES
    iterations: int = CONF.MPC.ITERATIONS
    penalty: float = CONF.MPC.PENALTY
    enforce_separation: bool = True

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.Q_f = np.asarray(self.Q_f, dtype=float)
        self.v_bounds = tuple(float(v) for v in self.v_bounds)
        self.u_bounds = tuple(float(v) for v in self.u_bounds)
        self.intruder_u_bounds = tuple(float(v) for v in self.intruder_u_bounds)
        self.validate()

    @property
    def scenarios(self) -> int:
        return self.branches ** self.robust_horizon

    @property
    def arrival_tolerance(self) -> float:
        return CONF.MPC.ARRIVAL_FACTOR * self.v_bounds[1] * self.t_e

    def validate(self) -> None:
        if self.horizon < 1:
            raise ConfigurationError("horizon N must be >= 1")
        if not 0 <= self.robust_horizon < self.horizon:
            raise ConfigurationError(f"robust horizon N_r must satisfy 0 <= N_r < N (N_r={self.robust_horizon}, N={self.horizon})")
        if self.branches != 3:
            raise ConfigurationError("the scenario tree uses exactly 3 branches")
        _pd("Q", self.Q)
        _pd("Q_f", self.Q_f)
        if not self.R > 0:
            raise ConfigurationError("R must be > 0")
        if not self.rho > 0:
            raise ConfigurationError("rho must be > 0")
        if not self.t_e > 0:
            raise ConfigurationError("t_e must be > 0")
        for name in ("v_bounds", "u_bounds", "intruder_u_bounds"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigurationError(f"{name}: lower bound above upper bound")
        lo, hi = self.intruder_u_bounds
        if not (lo < 0 < hi):
            raise ConfigurationError("intruder turn-rate bounds must bracket 0")
        if not self.intruder_v_max > 0:
            raise ConfigurationError("intruder_v_max must be > 0")
        if self.candidates < 8 or self.candidates % 4:
            raise ConfigurationError("candidates must be a multiple of 4 and >= 8")
        if not 1 <= self.elites <= self.candidates:
            raise ConfigurationError("elites must lie in [1, candidates]")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MpcConfig":
        return cls(**data)

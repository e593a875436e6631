"""
Modelos dinamicos de las entidades.

Descripción
-------------------
    MÓDULO: Un `Model` avanza el estado de una entidad un paso t_e:
        1) recorta la entrada a sus cotas (con aviso en el log);
        2) suma ruido de actuacion (familia configurable, gaussiana por defecto);
           con escala 0 no se extrae ninguna muestra;
        3) satura la norma de las componentes de velocidad si hay `speed_limit`;
        4) aplica la dinamica determinista.

Modelos
-------------------
    - UnicycleModel: estado (x, y, sigma), entrada (v, u). Rumbo sin envolver.
    - SingleIntegratorModel: estado x en R^d, entrada u en R^d, x' = x + t_e u.
"""
from __future__ import annotations
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from utils.errors import ConfigurationError
from utils.logger import get_logger

log = get_logger("Model")


def step_unicycle(s: Sequence[float], v: float, u: float, t_e: float) -> np.ndarray:
    """
    Descripción
        FUNCIÓN: Paso de Euler del uniciclo.
            s' = (x + t_e v cos sigma, y + t_e v sin sigma, sigma + t_e u)

    Argumentos
        - s (Sequence[float]): estado (x, y, sigma).
        - v (float): velocidad lineal.
        - u (float): velocidad angular.
        - t_e (float): periodo de muestreo (> 0).
    """
    x, y, sigma = float(s[0]), float(s[1]), float(s[2])
    return np.array([x + t_e * v * math.cos(sigma), y + t_e * v * math.sin(sigma), sigma + t_e * u])


@dataclass(frozen=True)
class NoiseSpec:
    """Ruido de actuacion: familia ("gaussian" | "uniform") y escala por canal."""
    family: str = "gaussian"
    scale: tuple = ()

    def __post_init__(self):
        if self.family not in ("gaussian", "uniform"):
            raise ConfigurationError(f"unknown noise family {self.family!r}")
        if any(s < 0 for s in self.scale):
            raise ConfigurationError("noise scale must be >= 0")

    @property
    def active(self) -> bool:
        return any(s > 0 for s in self.scale)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        scale = np.asarray(self.scale, dtype=float)
        if self.family == "gaussian":
            return rng.normal(0.0, 1.0, size=scale.shape) * scale
        return rng.uniform(-1.0, 1.0, size=scale.shape) * scale


class Model(ABC):
    """
    Descripción
        CLASE: Contrato de modelo dinamico.

    Atributos
        - state_dim / input_dim (int)
        - input_low / input_high (np.ndarray): cotas de la entrada.
        - noise (NoiseSpec)
        - speed_limit (Optional[float]): saturacion de la norma de velocidad tras el ruido.
        - clamp_count (int): veces que se recorto una entrada.
    """
    name = "model"
    state_dim: int = 0
    input_dim: int = 0

    def __init__(self, input_low: Sequence[float], input_high: Sequence[float],
                 noise_scale: Optional[Sequence[float] | float] = None, noise_family: str = "gaussian",
                 speed_limit: Optional[float] = None):
        self.input_low = np.asarray(input_low, dtype=float).reshape(self.input_dim)
        self.input_high = np.asarray(input_high, dtype=float).reshape(self.input_dim)
        if np.any(self.input_low > self.input_high):
            raise ConfigurationError(f"{self.name}: input lower bound above upper bound")
        if noise_scale is None:
            noise_scale = 0.0
        scale = np.broadcast_to(np.asarray(noise_scale, dtype=float), (self.input_dim,))
        self.noise = NoiseSpec(noise_family, tuple(float(s) for s in scale))
        self.speed_limit = None if speed_limit is None else float(speed_limit)
        self.clamp_count = 0

    @property
    def noise_scale(self) -> np.ndarray:
        return np.asarray(self.noise.scale, dtype=float)

    def clamp(self, u: Sequence[float]) -> np.ndarray:
        u = np.asarray(u, dtype=float).reshape(self.input_dim)
        clamped = np.clip(u, self.input_low, self.input_high)
        if not np.array_equal(clamped, u):
            self.clamp_count += 1
            # un aviso por modelo; el resto a debug
            if self.clamp_count == 1:
                log.warning("%s input %s outside bounds, clamped to %s", self.name, u.tolist(), clamped.tolist())
            else:
                log.debug("%s input clamped (%s times)", self.name, self.clamp_count)
        return clamped

    def effective_input(self, u: Optional[Sequence[float]], rng: Optional[np.random.Generator]) -> np.ndarray:
        u = np.zeros(self.input_dim) if u is None else self.clamp(u)
        if self.noise.active and rng is not None:
            u = u + self.noise.sample(rng)
        return self._saturate(u)

    def _saturate(self, u: np.ndarray) -> np.ndarray:
        return u

    def step(self, state: np.ndarray, u: Optional[Sequence[float]], dt: float,
             rng: Optional[np.random.Generator] = None) -> np.ndarray:
        return self.dynamics(state, self.effective_input(u, rng), dt)

    @abstractmethod
    def dynamics(self, state: np.ndarray, u: np.ndarray, dt: float) -> np.ndarray:
        ...


class UnicycleModel(Model):
    """Uniciclo con entrada (v, u): velocidad lineal y angular."""
    name = "unicycle"
    state_dim = 3
    input_dim = 2

    def __init__(self, v_bounds: Sequence[float] = (0.0, 1.0), u_bounds: Sequence[float] = (-1.0, 1.0), **kwargs):
        super().__init__((v_bounds[0], u_bounds[0]), (v_bounds[1], u_bounds[1]), **kwargs)

    def _saturate(self, u: np.ndarray) -> np.ndarray:
        if self.speed_limit is not None and abs(u[0]) > self.speed_limit:
            u = u.copy()
            u[0] = math.copysign(self.speed_limit, u[0])
        return u

    def dynamics(self, state: np.ndarray, u: np.ndarray, dt: float) -> np.ndarray:
        return step_unicycle(state, u[0], u[1], dt)


class SingleIntegratorModel(Model):
    """Integrador simple en R^dim con caja de entrada simetrica por defecto."""
    name = "single-integrator"

    def __init__(self, dim: int = 2, input_low: Optional[Sequence[float]] = None,
                 input_high: Optional[Sequence[float]] = None, **kwargs):
        self.state_dim = int(dim)
        self.input_dim = int(dim)
        low = [-1.0] * self.input_dim if input_low is None else input_low
        high = [1.0] * self.input_dim if input_high is None else input_high
        super().__init__(low, high, **kwargs)

    def _saturate(self, u: np.ndarray) -> np.ndarray:
        if self.speed_limit is None:
            return u
        norm = float(np.linalg.norm(u))
        if norm > self.speed_limit:
            return u * (self.speed_limit / norm)
        return u

    def dynamics(self, state: np.ndarray, u: np.ndarray, dt: float) -> np.ndarray:
        return np.asarray(state, dtype=float) + dt * u


MODELS = {
    UnicycleModel.name: UnicycleModel,
    SingleIntegratorModel.name: SingleIntegratorModel,
}


def build_model(kind: str, **params) -> Model:
    if kind not in MODELS:
        raise ConfigurationError(f"unknown model {kind!r}; known: {sorted(MODELS)}")
    return MODELS[kind](**params)

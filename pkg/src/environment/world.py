"""
Mundo cinematico 2D: fachada del entorno.

Descripción
-------------------
    MÓDULO: `World2D` registra entidades, las avanza un paso con las entradas de
    los agentes (retencion de orden cero en el coordinador) y responde a consultas
    de percepcion. Las colisiones y salidas de los limites se informan en el
    `StepReport`; no hay dinamica de contacto.

Determinismo
-------------------
    Cada entidad con modelo tiene su propio flujo aleatorio derivado de
    (semilla, id de entidad); el orden de paso es por id.
"""
from __future__ import annotations
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.rng import agent_stream
from environment.entity import Entity
from environment.geometry import Rect, distance
from utils.errors import ConfigurationError, UnknownEntityError
from utils.logger import get_logger

log = get_logger("World")


@dataclass
class StepReport:
    step: int
    boundary_violations: List[int] = field(default_factory=list)
    collisions: List[Tuple[int, str]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.boundary_violations and not self.collisions


@dataclass(frozen=True)
class Perception:
    id: int
    pose: np.ndarray
    distance: float


class World2D:
    """
    Descripción
        CLASE: Entorno 2D con limites, obstaculos caja y paso fijo dt.

    Argumentos
        - bounds (Rect): region admisible.
        - dt (float): periodo de muestreo t_e (> 0), fijo en la ejecucion.
        - seed (int): semilla maestra.
        - obstacles (Sequence[Rect]): paredes estaticas.

    Métodos y Funciones
        - add_entity / entity / modeled_entities
        - step(inputs) -> StepReport
        - perceive(observer_id, range_limit=None) -> List[Perception]
        - snapshot() -> World2D (copia para lectores concurrentes)
    """

    def __init__(self, bounds: Rect, dt: float, seed: int = 0, obstacles: Sequence[Rect] = ()):
        if not dt > 0:
            raise ConfigurationError(f"world dt must be > 0, got {dt}")
        self.bounds = bounds
        self.dt = float(dt)
        self.seed = int(seed)
        self.obstacles: List[Rect] = list(obstacles)
        self.entities: Dict[int, Entity] = {}
        self.step_count = 0
        self._rngs: Dict[int, np.random.Generator] = {}

    @property
    def time(self) -> float:
        return self.step_count * self.dt

    def add_entity(self, entity: Entity) -> Entity:
        if entity.id in self.entities:
            raise ConfigurationError(f"duplicate entity id {entity.id}")
        self.entities[entity.id] = entity
        if entity.model is not None:
            self._rngs[entity.id] = agent_stream(self.seed, entity.id)
        return entity

    def entity(self, entity_id: int) -> Entity:
        try:
            return self.entities[int(entity_id)]
        except KeyError:
            raise UnknownEntityError(f"unknown entity {entity_id}")

    def modeled_entities(self) -> List[Entity]:
        return [self.entities[k] for k in sorted(self.entities) if self.entities[k].model is not None]

    def step(self, inputs: Optional[Mapping[int, Sequence[float]]] = None) -> StepReport:
        """
        Descripción
            MÉTODO: Avanza todas las entidades con modelo; las que no reciben
            entrada usan entrada cero.

        Argumentos
            - inputs (Mapping[int, input]): entrada por id de entidad.

        Retorno
            - StepReport: salidas de limites y colisiones tras el paso.

        Excepciones
            - UnknownEntityError: entrada para una entidad inexistente o estatica.
        """
        inputs = dict(inputs or {})
        for entity_id in inputs:
            if entity_id not in self.entities or self.entities[entity_id].model is None:
                raise UnknownEntityError(f"input for unknown or static entity {entity_id}")
        # 1) dinamica
        for entity in self.modeled_entities():
            entity.pose = entity.model.step(entity.pose, inputs.get(entity.id), self.dt, self._rngs[entity.id])
        self.step_count += 1
        # 2) informe
        report = StepReport(self.step_count)
        movers = self.modeled_entities()
        for entity in movers:
            if not self.bounds.contains(entity.position):
                report.boundary_violations.append(entity.id)
            for k, wall in enumerate(self.obstacles):
                if entity.touches_rect(wall):
                    report.collisions.append((entity.id, f"obstacle:{k}"))
            for other in self.entities.values():
                if other.id != entity.id and (other.static or other.id > entity.id) and entity.touches(other):
                    report.collisions.append((entity.id, f"entity:{other.id}"))
        if report.boundary_violations:
            log.info("step %s: entities out of bounds %s", self.step_count, report.boundary_violations)
        return report

    def perceive(self, observer_id: int, range_limit: Optional[float] = None) -> List[Perception]:
        """
        Descripción
            MÉTODO: Entidades percibidas por un observador, ordenadas por id.
            Sin `range_limit` (o infinito) el sensor es omnisciente; con rango,
            incluye las entidades con distancia de centro <= rango (bola cerrada).
        """
        observer = self.entity(observer_id)
        limit = math.inf if range_limit is None else float(range_limit)
        out = []
        for other_id in sorted(self.entities):
            if other_id == observer.id:
                continue
            other = self.entities[other_id]
            d = distance(observer.position, other.position)
            if d <= limit:
                out.append(Perception(other_id, other.pose.copy(), d))
        return out

    def snapshot(self) -> "World2D":
        clone = World2D(self.bounds, self.dt, self.seed, self.obstacles)
        clone.entities = {k: e.copy() for k, e in self.entities.items()}
        clone.step_count = self.step_count
        return clone

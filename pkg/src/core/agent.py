"""
Agente: identidad, estado compartido y lista ordenada de componentes.
"""
from __future__ import annotations
import asyncio
import hashlib
import pickle
from typing import TYPE_CHECKING, Dict, List, Optional

import numpy as np

from core.awareness import AwarenessVector
from core.component import KIND_ORDER, Component, ComponentKind, WorldView
from core.knowledge import KnowledgeDatabase
from utils.errors import SetupError
from utils.logger import get_logger

if TYPE_CHECKING:
    from core.coordinator import SimulationContext

log = get_logger("Agent")


class Agent:
    """
    Descripción
        CLASE: Coleccion de componentes con acceso al mismo estado compartido.

    Atributos
        - id (int): identificador unico.
        - entity_id (Optional[int]): entidad del entorno ligada (a lo sumo una).
        - awareness_self (AwarenessVector): consciencia propia.
        - awareness_others (Dict[int, AwarenessVector]): ultima consciencia
          recibida/percibida de otros (last-write-wins con timestamp, sin expiracion).
        - knowledge (KnowledgeDatabase): conocimiento de alto nivel.
        - components (List[Component]): orden fijo tras initialize.
        - control_input (Optional[np.ndarray]): entrada pendiente para la entidad.

    Métodos y Funciones
        - add_component: solo antes de initialize.
        - initialize: ordena componentes por tipo y los enlaza al contexto.
        - view: copia de lectura para la fase compute.
        - set_other: escribe la consciencia de otro agente.
        - state_digest: hash del estado (comprobacion de pureza de compute).
    """

    def __init__(
        self,
        agent_id: int,
        entity_id: Optional[int] = None,
        knowledge: Optional[KnowledgeDatabase] = None,
        awareness: Optional[AwarenessVector] = None,
        require_controller: bool = True,
    ):
        self.id = int(agent_id)
        self.entity_id = None if entity_id is None else int(entity_id)
        self.awareness_self = awareness or AwarenessVector()
        self.awareness_others: Dict[int, AwarenessVector] = {}
        self.knowledge = knowledge or KnowledgeDatabase()
        self.components: List[Component] = []
        self.control_input: Optional[np.ndarray] = None
        self.require_controller = require_controller
        self.initialized = False
        self.context: Optional["SimulationContext"] = None
        self._lock: Optional[asyncio.Lock] = None

    # --------------------
    # Montaje
    # --------------------
    def add_component(self, component: Component) -> Component:
        if self.initialized:
            raise SetupError(f"agent {self.id}: components are fixed after initialization")
        if any(c.name == component.name for c in self.components):
            raise SetupError(f"agent {self.id}: duplicate component name {component.name!r}")
        self.components.append(component)
        return component

    def initialize(self, context: "SimulationContext") -> None:
        """
        Descripción
            MÉTODO: Fija el orden de componentes (por tipo, estable en el
            orden de registro) y ejecuta initialize de cada uno.

        Excepciones
            - SetupError: sin controlador (o con varios) cuando es obligatorio.
        """
        controllers = [c for c in self.components if c.kind == ComponentKind.CONTROLLER]
        if self.require_controller and len(controllers) != 1:
            raise SetupError(f"agent {self.id} must have exactly one controller, has {len(controllers)}")
        if len(controllers) > 1:
            raise SetupError(f"agent {self.id} has {len(controllers)} controllers")
        self.components.sort(key=lambda c: KIND_ORDER[c.kind])
        self.context = context
        for component in self.components:
            component.initialize(self, context)
        self.initialized = True
        log.debug("agent %s initialized with %s", self.id, [c.name for c in self.components])

    # --------------------
    # Estado
    # --------------------
    def view(self, step: int, time: float) -> WorldView:
        return WorldView(
            agent_id=self.id,
            entity_id=self.entity_id,
            step=int(step),
            time=float(time),
            awareness_self=self.awareness_self.copy(),
            awareness_others={k: v.copy() for k, v in self.awareness_others.items()},
            knowledge=self.knowledge.snapshot(),
            control_input=None if self.control_input is None else self.control_input.copy(),
        )

    def set_other(self, other_id: int, awareness: AwarenessVector) -> None:
        self.awareness_others[int(other_id)] = awareness

    def component(self, name: str) -> Component:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(name)

    def async_lock(self) -> asyncio.Lock:
        if self._lock is None:
            self._lock = asyncio.Lock()
        return self._lock

    def state_digest(self) -> str:
        parts = (
            self.awareness_self.digest_parts(),
            tuple((k, v.digest_parts()) for k, v in sorted(self.awareness_others.items())),
            self.knowledge.digest_parts(),
            None if self.control_input is None else self.control_input.tobytes(),
        )
        return hashlib.sha256(pickle.dumps(parts, protocol=4)).hexdigest()

    def __repr__(self) -> str:
        return f"Agent(id={self.id}, entity={self.entity_id}, components={len(self.components)})"

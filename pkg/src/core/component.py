"""
Contrato de componente.

Descripción
-------------------
    MÓDULO: Un agente es una coleccion de componentes que comparten su estado
    (consciencia y conocimiento). Cada componente implementa dos metodos
    protegidos:
        - _compute(view): procesa una copia de solo lectura del estado (WorldView)
          y devuelve un valor. Nunca muta el estado del agente.
        - _update(value): recibe ese mismo valor y es la unica fase que muta el
          estado del agente.

    En modo asincrono pueden sobreescribirse `_async_compute` / `_async_update`;
    por defecto delegan en los sincronos.

Registro
-------------------
    `COMPONENTS` mapea nombre -> clase; se registra con @register_component("nombre")
    y lo usa `core.builder` para construir agentes desde el dict del escenario.
"""
from __future__ import annotations
import enum
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Dict, Optional

import numpy as np

from core.awareness import AwarenessVector
from core.events import Event, EventPhase
from core.knowledge import KnowledgeDatabase
from utils.errors import SetupError
from utils.logger import get_logger

if TYPE_CHECKING:
    from core.agent import Agent
    from core.coordinator import SimulationContext
    from core.gates import Gate

log = get_logger("Component")


class ComponentKind(str, enum.Enum):
    PERCEPTION = "perception"
    COMM_RECEIVER = "comm-receiver"
    RISK = "risk"
    UNCERTAINTY = "uncertainty"
    CONTROLLER = "controller"
    COMM_SENDER = "comm-sender"
    CUSTOM = "custom"


# Orden de ejecucion en modo sincrono (flujo de informacion percepcion -> envio)
KIND_ORDER: Dict[ComponentKind, int] = {
    ComponentKind.PERCEPTION: 0,
    ComponentKind.COMM_RECEIVER: 1,
    ComponentKind.RISK: 2,
    ComponentKind.UNCERTAINTY: 3,
    ComponentKind.CONTROLLER: 4,
    ComponentKind.COMM_SENDER: 5,
    ComponentKind.CUSTOM: 6,
}


@dataclass(frozen=True)
class WorldView:
    """Copia de lectura del estado del agente al inicio de una iteracion."""
    agent_id: int
    entity_id: Optional[int]
    step: int
    time: float
    awareness_self: AwarenessVector
    awareness_others: Dict[int, AwarenessVector]
    knowledge: KnowledgeDatabase
    control_input: Optional[np.ndarray] = field(default=None)


COMPONENTS: Dict[str, type] = {}


def register_component(name: str) -> Callable[[type], type]:
    """Decorador para registrar clases de componente en COMPONENTS."""
    def _decor(cls: type) -> type:
        COMPONENTS[name] = cls
        cls.registry_name = name
        return cls
    return _decor


class Component(ABC):
    """
    Descripción
        CLASE: Base abstracta de todos los componentes.

    Atributos
        - kind (ComponentKind): tipo, decide el orden en modo sincrono.
        - name (str): nombre unico dentro del agente (trazas, filtros).
        - gate (Optional[Gate]): compuerta de modo asincrono.
        - owner (Agent): agente propietario (tras initialize).
        - context (SimulationContext): mundo, canal, bus y reloj compartidos.
        - iterations (int): iteraciones completadas.

    Métodos y Funciones
        - initialize: enlaza con agente/contexto, emite pre-init y post-init.
        - compute_and_update: una iteracion sincrona completa.
        - async_compute_and_update: una iteracion asincrona.
    """
    kind: ComponentKind = ComponentKind.CUSTOM
    registry_name: str = "custom"
    # True: se ejecuta en la fase de intercambio, antes que el resto de componentes del paso
    exchange: bool = False

    def __init__(self, name: Optional[str] = None, gate: Optional["Gate"] = None):
        self.name = name or type(self).__name__
        self.gate = gate
        self.owner: Optional["Agent"] = None
        self.context: Optional["SimulationContext"] = None
        self.iterations = 0

    # --------------------
    # Ciclo de vida
    # --------------------
    def initialize(self, agent: "Agent", context: "SimulationContext") -> None:
        self.owner = agent
        self.context = context
        self._emit(EventPhase.PRE_INIT, 0, None)
        self._initialize()
        self._emit(EventPhase.POST_INIT, 0, None)

    def _initialize(self) -> None:
        """Hook opcional tras enlazar owner/context."""

    @abstractmethod
    def _compute(self, view: WorldView) -> Any:
        ...

    @abstractmethod
    def _update(self, value: Any) -> None:
        ...

    async def _async_compute(self, view: WorldView) -> Any:
        return self._compute(view)

    async def _async_update(self, value: Any) -> None:
        self._update(value)

    # --------------------
    # Iteraciones
    # --------------------
    def _emit(self, phase: EventPhase, step: int, payload: Any, time: float = 0.0) -> None:
        if self.context is None or self.owner is None:
            return
        self.context.bus.emit(Event(
            phase=phase,
            agent_id=self.owner.id,
            component_kind=self.kind.value,
            component_name=self.name,
            step_index=int(step),
            payload=payload,
            time=float(time),
        ))

    def _check_ready(self) -> "Agent":
        if self.owner is None or not self.owner.initialized:
            raise SetupError(f"component {self.name} used before its agent was initialized")
        return self.owner

    def compute_and_update(self, step: int, time: float = 0.0) -> bool:
        """
        Descripción
            MÉTODO: Ejecuta compute sobre una copia del estado y pasa el valor
            sin cambios a update. Emite pre/post compute y pre/post update.

        Argumentos
            - step (int): indice de paso (>= 0).
            - time (float): tiempo de simulacion.

        Retorno
            - bool: False si compute o update fallaron; en ambos casos se emite
              un evento ERROR y no se emite POST_UPDATE. Un compute fallido no
              toca el estado; un update fallido conserva lo que ya hubiera escrito.
        """
        agent = self._check_ready()
        view = agent.view(step, time)
        # 1) compute
        self._emit(EventPhase.PRE_COMPUTE, step, None, time)
        try:
            value = self._compute(view)
        except Exception as err:
            log.error("agent %s component %s compute failed at step %s: %s", agent.id, self.name, step, err)
            self._emit(EventPhase.ERROR, step, err, time)
            return False
        self._emit(EventPhase.POST_COMPUTE, step, value, time)
        # 2) update
        self._emit(EventPhase.PRE_UPDATE, step, value, time)
        try:
            self._update(value)
        except Exception as err:
            log.error("agent %s component %s update failed at step %s: %s", agent.id, self.name, step, err)
            self._emit(EventPhase.ERROR, step, err, time)
            return False
        self._emit(EventPhase.POST_UPDATE, step, None, time)
        self.iterations += 1
        return True

    async def async_compute_and_update(self, step: int, time: float = 0.0) -> bool:
        agent = self._check_ready()
        async with agent.async_lock():
            view = agent.view(step, time)
        self._emit(EventPhase.PRE_COMPUTE, step, None, time)
        try:
            value = await self._async_compute(view)
        except Exception as err:
            log.error("agent %s component %s compute failed: %s", agent.id, self.name, err)
            self._emit(EventPhase.ERROR, step, err, time)
            return False
        self._emit(EventPhase.POST_COMPUTE, step, value, time)
        # el update se aplica bajo el lock del agente: ningun lector ve un vector a medias
        async with agent.async_lock():
            self._emit(EventPhase.PRE_UPDATE, step, value, time)
            try:
                await self._async_update(value)
            except Exception as err:
                log.error("agent %s component %s update failed: %s", agent.id, self.name, err)
                self._emit(EventPhase.ERROR, step, err, time)
                return False
            self._emit(EventPhase.POST_UPDATE, step, None, time)
        self.iterations += 1
        return True

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, kind={self.kind.value})"

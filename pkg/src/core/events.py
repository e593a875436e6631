"""
Bus de eventos sincrono.

Descripción
-------------------
    MÓDULO: Cada accion relevante de un componente (initialize, compute, update)
    emite un evento antes y otro despues. Los suscriptores permiten anadir
    comportamiento propio (metricas, trazas, depuracion) sin modificar el
    componente.

Convenciones
-------------------
    - Despacho sincrono, en orden de registro, en el contexto del componente emisor.
    - Una excepcion en un callback se captura y se registra; nunca aborta la simulacion.
    - subscribe/unsubscribe/emit son seguros desde cualquier hilo (lock interno).
"""
from __future__ import annotations
import enum
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, FrozenSet, List, Optional

from utils.logger import get_logger

log = get_logger("EventBus")


class EventPhase(str, enum.Enum):
    PRE_INIT = "pre-init"
    POST_INIT = "post-init"
    PRE_COMPUTE = "pre-compute"
    POST_COMPUTE = "post-compute"
    PRE_UPDATE = "pre-update"
    POST_UPDATE = "post-update"
    ERROR = "component-error"


@dataclass(frozen=True)
class Event:
    phase: EventPhase
    agent_id: int
    component_kind: str
    component_name: str
    step_index: int
    payload: Any = None
    time: float = 0.0


@dataclass(frozen=True)
class EventFilter:
    """
    Selecciona eventos por fase, agente, tipo y nombre de componente.
    Un campo a None no filtra.
    """
    phases: Optional[FrozenSet[EventPhase]] = None
    agent_ids: Optional[FrozenSet[int]] = None
    kinds: Optional[FrozenSet[str]] = None
    names: Optional[FrozenSet[str]] = None

    @classmethod
    def of(cls, phases=None, agent_ids=None, kinds=None, names=None) -> "EventFilter":
        def _fs(v):
            if v is None:
                return None
            if isinstance(v, (str, int, EventPhase)):
                v = [v]
            return frozenset(v)
        return cls(
            phases=frozenset(EventPhase(p) for p in _fs(phases)) if phases is not None else None,
            agent_ids=_fs(agent_ids),
            kinds=frozenset(str(getattr(k, "value", k)) for k in _fs(kinds)) if kinds is not None else None,
            names=_fs(names),
        )

    def matches(self, event: Event) -> bool:
        if self.phases is not None and event.phase not in self.phases:
            return False
        if self.agent_ids is not None and event.agent_id not in self.agent_ids:
            return False
        if self.kinds is not None and event.component_kind not in self.kinds:
            return False
        if self.names is not None and event.component_name not in self.names:
            return False
        return True


@dataclass
class Subscription:
    bus: "EventBus"
    event_filter: EventFilter
    callback: Callable[[Event], None]
    active: bool = field(default=True)

    def unsubscribe(self) -> None:
        self.bus.unsubscribe(self)


class EventBus:
    """
    Descripción
        CLASE: Registro de suscriptores y despacho sincrono de `Event`.

    Métodos y Funciones
        - subscribe(event_filter, callback) -> Subscription
        - unsubscribe(subscription)
        - emit(event): invoca los callbacks que casan, en orden de registro.
    """

    def __init__(self):
        self._subs: List[Subscription] = []
        self._lock = threading.RLock()

    def subscribe(self, event_filter: EventFilter | None, callback: Callable[[Event], None]) -> Subscription:
        sub = Subscription(self, event_filter or EventFilter(), callback)
        with self._lock:
            self._subs.append(sub)
        return sub

    def unsubscribe(self, subscription: Subscription) -> None:
        with self._lock:
            subscription.active = False
            self._subs = [s for s in self._subs if s is not subscription]

    def emit(self, event: Event) -> None:
        with self._lock:
            subs = list(self._subs)
        for sub in subs:
            if not sub.active or not sub.event_filter.matches(event):
                continue
            try:
                sub.callback(event)
            except Exception as err:
                log.error(
                    "callback %r failed on %s of agent %s/%s: %s",
                    getattr(sub.callback, "__name__", sub.callback), event.phase.value,
                    event.agent_id, event.component_name, err, exc_info=True,
                )

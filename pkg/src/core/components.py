"""
Componentes incluidos en el kernel.

Descripción
-------------------
    MÓDULO: Componentes genericos registrados por nombre en COMPONENTS:
        - "perception": PerceptionComponent (sensor con rango u omnisciente).
        - "goal-controller": GoalController (control_input = goal - belief).
        - "awareness-broadcaster": AwarenessBroadcaster (emisor de consciencia).
        - "knowledge-broadcaster": KnowledgeBroadcaster (difunde claves de conocimiento).
        - "message-receiver": MessageReceiver (drena el canal y vuelca al estado).
        - "noise-uncertainty": NoiseUncertainty (incertidumbre = escala de ruido).

    Los casos de uso (mpc, cbf, tasking) registran sus propios componentes con el
    mismo decorador.
"""
from __future__ import annotations
from typing import Any, List, Optional, Tuple

import numpy as np

from comms.channel import Outbox
from comms.message import (
    AwarenessPayload,
    EpsilonPayload,
    KnowledgePayload,
    KnowledgeValue,
    Message,
    TaskPayload,
)
from core.awareness import AwarenessVector, TimeSeries
from core.component import Component, ComponentKind, WorldView, register_component
from core.knowledge import MISSING, ValueKind
from utils.errors import ComponentError, FormulaSyntaxError
from utils.logger import get_logger

log = get_logger("Components")


@register_component("perception")
class PerceptionComponent(Component):
    """
    Descripción
        CLASE: Lee la pose propia (belief) y las entidades dentro del rango.
        Las entidades ligadas a un agente se guardan con el id del agente.

    Argumentos
        - range_limit (Optional[float]): None = omnisciente.
    """
    kind = ComponentKind.PERCEPTION

    def __init__(self, range_limit: Optional[float] = None, **kwargs):
        super().__init__(**kwargs)
        self.range_limit = None if range_limit is None else float(range_limit)

    def _compute(self, view: WorldView):
        world = self.context.world
        if view.entity_id is None or world is None:
            return None
        own = world.entity(view.entity_id).pose.copy()
        seen = world.perceive(view.entity_id, self.range_limit)
        return own, seen, view.time

    def _update(self, value) -> None:
        if value is None:
            return
        own, seen, time = value
        agent = self.owner
        agent.awareness_self.belief = own
        agent.awareness_self.timestamp = time
        by_entity = {a.entity_id: a.id for a in self.context.agents.values() if a.entity_id is not None}
        for p in seen:
            other_id = by_entity.get(p.id, p.id)
            previous = agent.awareness_others.get(other_id)
            awareness = previous.copy() if previous is not None else AwarenessVector()
            awareness.belief = p.pose
            awareness.timestamp = time
            agent.set_other(other_id, awareness)


@register_component("goal-controller")
class GoalController(Component):
    """
    Descripción
        CLASE: Controlador proporcional minimo: control_input = goal - belief.
        La intencion es la serie [(t, belief), (t + dt, belief + dt * u)].

    Argumentos
        - goal_key (str): clave de conocimiento con la meta (por defecto "goal").
    """
    kind = ComponentKind.CONTROLLER

    def __init__(self, goal_key: str = "goal", **kwargs):
        super().__init__(**kwargs)
        self.goal_key = goal_key

    def _compute(self, view: WorldView):
        goal = view.knowledge.get(self.goal_key)
        if goal is MISSING:
            raise ComponentError(f"agent {view.agent_id}: knowledge has no {self.goal_key!r}")
        belief = view.awareness_self.belief
        control = np.asarray(goal, dtype=float) - belief
        dt = self.context.world.dt if self.context.world is not None else 1.0
        intent = TimeSeries([(view.time, belief), (view.time + dt, belief + dt * control)])
        return control, intent

    def _update(self, value) -> None:
        control, intent = value
        self.owner.control_input = control
        self.owner.awareness_self.intent = intent


@register_component("awareness-broadcaster")
class AwarenessBroadcaster(Component):
    """Difunde la consciencia propia a todos los agentes registrados en el canal."""
    kind = ComponentKind.COMM_SENDER

    def _initialize(self) -> None:
        self.outbox = Outbox(self.owner.id, self.context.channel)

    def _compute(self, view: WorldView):
        a = view.awareness_self
        payload = AwarenessPayload(
            belief=tuple(a.belief.tolist()),
            uncertainty=tuple(a.uncertainty.tolist()),
            risk=float(a.risk),
            intent=tuple((t, tuple(v.tolist())) for t, v in a.intent),
        )
        return payload, view.time

    def _update(self, value) -> None:
        payload, time = value
        self.outbox.broadcast(payload, time)


def _knowledge_value(value: Any) -> Tuple[Any, Optional[ValueKind]]:
    if isinstance(value, str):
        from logic.parser import parse

        try:
            return parse(value), ValueKind.FORMULA
        except FormulaSyntaxError:
            return value, ValueKind.BLOB
    if isinstance(value, bytes):
        return value, ValueKind.BLOB
    if isinstance(value, tuple):
        return np.asarray(value, dtype=float), ValueKind.VECTOR
    return float(value), ValueKind.SCALAR


@register_component("message-receiver")
class MessageReceiver(Component):
    """
    Descripción
        CLASE: Lee los mensajes pendientes del agente y los vuelca al estado.
        compute solo los observa; update los aplica y despues los retira del
        canal, asi que un compute o update fallido no pierde mensajes.

    Notas
        - awareness  -> awareness_others[remitente] (last-write-wins por sim_time).
        - knowledge  -> una entrada por clave, timestamp = sim_time.
        - epsilon    -> "epsilon:<remitente>" con timestamp t_k.
        - task       -> "task:open:<id>", "task:bid:<id>:<remitente>" o "task:assigned:<id>".
    """
    kind = ComponentKind.COMM_RECEIVER

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self.received = 0

    def _compute(self, view: WorldView) -> List[Message]:
        channel = self.context.channel
        if channel is None:
            return []
        return channel.peek_pending(view.agent_id)

    def _update(self, messages: List[Message]) -> None:
        agent = self.owner
        for m in messages:
            self.received += 1
            p = m.payload
            if isinstance(p, AwarenessPayload):
                previous = agent.awareness_others.get(m.sender_id)
                if previous is not None and previous.timestamp > m.sim_time:
                    continue
                intent = TimeSeries([(t, v) for t, v in p.intent])
                agent.set_other(m.sender_id, AwarenessVector(
                    p.belief, intent, p.uncertainty, p.risk, m.sim_time,
                ))
            elif isinstance(p, KnowledgePayload):
                for key, raw in p.entries:
                    value, kind = _knowledge_value(raw)
                    agent.knowledge.set(key, value, kind=kind, timestamp=m.sim_time)
            elif isinstance(p, EpsilonPayload):
                agent.knowledge.set(f"epsilon:{m.sender_id}", p.value, kind=ValueKind.SCALAR, timestamp=p.t_k)
            elif isinstance(p, TaskPayload):
                if p.status == "bid":
                    key = f"task:bid:{p.task_id}:{m.sender_id}"
                elif p.status == "assigned":
                    key = f"task:assigned:{p.task_id}"
                else:
                    key = f"task:{p.status}:{p.task_id}"
                agent.knowledge.set(key, p, kind=ValueKind.TASK, timestamp=m.sim_time)
        if messages:
            self.context.channel.acknowledge(agent.id, len(messages))


@register_component("noise-uncertainty")
class NoiseUncertainty(Component):
    """Incertidumbre propia = escala del ruido de actuacion del modelo de la entidad."""
    kind = ComponentKind.UNCERTAINTY

    def _compute(self, view: WorldView):
        world = self.context.world
        if view.entity_id is None or world is None:
            return None
        model = world.entity(view.entity_id).model
        return None if model is None else model.noise_scale.copy()

    def _update(self, value) -> None:
        if value is not None:
            self.owner.awareness_self.uncertainty = value



def _wire_value(value: Any) -> KnowledgeValue:
    if isinstance(value, (str, bytes)):
        return value
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return float(arr)
    return tuple(float(v) for v in arr.ravel())


@register_component("knowledge-broadcaster")
class KnowledgeBroadcaster(Component):
    """
    Descripción
        CLASE: Difunde entradas de conocimiento propias con clave "<id>/<clave>".
        Solo reenvia una clave cuando su valor cambia.

    Argumentos
        - keys (List[str]): claves a difundir; las ausentes se ignoran.
    """
    kind = ComponentKind.COMM_SENDER

    def __init__(self, keys: Optional[List[str]] = None, **kwargs):
        super().__init__(**kwargs)
        self.keys = list(keys or [])
        self._sent = {}

    def _initialize(self) -> None:
        self.outbox = Outbox(self.owner.id, self.context.channel)

    def _compute(self, view: WorldView):
        entries = []
        for key in self.keys:
            value = view.knowledge.get(key)
            if value is MISSING:
                continue
            wire = _wire_value(value)
            if self._sent.get(key) != wire:
                entries.append((f"{view.agent_id}/{key}", wire))
        return tuple(entries), view.time

    def _update(self, value) -> None:
        entries, time = value
        if not entries:
            return
        self.outbox.broadcast(KnowledgePayload(entries=entries), time)
        for key, wire in entries:
            self._sent[key.split("/", 1)[1]] = wire

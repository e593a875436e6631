"""
Componentes del almacen: despachador, pujador y ejecutor de tareas.

Descripción
-------------------
    MÓDULO: Flujo de mensajes (todos TaskPayload, distinguidos por `status`):
        1) el despachador anuncia las tareas nuevas ("open", difusion);
        2) cada robot puja con su riesgo ("bid", al despachador) en el mismo paso;
        3) en el paso siguiente el despachador ejecuta `allocate` y adjudica
           ("assigned", al ganador); las tareas sin puja valida se reanuncian;
        4) el robot ejecuta y notifica "done" o "failed".
    Las vueltas a casa se adjudican directamente a cada robot, sin subasta.

    El despachador es un agente sin entidad y con id menor que los robots, de modo
    que sus anuncios y adjudicaciones llegan a los robots en el mismo paso.

Conocimiento
-------------------
    - "tasking:commitment": copia del compromiso del robot (la escribe el ejecutor).
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from comms.channel import Outbox
from configs.package import CONF
from core.awareness import TimeSeries
from core.component import Component, ComponentKind, WorldView, register_component
from core.knowledge import MISSING, KnowledgeDatabase, ValueKind
from core.rng import substream
from tasking.allocation import Allocation, allocate
from tasking.nominal import WaypointPursuit
from tasking.regions import Warehouse
from tasking.risk import estimate_task_risk
from tasking.tasks import CapabilityProfile, Commitment, FetchTask, TaskStatus
from utils.logger import get_logger

log = get_logger("Tasking")

COMMITMENT_KEY = "tasking:commitment"
TIME_TOL = 1e-9


@dataclass(frozen=True)
class ScheduledTask:
    """Tarea de recogida emitida en `step` con plazo `deadline` pasos."""
    step: int
    origin: str
    destination: str
    deadline: int


@dataclass(frozen=True)
class HomeCall:
    """Orden de vuelta a casa para todos los robots."""
    step: int
    deadline: int


def _task_entries(knowledge: KnowledgeDatabase, prefix: str):
    return [(e.value, e.timestamp) for _, e in sorted(knowledge.with_prefix(prefix).items())]


# --------------------
# Despachador
# --------------------
@dataclass
class DispatchPlan:
    step: int = 0
    time: float = 0.0
    results: List[Tuple[int, str, int]] = field(default_factory=list)
    allocation: Allocation = field(default_factory=Allocation)
    expired: List[int] = field(default_factory=list)
    issued: List[FetchTask] = field(default_factory=list)
    homes: List[FetchTask] = field(default_factory=list)
    reannounce: List[int] = field(default_factory=list)


@register_component("task-dispatcher")
class TaskDispatcher(Component):
    """
    Descripción
        CLASE: Emite las tareas del calendario, subasta las abiertas y lleva el
        registro de estados.

    Argumentos
        - schedule (Sequence[ScheduledTask])
        - robots (Dict[int, str]): id de agente -> region de casa.
        - home_call (Optional[HomeCall])
        - epsilon (float): umbral de riesgo de la subasta.

    Atributos
        - tasks (Dict[int, FetchTask]): registro (orden de emision).
        - allocations (List[(step, Allocation)]): rondas de subasta.
    """
    kind = ComponentKind.CUSTOM

    def __init__(self, schedule: Sequence[ScheduledTask] = (), robots: Optional[Dict[int, str]] = None,
                 home_call: Optional[HomeCall] = None, epsilon: float = CONF.TASKING.RISK_THRESHOLD, **kwargs):
        super().__init__(**kwargs)
        self.schedule = sorted(schedule, key=lambda s: s.step)
        self.robots = dict(sorted((robots or {}).items()))
        self.home_call = home_call
        self.epsilon = float(epsilon)
        self.tasks: Dict[int, FetchTask] = {}
        self.announced: Dict[int, float] = {}
        self.allocations: List[Tuple[int, Allocation]] = []

    def _initialize(self) -> None:
        self.outbox = Outbox(self.owner.id, self.context.channel)
        self.dt = self.context.world.dt

    def _compute(self, view: WorldView) -> DispatchPlan:
        kb = view.knowledge
        plan = DispatchPlan(view.step, view.time)
        # 1) resultados de los robots
        for status in ("done", "failed"):
            for p, ts in _task_entries(kb, f"task:{status}:"):
                task = self.tasks.get(p.task_id)
                if task is not None and task.status == TaskStatus.ASSIGNED and task.assignee == p.agent_id:
                    plan.results.append((task.id, status, int(round(ts / self.dt))))
        # 2) subasta de las abiertas anunciadas en pasos anteriores
        open_tasks = [t for t in self.tasks.values() if t.status == TaskStatus.OPEN]
        biddable = []
        for task in open_tasks:
            if view.step > task.due_step:
                plan.expired.append(task.id)
            elif self.announced[task.id] < view.time - TIME_TOL:
                biddable.append(task)
        bids: Dict[int, Dict[int, float]] = {}
        for task in biddable:
            since = self.announced[task.id]
            for p, ts in _task_entries(kb, f"task:bid:{task.id}:"):
                if ts >= since - TIME_TOL:
                    bids.setdefault(task.id, {})[p.agent_id] = p.risk
        if biddable:
            plan.allocation = allocate(biddable, bids, self.epsilon)
            plan.reannounce = list(plan.allocation.flagged)
        # 3) emisiones del paso
        next_id = max(self.tasks, default=0) + 1
        for item in self.schedule:
            if item.step == view.step:
                plan.issued.append(FetchTask(next_id, item.origin, item.destination, item.deadline, view.step))
                next_id += 1
        if self.home_call is not None and self.home_call.step == view.step:
            for agent_id, home in self.robots.items():
                plan.homes.append(FetchTask(next_id, None, home, self.home_call.deadline, view.step))
                next_id += 1
        return plan

    def _update(self, plan: DispatchPlan) -> None:
        step, time = plan.step, plan.time
        for task_id, status, at in plan.results:
            task = self.tasks[task_id]
            if status == "done":
                task.complete(at)
            else:
                task.fail(at)
        for task_id in plan.expired:
            self.tasks[task_id].fail(step)
            log.info("task %s expired unassigned at step %s", task_id, step)
        if plan.allocation.assignments or plan.allocation.flagged:
            self.allocations.append((step, plan.allocation))
        for task_id, agent_id in sorted(plan.allocation.assignments.items()):
            task = self.tasks[task_id]
            task.assign(agent_id)
            risk = plan.allocation.winning_risk[task_id]
            self.outbox.send(agent_id, task.payload("assigned", agent_id, risk), time)
        for task_id in plan.reannounce:
            self.announced[task_id] = time
            self.outbox.broadcast(self.tasks[task_id].payload("open"), time)
        for task in plan.issued:
            self.tasks[task.id] = task
            self.announced[task.id] = time
            self.outbox.broadcast(task.payload("open"), time)
        for task, agent_id in zip(plan.homes, self.robots):
            self.tasks[task.id] = task
            task.assign(agent_id)
            self.outbox.send(agent_id, task.payload("assigned", agent_id), time)


# --------------------
# Robots
# --------------------
@register_component("task-bidder")
class TaskBidder(Component):
    """
    Descripción
        CLASE: Puja por cada tarea anunciada en el paso con su riesgo estimado y
        deja en la consciencia propia el menor riesgo pujado.

    Argumentos
        - profile (CapabilityProfile)
        - warehouse (Warehouse)
        - dispatcher_id (int)
        - n_samples (int): ejecuciones Monte-Carlo por puja.
    """
    kind = ComponentKind.RISK

    def __init__(self, profile: CapabilityProfile, warehouse: Warehouse, dispatcher_id: int = 0,
                 n_samples: int = CONF.TASKING.RISK_SAMPLES, **kwargs):
        super().__init__(**kwargs)
        self.profile = profile
        self.warehouse = warehouse
        self.dispatcher_id = int(dispatcher_id)
        self.n_samples = int(n_samples)

    def _initialize(self) -> None:
        self.outbox = Outbox(self.owner.id, self.context.channel)

    def _compute(self, view: WorldView):
        announced = [p for p, ts in _task_entries(view.knowledge, "task:open:") if abs(ts - view.time) <= TIME_TOL]
        if not announced:
            return [], view.time
        commitment = view.knowledge.get(COMMITMENT_KEY)
        if commitment is MISSING:
            commitment = Commitment(view.agent_id, park=view.awareness_self.belief[:2].copy())
        position = view.awareness_self.belief[:2]
        bids = []
        for p in sorted(announced, key=lambda p: p.task_id):
            seed = int(substream(self.context.seed, "risk", view.agent_id, p.task_id, view.step).integers(2 ** 31))
            risk = estimate_task_risk(
                position, self.profile, commitment, FetchTask.from_payload(p), self.n_samples, seed,
                warehouse=self.warehouse, now=view.step, dt=self.context.world.dt,
            )
            bids.append((p, risk))
        return bids, view.time

    def _update(self, value) -> None:
        bids, time = value
        for p, risk in bids:
            task = FetchTask.from_payload(p)
            self.outbox.send(self.dispatcher_id, task.payload("bid", self.owner.id, risk), time)
        if bids:
            self.owner.awareness_self.set_risk(min(r for _, r in bids))


@register_component("task-executor")
class TaskExecutor(Component):
    """
    Descripción
        CLASE: Controlador del robot. Incorpora las adjudicaciones, avanza el
        compromiso con la posicion medida y sigue la tarea en curso con el
        controlador nominal; notifica al despachador las tareas cerradas.

    Atributos
        - commitment (Commitment)
        - history (Dict[int, FetchTask]): copias locales de todas las tareas recibidas.
    """
    kind = ComponentKind.CONTROLLER

    def __init__(self, profile: CapabilityProfile, warehouse: Warehouse, dispatcher_id: int = 0, **kwargs):
        super().__init__(**kwargs)
        self.profile = profile
        self.warehouse = warehouse
        self.dispatcher_id = int(dispatcher_id)
        self.history: Dict[int, FetchTask] = {}

    def _initialize(self) -> None:
        agent = self.owner
        self.outbox = Outbox(agent.id, self.context.channel)
        self.dt = self.context.world.dt
        pose = self.context.world.entity(agent.entity_id).pose
        self.commitment = Commitment(agent.id, park=np.asarray(pose, dtype=float)[:2].copy())
        self.pursuit = WaypointPursuit(self.warehouse, self.profile, self.dt)
        agent.knowledge.set(COMMITMENT_KEY, self.commitment.copy(), kind=ValueKind.BLOB)

    def _compute(self, view: WorldView):
        plan = self.commitment.copy()
        queued = {t.id for t in plan.queue}
        for p, _ in _task_entries(view.knowledge, "task:assigned:"):
            if p.agent_id != view.agent_id or p.task_id in self.history or p.task_id in queued:
                continue
            task = FetchTask.from_payload(p)
            task.assign(view.agent_id)
            plan.add(task, view.step)
        position = view.awareness_self.belief[:2]
        events = plan.advance(position, view.step, self.warehouse)
        control = self.pursuit.velocity(position, plan, view.step)
        intent = TimeSeries([(view.time, position), (view.time + self.dt, position + self.dt * control)])
        return plan, control, events, intent, view.time

    def _update(self, value) -> None:
        plan, control, events, intent, time = value
        self.commitment = plan
        for task in plan.queue:
            self.history.setdefault(task.id, task)
        for task, status in events:
            self.history[task.id] = task
            self.outbox.send(self.dispatcher_id, task.payload(status, self.owner.id), time)
            log.debug("agent %s task %s %s at %s", self.owner.id, task.id, status, task.completion_step)
        self.owner.control_input = control
        self.owner.awareness_self.intent = intent
        self.owner.knowledge.set(COMMITMENT_KEY, plan.copy(), kind=ValueKind.BLOB)

"""
Tareas de recogida, perfiles de capacidad y compromisos de los robots.

Descripción
-------------------
    MÓDULO: Tipos del caso de uso del almacen.
        - FetchTask: tarea temporizada (origen opcional -> destino, plazo en pasos)
          con maquina de estados open -> assigned -> {done, failed}.
        - CapabilityProfile: velocidad maxima, ruido de actuacion y etiqueta de
          equipamiento; construye el modelo de integrador simple del robot.
        - Commitment: cola de tareas asignadas a un robot y progreso de la tarea
          en curso (origen visitado). `advance` marca llegadas, cierra tareas y
          descarta las vencidas; lo usan el ejecutor y las simulaciones de riesgo.

Invariantes
-------------------
    - deadline > 0 (las tareas de vuelta a casa admiten 0: se cumplen al emitirse
      si el robot ya esta en casa).
    - Las transiciones de estado nunca saltan pasos.
    - Cada tarea tiene como mucho un responsable.
"""
from __future__ import annotations
import copy
import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from comms.message import TaskPayload
from environment.models import SingleIntegratorModel
from utils.errors import ConfigurationError


class TaskStatus(str, enum.Enum):
    OPEN = "open"
    ASSIGNED = "assigned"
    DONE = "done"
    FAILED = "failed"


# Transiciones permitidas
_NEXT = {
    TaskStatus.OPEN: {TaskStatus.ASSIGNED, TaskStatus.FAILED},
    TaskStatus.ASSIGNED: {TaskStatus.DONE, TaskStatus.FAILED},
    TaskStatus.DONE: set(),
    TaskStatus.FAILED: set(),
}


@dataclass
class FetchTask:
    """
    Descripción
        CLASE: Tarea temporizada. Sin `origin` es una tarea de vuelta a casa
        (solo destino).

    Atributos
        - id (int)
        - origin (Optional[str]): region de recogida (punto de coleccion).
        - destination (str): region de entrega (pickup o casa).
        - deadline (int): pasos desde la emision.
        - issue_step (int)
        - status (TaskStatus)
        - assignee (Optional[int]): id del agente responsable.
        - completion_step (Optional[int])
    """
    id: int
    origin: Optional[str]
    destination: str
    deadline: int
    issue_step: int
    status: TaskStatus = TaskStatus.OPEN
    assignee: Optional[int] = None
    completion_step: Optional[int] = None

    def __post_init__(self):
        self.deadline = int(self.deadline)
        self.issue_step = int(self.issue_step)
        self.status = TaskStatus(self.status)
        if self.origin == "":
            self.origin = None
        if self.deadline < 0 or (self.origin is not None and self.deadline == 0):
            raise ConfigurationError(f"task {self.id}: deadline must be > 0, got {self.deadline}")
        if self.issue_step < 0:
            raise ConfigurationError(f"task {self.id}: issue step must be >= 0")

    @property
    def is_fetch(self) -> bool:
        return self.origin is not None

    @property
    def due_step(self) -> int:
        """Ultimo paso en el que la tarea aun puede completarse."""
        return self.issue_step + self.deadline

    @property
    def deadline_met(self) -> bool:
        return self.status == TaskStatus.DONE and self.completion_step is not None and \
            self.completion_step <= self.due_step

    def _move(self, status: TaskStatus) -> None:
        if status not in _NEXT[self.status]:
            raise ConfigurationError(f"task {self.id}: illegal transition {self.status.value} -> {status.value}")
        self.status = status

    def assign(self, agent_id: int) -> None:
        self._move(TaskStatus.ASSIGNED)
        self.assignee = int(agent_id)

    def complete(self, step: int) -> None:
        self._move(TaskStatus.DONE)
        self.completion_step = int(step)

    def fail(self, step: int) -> None:
        self._move(TaskStatus.FAILED)
        self.completion_step = int(step)

    # --------------------
    # Cable
    # --------------------
    def payload(self, status: Optional[str] = None, agent_id: int = -1, risk: float = 0.0) -> TaskPayload:
        return TaskPayload(
            task_id=self.id,
            origin=self.origin or "",
            destination=self.destination,
            deadline=self.deadline,
            issue_step=self.issue_step,
            status=status or self.status.value,
            agent_id=int(agent_id),
            risk=float(risk),
        )

    @classmethod
    def from_payload(cls, p: TaskPayload) -> "FetchTask":
        """Copia local de la tarea anunciada (estado open)."""
        return cls(p.task_id, p.origin or None, p.destination, p.deadline, p.issue_step)


@dataclass(frozen=True)
class CapabilityProfile:
    """
    Atributos
        - max_speed (float): unidades por segundo (> 0).
        - noise_scale (float): desviacion del ruido gaussiano de actuacion por eje.
        - quality (str): etiqueta de equipamiento ("standard", "worst", ...).
    """
    max_speed: float
    noise_scale: float = 0.0
    quality: str = "standard"

    def __post_init__(self):
        if not self.max_speed > 0:
            raise ConfigurationError(f"max speed must be > 0, got {self.max_speed}")
        if self.noise_scale < 0:
            raise ConfigurationError(f"noise scale must be >= 0, got {self.noise_scale}")

    def model(self) -> SingleIntegratorModel:
        v = float(self.max_speed)
        return SingleIntegratorModel(2, (-v, -v), (v, v), noise_scale=self.noise_scale, speed_limit=v)


@dataclass
class Commitment:
    """
    Descripción
        CLASE: Compromisos de un robot.

    Atributos
        - agent_id (int)
        - queue (List[FetchTask]): tareas asignadas pendientes, en orden de adjudicacion.
        - start (Dict[int, int]): primer paso de ejecucion por tarea.
        - visited (Set[int]): tareas cuyo origen ya se visito.
        - park (Optional[np.ndarray]): punto de espera cuando la cola esta vacia.
    """
    agent_id: int
    queue: List[FetchTask] = field(default_factory=list)
    start: Dict[int, int] = field(default_factory=dict)
    visited: Set[int] = field(default_factory=set)
    park: Optional[np.ndarray] = None

    def add(self, task: FetchTask, start_step: int) -> None:
        if any(t.id == task.id for t in self.queue):
            raise ConfigurationError(f"agent {self.agent_id}: task {task.id} already committed")
        self.queue.append(task)
        self.start[task.id] = int(start_step)

    def head(self, step: int) -> Optional[FetchTask]:
        """Primera tarea de la cola cuya ejecucion ya puede empezar."""
        if self.queue and self.start.get(self.queue[0].id, 0) <= step:
            return self.queue[0]
        return None

    def origin_pending(self, task: FetchTask) -> bool:
        return task.origin is not None and task.id not in self.visited

    def remaining(self, step: int) -> List[Tuple[FetchTask, int]]:
        """Pasos restantes hasta el vencimiento de cada tarea de la cola."""
        return [(t, t.due_step - int(step)) for t in self.queue]

    def validate(self, step: int) -> None:
        for t in self.queue:
            if t.status != TaskStatus.ASSIGNED or t.assignee != self.agent_id:
                raise ConfigurationError(f"agent {self.agent_id}: task {t.id} in queue is not assigned to it")
            if t.issue_step > step:
                raise ConfigurationError(f"agent {self.agent_id}: task {t.id} issued after step {step}")

    def advance(self, position: Sequence[float], step: int, regions) -> List[Tuple[FetchTask, str]]:
        """
        Descripción
            MÉTODO: Actualiza el progreso con la posicion muestreada en `step`.
            1) descarta (failed) las tareas vencidas;
            2) marca el origen de la tarea en curso si el robot esta dentro;
            3) cierra (done) la tarea en curso si ya visito el origen y esta en el destino.
            Repite 2-3 mientras haya progreso.

        Argumentos
            - regions: objeto con `region(nombre) -> Rect`.

        Retorno
            - List[(FetchTask, "done" | "failed")]: tareas cerradas en este paso.
        """
        events: List[Tuple[FetchTask, str]] = []
        # 1) vencidas
        for t in list(self.queue):
            if step > t.due_step:
                self._drop(t)
                t.fail(step)
                events.append((t, "failed"))
        # 2-3) progreso de la cabeza
        while True:
            head = self.head(step)
            if head is None:
                break
            if self.origin_pending(head):
                if not regions.region(head.origin).contains(position):
                    break
                self.visited.add(head.id)
            if not regions.region(head.destination).contains(position):
                break
            self._drop(head)
            head.complete(step)
            events.append((head, "done"))
        if events and not self.queue:
            self.park = np.asarray(position, dtype=float)[:2].copy()
        return events

    def _drop(self, task: FetchTask) -> None:
        self.queue = [t for t in self.queue if t.id != task.id]
        self.start.pop(task.id, None)
        self.visited.discard(task.id)

    def copy(self) -> "Commitment":
        return copy.deepcopy(self)

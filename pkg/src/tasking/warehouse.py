"""
Escenario del almacen: cuatro robots, un despachador y tareas temporizadas.

Descripción
-------------------
    MÓDULO: Reglas del escenario por defecto:
        1) A y B salen de H-1, C y D de H-2; ningun robot sale nunca del almacen.
        2) Paso 1: CP-1 -> PICKUP en 10 pasos; CP-2 y CP-3 -> PICKUP en 7.
        3) Paso 15: CP-1 y CP-2 -> PICKUP en 10.
        4) Paso 30: todos vuelven a casa en 10.
    C tiene el peor equipamiento (lento y ruidoso).

    `run_warehouse` ejecuta en modo sincrono y devuelve el informe por tarea
    (responsable, paso de finalizacion, plazo cumplido, robustez de la formula
    de la tarea sobre la trayectoria real) y los recuentos por agente.
"""
from __future__ import annotations
import math
import time as _time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np

from comms.channel import Channel, InProcessChannel
from configs.package import CONF
from core.agent import Agent
from core.components import MessageReceiver, NoiseUncertainty, PerceptionComponent
from core.coordinator import Coordinator, SimulationTrace
from environment.entity import Disc, Entity
from environment.world import World2D
from logic.stl import Trace, stl_robustness
from tasking.components import HomeCall, ScheduledTask, TaskBidder, TaskDispatcher, TaskExecutor
from tasking.formulas import task_to_formula
from tasking.regions import Warehouse, default_warehouse
from tasking.tasks import CapabilityProfile, FetchTask, TaskStatus
from utils.errors import ConfigurationError, InsufficientTraceError
from utils.logger import get_logger

log = get_logger("Warehouse")

DISPATCHER_ID = 0

REPORT_COLUMNS = (
    "task_id", "kind", "origin", "destination", "issue_step", "deadline",
    "assignee", "completion_step", "deadline_met", "status", "robustness",
)


@dataclass
class RobotSpec:
    name: str
    home: str
    start: Sequence[float]
    profile: CapabilityProfile


@dataclass
class WarehouseConfig:
    """
    Atributos
        - warehouse (Warehouse)
        - robots (Dict[int, RobotSpec]): por id de agente (> 0).
        - schedule (List[ScheduledTask])
        - home_call (Optional[HomeCall])
        - epsilon (float): umbral de riesgo.
        - n_samples (int): ejecuciones Monte-Carlo por puja.
        - steps (int): pasos de simulacion.
        - dt (float)
    """
    warehouse: Warehouse
    robots: Dict[int, RobotSpec]
    schedule: List[ScheduledTask] = field(default_factory=list)
    home_call: Optional[HomeCall] = None
    epsilon: float = CONF.TASKING.RISK_THRESHOLD
    n_samples: int = CONF.TASKING.RISK_SAMPLES
    steps: int = 41
    dt: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.robots:
            raise ConfigurationError("warehouse needs at least one robot")
        if DISPATCHER_ID in self.robots:
            raise ConfigurationError(f"agent id {DISPATCHER_ID} is reserved for the dispatcher")
        for rid, robot in self.robots.items():
            self.warehouse.region(robot.home)
            if not self.warehouse.bounds.contains(robot.start):
                raise ConfigurationError(f"robot {robot.name} starts outside the warehouse")
        for item in self.schedule:
            self.warehouse.region(item.origin)
            self.warehouse.region(item.destination)
            if item.deadline <= 0 or item.step < 0:
                raise ConfigurationError(f"scheduled task {item} needs step >= 0 and deadline > 0")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigurationError(f"risk threshold must lie in [0, 1], got {self.epsilon}")
        if self.n_samples < 1 or self.steps < 1 or not self.dt > 0:
            raise ConfigurationError("n_samples and steps must be >= 1 and dt > 0")

    def name_of(self, agent_id: Optional[int]) -> str:
        return "" if agent_id is None else self.robots[agent_id].name

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "WarehouseConfig":
        robots = {}
        for raw in data["robots"]:
            profile = CapabilityProfile(float(raw["max_speed"]), float(raw.get("noise_scale", 0.0)),
                                        str(raw.get("quality", "standard")))
            robots[int(raw["id"])] = RobotSpec(str(raw["name"]), str(raw["home"]), tuple(raw["start"]), profile)
        home = data.get("home_call")
        return cls(
            warehouse=Warehouse.from_dict(data["warehouse"]),
            robots=robots,
            schedule=[ScheduledTask(int(s["step"]), str(s["origin"]), str(s["destination"]), int(s["deadline"]))
                      for s in data.get("schedule", [])],
            home_call=None if home is None else HomeCall(int(home["step"]), int(home["deadline"])),
            epsilon=float(data.get("epsilon", CONF.TASKING.RISK_THRESHOLD)),
            n_samples=int(data.get("n_samples", CONF.TASKING.RISK_SAMPLES)),
            steps=int(data.get("steps", 41)),
            dt=float(data.get("dt", 1.0)),
        )


def warehouse_setup() -> WarehouseConfig:
    fast = CapabilityProfile(3.0, 0.05, "standard")
    worst = CapabilityProfile(1.0, 0.5, "worst")
    robots = {
        1: RobotSpec("A", "H-1", (2.0, 2.0), fast),
        2: RobotSpec("B", "H-1", (3.0, 2.0), fast),
        3: RobotSpec("C", "H-2", (17.0, 2.0), worst),
        4: RobotSpec("D", "H-2", (18.0, 2.0), fast),
    }
    schedule = [
        ScheduledTask(1, "CP-1", "PICKUP", 10),
        ScheduledTask(1, "CP-2", "PICKUP", 7),
        ScheduledTask(1, "CP-3", "PICKUP", 7),
        ScheduledTask(15, "CP-1", "PICKUP", 10),
        ScheduledTask(15, "CP-2", "PICKUP", 10),
    ]
    return WarehouseConfig(default_warehouse(), robots, schedule, HomeCall(30, 10))


def build_warehouse(cfg: WarehouseConfig, seed: int = 0, channel: Optional[Channel] = None) -> Coordinator:
    """Mundo con muros, canal, despachador (agente 0, sin entidad) y un agente por robot."""
    world = World2D(cfg.warehouse.bounds, cfg.dt, seed, cfg.warehouse.walls)
    channel = channel or InProcessChannel(drop_probability=0.0)
    dispatcher = Agent(DISPATCHER_ID, require_controller=False)
    dispatcher.add_component(MessageReceiver())
    dispatcher.add_component(TaskDispatcher(
        cfg.schedule, {rid: r.home for rid, r in cfg.robots.items()}, cfg.home_call, cfg.epsilon,
    ))
    agents = [dispatcher]
    for rid, robot in sorted(cfg.robots.items()):
        world.add_entity(Entity(rid, robot.start, robot.profile.model(), Disc(CONF.TASKING.ROBOT_RADIUS)))
        agent = Agent(rid, entity_id=rid)
        agent.add_component(PerceptionComponent())
        agent.add_component(MessageReceiver())
        agent.add_component(NoiseUncertainty())
        agent.add_component(TaskBidder(robot.profile, cfg.warehouse, DISPATCHER_ID, cfg.n_samples))
        agent.add_component(TaskExecutor(robot.profile, cfg.warehouse, DISPATCHER_ID))
        agents.append(agent)
    return Coordinator(world, agents, channel, seed=seed)


@dataclass
class WarehouseResult:
    """
    Atributos
        - tasks (List[FetchTask]): registro final del despachador, por id.
        - fetch_counts (Dict[str, int]): tareas de recogida adjudicadas por robot.
        - home_steps (Dict[str, Optional[int]]): paso de llegada a casa por robot.
        - exits (int): muestras con algun robot fuera del almacen.
        - wall_collisions / robot_contacts (int): contactos con muros y entre robots.
        - robustness (Dict[int, float]): robustez de la formula de cada tarea asignada.
        - states (Dict[str, np.ndarray]): trayectoria (steps + 1, 2) por robot.
    """
    tasks: List[FetchTask]
    fetch_counts: Dict[str, int]
    home_steps: Dict[str, Optional[int]]
    exits: int
    wall_collisions: int
    robot_contacts: int
    robustness: Dict[int, float]
    states: Dict[str, np.ndarray]
    steps: int
    wall_time: float
    names: Dict[int, str] = field(default_factory=dict)
    trace: Optional[SimulationTrace] = None

    @property
    def fetch_tasks(self) -> List[FetchTask]:
        return [t for t in self.tasks if t.is_fetch]

    @property
    def all_fetched_on_time(self) -> bool:
        return all(t.deadline_met for t in self.fetch_tasks)

    def report_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for t in self.tasks:
            rows.append({
                "task_id": t.id,
                "kind": "fetch" if t.is_fetch else "home",
                "origin": t.origin or "",
                "destination": t.destination,
                "issue_step": t.issue_step,
                "deadline": t.deadline,
                "assignee": self.names.get(t.assignee, ""),
                "completion_step": "" if t.completion_step is None else t.completion_step,
                "deadline_met": int(t.deadline_met),
                "status": t.status.value,
                "robustness": self.robustness.get(t.id, math.nan),
            })
        return rows

    def metrics(self) -> Dict[str, Any]:
        return {
            "fetch_counts": self.fetch_counts,
            "all_fetched_on_time": self.all_fetched_on_time,
            "home_steps": self.home_steps,
            "exits": self.exits,
            "wall_collisions": self.wall_collisions,
            "robot_contacts": self.robot_contacts,
            "issued_tasks": len(self.tasks),
            "steps": self.steps,
            "wall_time": self.wall_time,
        }


def _reconcile(ledger: Dict[int, FetchTask], coord: Coordinator) -> None:
    """Cierra en el registro las tareas cuyo aviso seguia en vuelo al acabar."""
    for agent in coord.agents:
        executor = next((c for c in agent.components if isinstance(c, TaskExecutor)), None)
        if executor is None:
            continue
        for tid, local in executor.history.items():
            task = ledger.get(tid)
            if task is None or task.status != TaskStatus.ASSIGNED or local.status == TaskStatus.ASSIGNED:
                continue
            if local.status == TaskStatus.DONE:
                task.complete(local.completion_step)
            else:
                task.fail(local.completion_step)


def run_warehouse(cfg: Optional[WarehouseConfig] = None, seed: int = 0,
                  coordinator: Optional[Coordinator] = None) -> WarehouseResult:
    """
    Descripción
        FUNCIÓN: Ejecuta el escenario del almacen en modo sincrono.

    Argumentos
        - cfg (Optional[WarehouseConfig]): por defecto `warehouse_setup()`.
        - seed (int)
        - coordinator (Optional[Coordinator]): ya montado (p. ej. con otra traza).

    Retorno
        - WarehouseResult
    """
    cfg = cfg or warehouse_setup()
    coord = coordinator or build_warehouse(cfg, seed)
    coord.initialize()
    world = coord.world
    ids = sorted(cfg.robots)
    names = {rid: cfg.robots[rid].name for rid in ids}
    states: Dict[int, List[np.ndarray]] = {rid: [world.entity(rid).pose.copy()] for rid in ids}
    counters = {"exits": 0, "walls": 0, "contacts": 0}

    def on_step(step: int, time: float, report) -> None:
        for rid in ids:
            states[rid].append(world.entity(rid).pose.copy())
        counters["exits"] += int(bool(report.boundary_violations))
        for _, what in report.collisions:
            counters["walls" if what.startswith("obstacle") else "contacts"] += 1

    coord.add_step_hook(on_step)
    started = _time.perf_counter()
    trace = coord.run_sync(cfg.steps)
    wall = _time.perf_counter() - started

    dispatcher = next(c for c in coord.agents[0].components if isinstance(c, TaskDispatcher))
    ledger = dispatcher.tasks
    _reconcile(ledger, coord)
    tasks = [ledger[k] for k in sorted(ledger)]
    traj = {rid: np.array(s) for rid, s in states.items()}

    robustness: Dict[int, float] = {}
    for t in tasks:
        if t.assignee is None:
            continue
        signal = Trace.uniform(traj[t.assignee], cfg.dt)
        try:
            robustness[t.id] = stl_robustness(signal, task_to_formula(t, cfg.warehouse, dt=cfg.dt),
                                              t.issue_step * cfg.dt)
        except InsufficientTraceError:
            robustness[t.id] = math.nan

    fetch_counts = {names[rid]: 0 for rid in ids}
    home_steps: Dict[str, Optional[int]] = {names[rid]: None for rid in ids}
    for t in tasks:
        if t.assignee is None:
            continue
        if t.is_fetch:
            fetch_counts[names[t.assignee]] += 1
        elif t.status == TaskStatus.DONE:
            home_steps[names[t.assignee]] = t.completion_step
    if any(t.status == TaskStatus.OPEN for t in tasks):
        log.warning("tasks still open at the end of the run: %s", [t.id for t in tasks if t.status == TaskStatus.OPEN])
    return WarehouseResult(
        tasks=tasks,
        fetch_counts=fetch_counts,
        home_steps=home_steps,
        exits=counters["exits"],
        wall_collisions=counters["walls"],
        robot_contacts=counters["contacts"],
        robustness=robustness,
        states={names[rid]: traj[rid] for rid in ids},
        steps=trace.steps,
        wall_time=wall,
        names=names,
        trace=trace,
    )

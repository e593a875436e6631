"""
Formacion de cinco agentes con CBF descentralizadas.

Descripción
-------------------
    MÓDULO: Integradores simples en el plano. El agente central visita dos
    puntos de interes (tareas F propias); los lideres de cada arista mantienen
    su desplazamiento respecto al centro (tareas G colaborativas). Los
    seguidores envian epsilon por el canal y los lideres resuelven su QP.

    `formation_setup` produce la descripcion por agente (posicion, caja, tareas)
    que tambien sirve de plantilla para los ficheros de escenario.
"""
from __future__ import annotations
import math
import time as _time
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from cbf.barrier import BarrierTask, build_barriers
from cbf.components import BarrierRisk, CbfController, EpsilonSender
from cbf.graph import TaskGraph
from comms.channel import Channel, InProcessChannel
from configs.package import CONF
from core.agent import Agent
from core.components import MessageReceiver, PerceptionComponent
from core.coordinator import Coordinator, SimulationTrace
from environment.entity import Disc, Entity
from environment.geometry import Rect
from environment.models import SingleIntegratorModel
from environment.world import World2D
from logic.formula import Formula
from logic.parser import parse
from logic.stl import Trace, stl_robustness
from utils.logger import get_logger

log = get_logger("Formation")


def _offset_text(var: str, value: float) -> str:
    if value == 0.0:
        return var
    return f"{var} - {value!r}" if value > 0 else f"{var} + {-value!r}"


def edge_task_text(offset: Sequence[float], radius: float, a: float, b: float) -> str:
    """G[a,b] ||x_lider - x_centro - offset|| <= radius sobre [x_lider; x_centro]."""
    dx, dy = float(offset[0]), float(offset[1])
    return (f"G[{a!r},{b!r}] (norm({_offset_text('x1 - x3', dx)}, {_offset_text('x2 - x4', dy)}) "
            f"<= {float(radius)!r})")


def visit_task_text(point: Sequence[float], radius: float, a: float, b: float) -> str:
    px, py = float(point[0]), float(point[1])
    return f"F[{a!r},{b!r}] (norm({_offset_text('x1', px)}, {_offset_text('x2', py)}) <= {float(radius)!r})"


@dataclass
class FormationConfig:
    """
    Atributos
        - dt / duration (float): periodo de muestreo y horizonte (s).
        - graph (TaskGraph)
        - positions (Dict[int, Sequence[float]]): posicion inicial por agente.
        - boxes (Dict[int, Tuple[lo, hi]]): caja de entrada por agente.
        - self_tasks (Dict[int, str]): formula propia por agente.
        - edge_tasks (Dict[Tuple[int, int], str]): formula por arista (lider, seguidor).
        - lam / nu (float): pendiente clase-K y margen de muestreo.
        - bounds (Rect): limites del mundo.
    """
    dt: float
    duration: float
    graph: TaskGraph
    positions: Dict[int, Sequence[float]]
    boxes: Dict[int, Tuple[Sequence[float], Sequence[float]]]
    self_tasks: Dict[int, str] = field(default_factory=dict)
    edge_tasks: Dict[Tuple[int, int], str] = field(default_factory=dict)
    lam: float = 1.0
    nu: float = 0.02
    bounds: Rect = field(default_factory=lambda: Rect(-20.0, -20.0, 20.0, 20.0))

    @property
    def steps(self) -> int:
        return int(round(self.duration / self.dt))

    def local_task(self, agent_id: int) -> List[Tuple[Formula, Tuple[int, ...]]]:
        """Tareas locales del agente con los ids cuyo estado apilado las evalua."""
        out = []
        if agent_id in self.self_tasks:
            out.append((parse(self.self_tasks[agent_id]), (agent_id,)))
        led = self.graph.led_edge(agent_id)
        if led is not None:
            out.append((parse(self.edge_tasks[led]), led))
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FormationConfig":
        """
        Descripción
            MÉTODO: Bloque "formation" de un escenario:
            {dt, duration, lam?, nu?, bounds?,
             agents: [{id, position, input_box: [lo_x, lo_y, hi_x, hi_y], task?}],
             edges: [{leader, follower, task}]}

        Excepciones
            - ConfigurationError: grafo invalido (ver TaskGraph).
        """
        agents = list(data["agents"])
        edges = [(int(e["leader"]), int(e["follower"])) for e in data.get("edges", [])]
        graph = TaskGraph([int(a["id"]) for a in agents], edges, {e: e[0] for e in edges})
        boxes = {}
        for a in agents:
            box = [float(v) for v in a["input_box"]]
            d = len(box) // 2
            boxes[int(a["id"])] = (box[:d], box[d:])
        cfg = cls(
            dt=float(data["dt"]),
            duration=float(data["duration"]),
            graph=graph,
            positions={int(a["id"]): tuple(float(v) for v in a["position"]) for a in agents},
            boxes=boxes,
            self_tasks={int(a["id"]): str(a["task"]) for a in agents if a.get("task")},
            edge_tasks={(int(e["leader"]), int(e["follower"])): str(e["task"]) for e in data.get("edges", [])},
            lam=float(data.get("lam", CONF.CBF.LAMBDA)),
            nu=float(data.get("nu", 0.02)),
        )
        if data.get("bounds") is not None:
            cfg.bounds = Rect.from_list(data["bounds"])
        return cfg


def formation_setup() -> FormationConfig:
    """Estrella 1-{2,3,4,5} con lideres 2..5, dos visitas del centro y una cota propia del agente 5."""
    offsets = {2: (1.0, 1.0), 3: (-1.0, 1.0), 4: (-1.0, -1.0), 5: (1.0, -1.0)}
    graph = TaskGraph.star(1, offsets)
    positions = {1: (0.0, 0.0), 2: (1.2, 1.0), 3: (-1.0, 1.1), 4: (-1.0, -1.0), 5: (1.1, -0.9)}
    boxes = {1: ((-1.0, -1.0), (1.0, 1.0))}
    boxes.update({i: ((-1.5, -1.5), (1.5, 1.5)) for i in offsets})
    self_tasks = {
        1: visit_task_text((4.0, 0.0), 0.5, 0.0, 15.0) + " & " + visit_task_text((8.0, 2.0), 0.5, 20.0, 35.0),
        5: "G[0.0,40.0] (x2 + 3.0 >= 0)",
    }
    edge_tasks = {(i, 1): edge_task_text(d, 0.5, 1.0, 40.0) for i, d in offsets.items()}
    return FormationConfig(0.05, 40.0, graph, positions, boxes, self_tasks, edge_tasks)


def build_formation(cfg: FormationConfig, seed: int = 0, channel: Optional[Channel] = None) -> Coordinator:
    """Mundo, canal y agentes (perception, receiver, riesgo, controlador, emisor de epsilon)."""
    world = World2D(cfg.bounds, cfg.dt, seed)
    channel = channel or InProcessChannel(drop_probability=0.0)
    agents = []
    for i in cfg.graph.vertices:
        lo, hi = cfg.boxes[i]
        world.add_entity(Entity(i, cfg.positions[i], SingleIntegratorModel(2, lo, hi), Disc(0.0)))
        agent = Agent(i, entity_id=i)
        kb = agent.knowledge
        for j in [i, *cfg.graph.neighbors(i)]:
            jlo, jhi = cfg.boxes[j]
            kb.set(f"input_box:{j}", np.concatenate([jlo, jhi]))
        if i in cfg.self_tasks:
            kb.set("task:self", parse(cfg.self_tasks[i]))
        for j in cfg.graph.neighbors(i):
            edge = (i, j) if cfg.graph.leader((i, j)) == i else (j, i)
            kb.set(f"task:edge:{j}", parse(cfg.edge_tasks[edge]))
        led = cfg.graph.led_edge(i)
        if led is not None:
            kb.set("cbf:leads", float(led[1]))
        follows = [leader for leader, _ in cfg.graph.followed_edges(i)]
        if follows:
            kb.set("cbf:follows", np.asarray(follows, dtype=float))
        agent.add_component(PerceptionComponent())
        agent.add_component(MessageReceiver())
        agent.add_component(BarrierRisk(lam=cfg.lam, nu=cfg.nu))
        agent.add_component(CbfController(lam=cfg.lam, nu=cfg.nu))
        if follows:
            agent.add_component(EpsilonSender(lam=cfg.lam, nu=cfg.nu))
        agents.append(agent)
    return Coordinator(world, agents, channel, seed=seed)


@dataclass
class FormationResult:
    """
    Atributos
        - min_barrier (float): minimo sobre muestras y barreras activas que empiezan positivas.
        - barrier_series (Dict[str, List[float]]): valor de cada barrera por muestra.
        - robustness (Dict[int, float]): robustez final de la tarea local de cada agente.
        - degraded (Dict[int, int]): pasos degradados por agente.
        - epsilon_messages (int): mensajes epsilon entregados.
        - states (Dict[int, np.ndarray]): trayectoria (steps + 1, 2) por agente.
    """
    min_barrier: float
    barrier_series: Dict[str, List[float]]
    robustness: Dict[int, float]
    degraded: Dict[int, int]
    epsilon_messages: int
    states: Dict[int, np.ndarray]
    steps: int
    wall_time: float
    trace: Optional[SimulationTrace] = None

    def metrics(self) -> Dict[str, Any]:
        return {
            "min_barrier": self.min_barrier,
            "robustness": {str(k): v for k, v in self.robustness.items()},
            "degraded_steps": {str(k): v for k, v in self.degraded.items()},
            "epsilon_messages": self.epsilon_messages,
            "barrier": self.barrier_series,
            "steps": self.steps,
            "wall_time": self.wall_time,
        }


def monitored_barriers(cfg: FormationConfig) -> List[Tuple[str, BarrierTask, Tuple[int, ...]]]:
    out = []
    for i, text in sorted(cfg.self_tasks.items()):
        for k, b in enumerate(build_barriers(parse(text), cfg.positions[i], 0.0, lam=cfg.lam, nu=cfg.nu)):
            out.append((f"self:{i}:{k}", b, (i,)))
    for (leader, follower), text in sorted(cfg.edge_tasks.items()):
        z = np.concatenate([cfg.positions[leader], cfg.positions[follower]])
        for b in build_barriers(parse(text), z, 0.0, lam=cfg.lam, nu=cfg.nu):
            out.append((f"edge:{leader}-{follower}", b, (leader, follower)))
    return out


def run_formation(cfg: Optional[FormationConfig] = None, seed: int = 0,
                  links_down: Iterable[Tuple[int, int]] = (),
                  coordinator: Optional[Coordinator] = None) -> FormationResult:
    """
    Descripción
        FUNCIÓN: Ejecuta la formacion en modo sincrono durante cfg.duration.

    Argumentos
        - links_down (Iterable[(emisor, receptor)]): enlaces cortados en el canal.
    """
    cfg = cfg or formation_setup()
    coord = coordinator or build_formation(cfg, seed)
    for sender, receiver in links_down:
        coord.channel.set_link(sender, receiver, False)
    coord.initialize()
    world = coord.world
    monitored = monitored_barriers(cfg)
    series: Dict[str, List[float]] = {name: [] for name, _, _ in monitored}
    positive = {name: b.delta0 > 0 for name, b, _ in monitored}
    states: Dict[int, List[np.ndarray]] = {i: [world.entity(i).pose.copy()] for i in cfg.graph.vertices}

    def sample(t: float) -> None:
        for name, barrier, ids in monitored:
            z = np.concatenate([world.entity(j).pose for j in ids])
            series[name].append(barrier.value(z, t) if barrier.active(t) else math.nan)

    sample(0.0)

    def on_step(step: int, time: float, report) -> None:
        for i in cfg.graph.vertices:
            states[i].append(world.entity(i).pose.copy())
        sample((step + 1) * cfg.dt)

    coord.add_step_hook(on_step)
    started = _time.perf_counter()
    trace = coord.run_sync(cfg.steps)
    wall = _time.perf_counter() - started

    finite = [v for name, vs in series.items() if positive[name] for v in vs if not math.isnan(v)]
    traj = {i: np.array(s) for i, s in states.items()}
    robustness = {}
    for i in cfg.graph.vertices:
        values = []
        for formula, ids in cfg.local_task(i):
            signal = np.hstack([traj[j] for j in ids])
            values.append(stl_robustness(Trace.uniform(signal, cfg.dt), formula, 0.0))
        robustness[i] = min(values) if values else math.inf
    degraded = {}
    for agent in coord.agents:
        ctrl = next(c for c in agent.components if isinstance(c, CbfController))
        degraded[agent.id] = ctrl.degraded_steps
    return FormationResult(
        min_barrier=min(finite) if finite else math.inf,
        barrier_series=series,
        robustness=robustness,
        degraded=degraded,
        epsilon_messages=coord.channel.stats.delivered,
        states=traj,
        steps=trace.steps,
        wall_time=wall,
        trace=trace,
    )

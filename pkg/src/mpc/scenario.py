"""
Encuentro en lazo cerrado: aparato propio con MPC frente a un intruso de Dubins.

Descripción
-------------------
    MÓDULO: `build_encounter` monta mundo, canal y agentes; `closed_loop` lo
    ejecuta en modo sincrono hasta que ambos llegan (o T_max) y resume las
    metricas: separacion minima, pasos de llegada, costes, tiempos de solucion
    y pasos sin candidato factible.

    Ids: aparato propio = agente/entidad 1, intruso = agente/entidad 2.
"""
from __future__ import annotations
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np

from comms.channel import Channel, InProcessChannel
from core.agent import Agent
from core.components import KnowledgeBroadcaster, MessageReceiver, PerceptionComponent
from core.coordinator import Coordinator, SimulationTrace
from environment.entity import Disc, Entity
from environment.geometry import Rect
from environment.models import UnicycleModel
from environment.world import World2D
from mpc.components import SOLUTION_KEY, DubinsController, MpcController, ScenarioRisk
from mpc.config import MpcConfig
from mpc.tree import separation
from utils.logger import get_logger

log = get_logger("Encounter")

OWNSHIP_ID = 1
INTRUDER_ID = 2


@dataclass
class EncounterResult:
    """
    Atributos
        - min_separation (float): minimo de la separacion real (inf sin intruso).
        - ownship_arrival / intruder_arrival (Optional[int]): paso de llegada.
        - separations / costs / solve_times (List[float]): series por paso.
        - infeasible_steps (List[Dict]): paso e informe del solver.
        - steps (int): pasos ejecutados.
        - trace (SimulationTrace)
        - states (Dict[int, List[np.ndarray]]): estados por entidad tras cada paso.
    """
    min_separation: float
    ownship_arrival: Optional[int]
    intruder_arrival: Optional[int]
    separations: List[float] = field(default_factory=list)
    costs: List[float] = field(default_factory=list)
    solve_times: List[float] = field(default_factory=list)
    infeasible_steps: List[Dict[str, Any]] = field(default_factory=list)
    steps: int = 0
    trace: Optional[SimulationTrace] = None
    states: Dict[int, List[np.ndarray]] = field(default_factory=dict)

    def metrics(self) -> Dict[str, Any]:
        return {
            "min_separation": self.min_separation,
            "ownship_arrival_step": self.ownship_arrival,
            "intruder_arrival_step": self.intruder_arrival,
            "steps": self.steps,
            "separation": self.separations,
            "cost": self.costs,
            "solve_time": self.solve_times,
            "infeasible_steps": self.infeasible_steps,
        }


@dataclass
class EncounterSetup:
    """Geometria del encuentro: poses (x, y, sigma) de salida y llegada de ambos aparatos."""
    config: MpcConfig
    ownship_start: Sequence[float]
    ownship_target: Sequence[float]
    intruder_start: Optional[Sequence[float]] = None
    intruder_target: Optional[Sequence[float]] = None
    t_max: int = 80

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "EncounterSetup":
        """Bloque "encounter": {mpc: {...}, ownship: {start, target}, intruder?: {start, target?}, t_max?}."""
        intruder = data.get("intruder") or {}
        return cls(
            config=MpcConfig.from_dict(dict(data.get("mpc") or {})),
            ownship_start=tuple(data["ownship"]["start"]),
            ownship_target=tuple(data["ownship"]["target"]),
            intruder_start=None if not intruder else tuple(intruder["start"]),
            intruder_target=None if intruder.get("target") is None else tuple(intruder["target"]),
            t_max=int(data.get("t_max", 80)),
        )


def encounter_setup() -> EncounterSetup:
    """Cruce en angulo recto: el intruso corta la ruta del aparato propio a mitad de camino."""
    return EncounterSetup(
        config=MpcConfig(),
        ownship_start=(0.0, 0.0, 0.0),
        ownship_target=(30.0, 0.0, 0.0),
        intruder_start=(15.0, -15.0, math.pi / 2),
        intruder_target=(15.0, 15.0, math.pi / 2),
    )


def run_encounter(setup: Optional[EncounterSetup] = None, seed: int = 0,
                  coordinator: Optional[Coordinator] = None) -> EncounterResult:
    setup = setup or encounter_setup()
    return closed_loop(setup.config, setup.ownship_start, setup.ownship_target,
                       setup.intruder_start, setup.intruder_target, setup.t_max, seed, coordinator)


def build_encounter(config: MpcConfig, ownship_start: Sequence[float], ownship_target: Sequence[float],
                    intruder_start: Optional[Sequence[float]] = None,
                    intruder_target: Optional[Sequence[float]] = None,
                    seed: int = 0, bounds: Optional[Rect] = None,
                    channel: Optional[Channel] = None) -> Coordinator:
    """Mundo uniciclo sin ruido con el aparato propio y (opcionalmente) el intruso; canal en memoria por defecto."""
    world = World2D(bounds or Rect(-1e3, -1e3, 1e3, 1e3), config.t_e, seed)
    world.add_entity(Entity(OWNSHIP_ID, ownship_start, UnicycleModel(config.v_bounds, config.u_bounds), Disc(0.0)))
    ownship = Agent(OWNSHIP_ID, entity_id=OWNSHIP_ID)
    ownship.add_component(PerceptionComponent())
    ownship.add_component(MessageReceiver())
    ownship.add_component(ScenarioRisk(rho=config.rho, R=config.R))
    has_intruder = intruder_start is not None
    ownship.add_component(MpcController(config, ownship_target, INTRUDER_ID if has_intruder else None))
    agents = [ownship]
    if has_intruder:
        if intruder_target is None:
            intruder_target = intruder_start
        model = UnicycleModel((0.0, config.intruder_v_max), config.intruder_u_bounds)
        world.add_entity(Entity(INTRUDER_ID, intruder_start, model, Disc(0.0)))
        intruder = Agent(INTRUDER_ID, entity_id=INTRUDER_ID)
        intruder.add_component(PerceptionComponent())
        intruder.add_component(DubinsController(intruder_target, config.intruder_v_max, config.intruder_u_bounds))
        intruder.add_component(KnowledgeBroadcaster(["dubins:start", "dubins:target"]))
        agents.append(intruder)
    return Coordinator(world, agents, channel or InProcessChannel(drop_probability=0.0), seed=seed)


def closed_loop(config: MpcConfig, ownship_start: Sequence[float], ownship_target: Sequence[float],
                intruder_start: Optional[Sequence[float]] = None,
                intruder_target: Optional[Sequence[float]] = None,
                t_max: int = 80, seed: int = 0, coordinator: Optional[Coordinator] = None) -> EncounterResult:
    """
    Descripción
        FUNCIÓN: Alterna solve_mpc, aplica (v_0, u_0) y avanza ambos aparatos
        hasta que los dos estan dentro de su tolerancia de llegada o t_max pasos.

    Retorno
        - EncounterResult
    """
    coord = coordinator or build_encounter(config, ownship_start, ownship_target,
                                           intruder_start, intruder_target, seed)
    coord.initialize()
    world = coord.world
    ownship = coord.context.agents[OWNSHIP_ID]
    mpc: MpcController = next(c for c in ownship.components if isinstance(c, MpcController))
    intruder_agent = coord.context.agents.get(INTRUDER_ID)
    dubins = None
    if intruder_agent is not None:
        dubins = next(c for c in intruder_agent.components if isinstance(c, DubinsController))

    result = EncounterResult(math.inf, None, None)
    result.states = {e.id: [e.pose.copy()] for e in world.modeled_entities()}

    def on_step(step: int, time: float, report) -> None:
        for e in world.modeled_entities():
            result.states[e.id].append(e.pose.copy())
        own = world.entity(OWNSHIP_ID).pose
        if dubins is not None:
            sep = float(separation(own, world.entity(INTRUDER_ID).pose, config.R))
            result.separations.append(sep)
            result.min_separation = min(result.min_separation, sep)
            if result.intruder_arrival is None and dubins.intent.arrived(time + world.dt):
                result.intruder_arrival = step + 1
        if result.ownship_arrival is None and mpc.arrived(own):
            result.ownship_arrival = step + 1
        solution = ownship.knowledge.get(SOLUTION_KEY, None)
        result.solve_times.append(float(ownship.knowledge.get("mpc:solve_time", 0.0)))
        if solution is not None:
            result.costs.append(solution.cost)
            if not solution.feasible:
                result.infeasible_steps.append({"step": step, **solution.report})

    coord.add_step_hook(on_step)

    def done(step: int) -> bool:
        return result.ownship_arrival is not None and (dubins is None or result.intruder_arrival is not None)

    result.trace = coord.run_sync(t_max, stop_when=done)
    result.steps = result.trace.steps
    if result.infeasible_steps:
        log.warning("%d steps without a feasible candidate (first at step %d)",
                    len(result.infeasible_steps), result.infeasible_steps[0]["step"])
    return result

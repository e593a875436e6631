"""
Componentes del encuentro aparato propio / intruso.

    - "mpc-controller": MpcController, MPC con arbol de escenarios sobre la
      intencion de Dubins recibida del intruso.
    - "dubins-controller": DubinsController, el intruso sigue su camino de Dubins
      en lazo abierto y publica inicio/objetivo en su conocimiento.
    - "scenario-risk": ScenarioRisk, fraccion de ramas del ultimo arbol predicho
      que violan la separacion minima frente al plan vigente.
"""
from __future__ import annotations
import math
import time as _time
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from core.awareness import TimeSeries
from core.component import Component, ComponentKind, WorldView, register_component
from core.knowledge import MISSING, ValueKind
from core.rng import substream
from mpc.config import MpcConfig
from mpc.dubins import DubinsIntent
from mpc.solver import MpcSolution, solve_mpc
from mpc.tree import separation
from utils.errors import ComponentError, PathConstructionError
from utils.logger import get_logger

log = get_logger("MPC")

SOLUTION_KEY = "mpc:solution"


def _config(config: Union[MpcConfig, Dict[str, Any], None]) -> MpcConfig:
    if isinstance(config, MpcConfig):
        return config
    return MpcConfig.from_dict(dict(config or {}))


@register_component("mpc-controller")
class MpcController(Component):
    """
    Descripción
        CLASE: Controlador de horizonte deslizante del aparato propio. En cada
        paso resuelve `solve_mpc` y aplica solo (v_0, u_0); al entrar en la
        tolerancia de llegada se detiene.

    Argumentos
        - config (MpcConfig | dict)
        - target (Sequence[float]): estado objetivo (x, y, sigma).
        - intruder_id (Optional[int]): agente intruso; None = sin intruso.

    Notas
        - La intencion se lee de "<intruso>/dubins:start" y "<intruso>/dubins:target".
          Mientras no llega, se supone que el intruso sigue recto.
        - Escribe "mpc:solution" (ultima solucion), "mpc:cost", "mpc:feasible" y
          "mpc:solve_time" en el conocimiento.
    """
    kind = ComponentKind.CONTROLLER

    def __init__(self, config: Union[MpcConfig, Dict[str, Any], None] = None,
                 target: Sequence[float] = (0.0, 0.0, 0.0), intruder_id: Optional[int] = None, **kwargs):
        super().__init__(**kwargs)
        self.config = _config(config)
        self.target = np.asarray(target, dtype=float)
        self.intruder_id = None if intruder_id is None else int(intruder_id)
        self._intents: Dict[Tuple, DubinsIntent] = {}

    def _initialize(self) -> None:
        self.owner.knowledge.set("goal", self.target)

    def arrived(self, state: np.ndarray) -> bool:
        return float(np.hypot(*(state[:2] - self.target[:2]))) <= self.config.arrival_tolerance

    def _intent(self, view: WorldView, s2: np.ndarray) -> Optional[DubinsIntent]:
        cfg = self.config
        start = view.knowledge.get(f"{self.intruder_id}/dubins:start")
        target = view.knowledge.get(f"{self.intruder_id}/dubins:target")
        if start is MISSING or target is MISSING:
            # intencion desconocida: recta a velocidad maxima
            reach = cfg.intruder_v_max * cfg.t_e * (cfg.horizon + 1) * 2.0
            start = s2
            target = s2 + np.array([reach * math.cos(s2[2]), reach * math.sin(s2[2]), 0.0])
        key = tuple(np.round(np.concatenate([start, target]), 12))
        if key not in self._intents:
            try:
                self._intents[key] = DubinsIntent(start, target, cfg.intruder_v_max, cfg.intruder_u_bounds, cfg.t_e)
            except PathConstructionError as err:
                log.warning("agent %s: intruder intent unusable: %s", view.agent_id, err)
                return None
        return self._intents[key]

    def _compute(self, view: WorldView):
        s_t = view.awareness_self.belief
        if s_t.shape != (3,):
            raise ComponentError(f"agent {view.agent_id}: MPC needs a unicycle belief, got shape {s_t.shape}")
        if self.arrived(s_t):
            return np.zeros(2), None, 0.0
        s2 = intent = None
        other = view.awareness_others.get(self.intruder_id) if self.intruder_id is not None else None
        if other is not None and other.belief.shape == (3,):
            s2 = other.belief
            intent = self._intent(view, s2)
        previous = view.knowledge.get(SOLUTION_KEY)
        warm = None if previous is MISSING or previous is None else (previous.v, previous.u)
        seed = int(substream(self.context.seed, "mpc", view.agent_id, view.step).integers(2 ** 31))
        started = _time.perf_counter()
        solution = solve_mpc(self.config, s_t, s2, intent, self.target, t=view.time, seed=seed, warm_start=warm)
        elapsed = _time.perf_counter() - started
        return np.array(solution.first_input), solution, elapsed

    def _update(self, value) -> None:
        control, solution, elapsed = value
        agent = self.owner
        agent.control_input = control
        agent.knowledge.set(SOLUTION_KEY, solution, kind=ValueKind.BLOB)
        agent.knowledge.set("mpc:solve_time", elapsed)
        if solution is None:
            return
        agent.knowledge.set("mpc:cost", solution.cost)
        agent.knowledge.set("mpc:feasible", solution.feasible, kind=ValueKind.BLOB)
        t0 = self.context.clock.time
        agent.awareness_self.intent = TimeSeries(
            [(t0 + k * self.config.t_e, s) for k, s in enumerate(solution.trajectory)]
        )


@register_component("dubins-controller")
class DubinsController(Component):
    """
    Descripción
        CLASE: Intruso que recorre su camino de Dubins a velocidad maxima y se
        detiene al completar la duracion del camino.

    Argumentos
        - target (Sequence[float]): estado objetivo.
        - v_max (float): velocidad lineal constante.
        - u_bounds (Sequence[float]): cotas de giro.
    """
    kind = ComponentKind.CONTROLLER

    def __init__(self, target: Sequence[float] = (0.0, 0.0, 0.0), v_max: float = 1.0,
                 u_bounds: Sequence[float] = (-0.2, 0.2), **kwargs):
        super().__init__(**kwargs)
        self.target = np.asarray(target, dtype=float)
        self.v_max = float(v_max)
        self.u_bounds = (float(u_bounds[0]), float(u_bounds[1]))
        self.intent: Optional[DubinsIntent] = None

    def _initialize(self) -> None:
        world = self.context.world
        if world is None or self.owner.entity_id is None:
            raise ComponentError(f"agent {self.owner.id}: Dubins controller needs an entity")
        start = world.entity(self.owner.entity_id).pose.copy()
        self.intent = DubinsIntent(start, self.target, self.v_max, self.u_bounds, world.dt)
        self.owner.knowledge.set("dubins:start", start)
        self.owner.knowledge.set("dubins:target", self.target)
        log.info("agent %s Dubins path %s, duration %.2f", self.owner.id, self.intent.word, self.intent.duration)

    def _compute(self, view: WorldView) -> np.ndarray:
        if self.intent.arrived(view.time):
            return np.zeros(2)
        return np.array([self.v_max, self.intent.dubins_input(view.time)])

    def _update(self, control: np.ndarray) -> None:
        self.owner.control_input = control


@register_component("scenario-risk")
class ScenarioRisk(Component):
    """Riesgo = ramas del arbol con separacion < rho en algun paso / M."""
    kind = ComponentKind.RISK

    def __init__(self, rho: float = 4.0, R: float = 1.0, **kwargs):
        super().__init__(**kwargs)
        self.rho = float(rho)
        self.R = float(R)

    def _compute(self, view: WorldView) -> float:
        solution: Optional[MpcSolution] = view.knowledge.get(SOLUTION_KEY, None)
        if solution is None or len(solution.tree) == 0:
            return 0.0
        sep = separation(solution.trajectory[None, 1:, :], solution.tree[:, 1:, :], self.R)
        return float(np.mean(np.any(sep < self.rho, axis=1)))

    def _update(self, risk: float) -> None:
        self.owner.awareness_self.set_risk(risk)

"""
Coordinador de la simulacion: modos sincrono y asincrono.

Descripción
-------------------
    MÓDULO: El coordinador inicializa agentes y entorno y ejecuta:
        - run_sync(n_steps): por paso, primero los componentes de intercambio
          (`exchange = True`) de todos los agentes; despues cada agente (en orden
          de id) ejecuta el resto de sus componentes en el orden fijado al
          inicializar; por ultimo el entorno avanza un paso con las entradas
          pendientes (retencion de orden cero).
        - run_async(wall_duration, gates): cada componente itera en su propia
          tarea asyncio segun su compuerta; el entorno avanza en su propia tarea
          con periodo dt * time_scale.

Conceptos clave
-------------------
    - SimulationContext: mundo, canal, bus, semilla y reloj compartidos por los
      componentes (lo reciben en initialize).
    - Step hooks: callbacks (step, time, report) tras cada paso del entorno; los
      usan las metricas de los casos de uso.
    - Determinismo: en modo sincrono la traza depende solo de (config, seed).
"""
from __future__ import annotations
import asyncio
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from core.agent import Agent
from core.component import Component, ComponentKind
from core.events import EventBus
from core.gates import EventGate, Gate, PeriodicGate
from core.trace import TraceRecorder, TraceRow
from utils.errors import SetupError
from utils.logger import get_logger

log = get_logger("Coordinator")


@dataclass
class Clock:
    step: int = 0
    time: float = 0.0


class SimulationContext:
    """Servicios compartidos por los componentes de todos los agentes."""

    def __init__(self, world=None, channel=None, bus: Optional[EventBus] = None, seed: int = 0):
        self.world = world
        self.channel = channel
        self.bus = bus or EventBus()
        self.seed = int(seed)
        self.clock = Clock()
        self.agents: Dict[int, Agent] = {}


@dataclass
class SimulationTrace:
    rows: List[TraceRow]
    reports: list = field(default_factory=list)
    steps: int = 0
    recorder: Optional[TraceRecorder] = None


StepHook = Callable[[int, float, object], None]


class Coordinator:
    """
    Descripción
        CLASE: Orquesta agentes, entorno, canal y bus de eventos.

    Atributos
        - world (World2D): entorno (unico escritor: el coordinador).
        - agents (List[Agent]): ordenados por id.
        - context (SimulationContext)
        - recorder (TraceRecorder)

    Métodos y Funciones
        - initialize: inicializa todos los agentes y engancha la traza.
        - add_step_hook: registra un callback tras cada paso del entorno.
        - run_sync / run_async
        - close: cierra el canal (y su hub TCP, si lo posee).
    """

    def __init__(self, world, agents: List[Agent], channel=None, bus: Optional[EventBus] = None,
                 seed: int = 0, recorder: Optional[TraceRecorder] = None):
        ids = [a.id for a in agents]
        if len(set(ids)) != len(ids):
            raise SetupError(f"agent ids must be unique: {ids}")
        self.world = world
        self.agents = sorted(agents, key=lambda a: a.id)
        self.context = SimulationContext(world, channel, bus, seed)
        self.context.agents = {a.id: a for a in self.agents}
        self.recorder = recorder or TraceRecorder()
        self._hooks: List[StepHook] = []
        self._initialized = False

    @property
    def bus(self) -> EventBus:
        return self.context.bus

    @property
    def channel(self):
        return self.context.channel

    def initialize(self) -> None:
        if self.world is None:
            raise SetupError("no environment attached to the coordinator")
        self.recorder.attach(self.bus, self.agents)
        if self.channel is not None:
            for agent in self.agents:
                self.channel.register(agent.id)
        for agent in self.agents:
            agent.initialize(self.context)
        self._initialized = True

    def close(self) -> None:
        if self.channel is not None:
            self.channel.close()

    def add_step_hook(self, hook: StepHook) -> None:
        self._hooks.append(hook)

    def _check_ready(self) -> None:
        if self.world is None:
            raise SetupError("no environment attached to the coordinator")
        pending = [a.id for a in self.agents if not a.initialized]
        if pending:
            raise SetupError(f"agents not initialized: {pending}")

    def _pending_inputs(self) -> Dict[int, np.ndarray]:
        inputs = {}
        for agent in self.agents:
            if agent.entity_id is not None and agent.control_input is not None:
                inputs[agent.entity_id] = agent.control_input
        return inputs

    def _environment_step(self, step: int, time: float):
        report = self.world.step(self._pending_inputs())
        self.recorder.record_world(step, time, self.world)
        for hook in self._hooks:
            hook(step, time, report)
        return report

    # --------------------
    # Modo sincrono
    # --------------------
    def run_sync(self, n_steps: int, stop_when: Optional[Callable[[int], bool]] = None) -> SimulationTrace:
        """
        Descripción
            MÉTODO: Ejecuta `n_steps` pasos deterministas.

        Argumentos
            - n_steps (int): numero maximo de pasos.
            - stop_when (Optional[Callable[[int], bool]]): parada anticipada tras el paso k.

        Retorno
            - SimulationTrace: filas de traza e informes de paso.

        Excepciones
            - SetupError: agente sin inicializar o sin entorno, antes del paso 0.
        """
        self._check_ready()
        reports = []
        steps = 0
        for step in range(int(n_steps)):
            time = step * self.world.dt
            self.context.clock.step, self.context.clock.time = step, time
            # 1) fase de intercambio (p. ej. epsilon de los seguidores)
            for agent in self.agents:
                for component in agent.components:
                    if component.exchange:
                        component.compute_and_update(step, time)
            # 2) componentes: agentes por id, componentes en su orden fijo
            for agent in self.agents:
                for component in agent.components:
                    if not component.exchange:
                        component.compute_and_update(step, time)
            # 3) entorno
            reports.append(self._environment_step(step, time))
            steps = step + 1
            if stop_when is not None and stop_when(step):
                break
        return SimulationTrace(list(self.recorder.rows), reports, steps, self.recorder)

    # --------------------
    # Modo asincrono
    # --------------------
    def run_async(self, wall_duration: float, gates: Optional[Dict[tuple, Gate]] = None,
                  time_scale: float = 1.0) -> SimulationTrace:
        """
        Descripción
            MÉTODO: Ejecuta cada componente como tarea independiente durante
            `wall_duration` segundos de reloj.

        Argumentos
            - wall_duration (float): duracion en segundos.
            - gates (Dict[(agent_id, component_name), Gate]): compuertas; si falta,
              se usa `component.gate` o un periodo de dt * time_scale.
            - time_scale (float): segundos de reloj por segundo simulado.
        """
        self._check_ready()
        return asyncio.run(self._run_async(float(wall_duration), gates or {}, float(time_scale)))

    def _gate_for(self, agent: Agent, component: Component, gates: Dict[tuple, Gate], time_scale: float) -> Gate:
        gate = gates.get((agent.id, component.name)) or component.gate
        if gate is None:
            gate = PeriodicGate(self.world.dt * time_scale)
        if isinstance(gate, EventGate) and component.kind == ComponentKind.COMM_RECEIVER and self.channel is not None:
            self.channel.add_listener(agent.id, gate.notify)
        return gate

    async def _component_loop(self, agent: Agent, component: Component, gate: Gate, start: float, deadline: float):
        loop = asyncio.get_running_loop()
        k = 0
        while await gate.wait(deadline):
            if loop.time() >= deadline:
                break
            await component.async_compute_and_update(k, loop.time() - start)
            k += 1

    async def _environment_loop(self, period: float, start: float, deadline: float):
        loop = asyncio.get_running_loop()
        step = 0
        while True:
            target = start + (step + 1) * period
            if target >= deadline:
                break
            await asyncio.sleep(max(0.0, target - loop.time()))
            # snapshot de entradas bajo los locks de los agentes
            for agent in self.agents:
                await agent.async_lock().acquire()
            try:
                self.context.clock.step, self.context.clock.time = step, loop.time() - start
                self._environment_step(step, loop.time() - start)
            finally:
                for agent in self.agents:
                    agent.async_lock().release()
            step += 1
        return step

    async def _run_async(self, wall_duration: float, gates: Dict[tuple, Gate], time_scale: float) -> SimulationTrace:
        loop = asyncio.get_running_loop()
        # los locks asyncio pertenecen a este bucle
        for agent in self.agents:
            agent._lock = None
        start = loop.time()
        deadline = start + wall_duration
        tasks = []
        for agent in self.agents:
            for component in agent.components:
                gate = self._gate_for(agent, component, gates, time_scale)
                gate.bind(loop, start)
                tasks.append(asyncio.create_task(self._component_loop(agent, component, gate, start, deadline)))
        env_task = asyncio.create_task(self._environment_loop(self.world.dt * time_scale, start, deadline))
        await asyncio.gather(*tasks)
        steps = await env_task
        if self.channel is not None:
            self.channel.clear_listeners()
        return SimulationTrace(list(self.recorder.rows), [], steps, self.recorder)

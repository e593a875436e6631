"""
Componentes de la formacion con CBF.

Conocimiento que espera cada agente (lo escribe el escenario):
    - "task:self": formula de sus tareas independientes (opcional).
    - "task:edge:<r>": formula de la arista con r, sobre [x_lider; x_seguidor].
    - "cbf:leads": id del seguidor de la arista que lidera (opcional).
    - "cbf:follows": ids de los lideres de las aristas que sigue (opcional).
    - "input_box:<j>": caja [lo..., hi...] propia y de los vecinos.
"""
from __future__ import annotations
import dataclasses
from typing import List, Optional, Tuple

import numpy as np

from cbf.barrier import BarrierTask, build_barriers
from cbf.controller import (
    AgentControlSpec,
    CbfAgent,
    agent_input,
    barrier_risk,
    epsilon_term,
    update_gamma,
)
from comms.channel import Outbox
from comms.message import EpsilonPayload
from configs.package import CONF
from core.component import Component, ComponentKind, WorldView, register_component
from core.knowledge import MISSING, KnowledgeDatabase, ValueKind
from logic.formula import Formula
from logic.parser import parse
from utils.errors import ComponentError
from utils.logger import get_logger

log = get_logger("CBF")

EPS_TIME_TOL = 1e-9


def box_spec(knowledge: KnowledgeDatabase, agent_id: int, gamma: float = 1.0) -> Optional[AgentControlSpec]:
    box = knowledge.get(f"input_box:{agent_id}")
    if box is MISSING:
        return None
    box = np.asarray(box, dtype=float).ravel()
    d = box.size // 2
    return AgentControlSpec(box[:d], box[d:], gamma)


def _formula(value) -> Formula:
    return parse(value) if isinstance(value, str) else value


class _CbfComponent(Component):
    """Base: arma el CbfAgent local a partir del conocimiento y del estado inicial."""

    def __init__(self, lam: float = CONF.CBF.LAMBDA, nu: float = 0.0, **kwargs):
        super().__init__(**kwargs)
        self.lam = float(lam)
        self.nu = float(nu)
        self.local: Optional[CbfAgent] = None

    def _pose(self, agent_id: int) -> np.ndarray:
        world = self.context.world
        entity_id = self.context.agents[agent_id].entity_id
        return world.entity(entity_id).pose.copy()

    def _initialize(self) -> None:
        agent = self.owner
        kb = agent.knowledge
        spec = box_spec(kb, agent.id)
        if spec is None:
            raise ComponentError(f"agent {agent.id}: knowledge has no input_box:{agent.id}")
        t0 = self.context.clock.time
        x_i = self._pose(agent.id)
        local = CbfAgent(agent.id, spec)
        own = kb.get("task:self")
        if own is not MISSING:
            local.independent = build_barriers(_formula(own), x_i, t0, lam=self.lam, nu=self.nu)
        partner = kb.get("cbf:leads")
        if partner is not MISSING:
            r = int(partner)
            z = np.concatenate([x_i, self._pose(r)])
            (barrier,) = build_barriers(_formula(kb[f"task:edge:{r}"]), z, t0, lam=self.lam, nu=self.nu,
                                        kind="collaborative", edge=(agent.id, r))
            local.leads = (r, barrier)
        for leader in np.atleast_1d(kb.get("cbf:follows", np.zeros(0))).astype(int).tolist():
            z = np.concatenate([self._pose(leader), x_i])
            (barrier,) = build_barriers(_formula(kb[f"task:edge:{leader}"]), z, t0, lam=self.lam, nu=self.nu,
                                        kind="collaborative", edge=(leader, agent.id))
            local.follows[leader] = barrier
        self.local = local

    def barriers(self) -> List[BarrierTask]:
        out = list(self.local.independent)
        if self.local.leads is not None:
            out.append(self.local.leads[1])
        out.extend(self.local.follows.values())
        return out


@register_component("cbf-epsilon-sender")
class EpsilonSender(_CbfComponent):
    """
    Descripción
        CLASE: Fase de intercambio del seguidor: en t_k calcula epsilon por cada
        arista seguida con su estado sensado y su gamma vigente y lo envia al lider.
    """
    kind = ComponentKind.COMM_SENDER
    exchange = True

    def _initialize(self) -> None:
        super()._initialize()
        self.outbox = Outbox(self.owner.id, self.context.channel)

    def _compute(self, view: WorldView) -> List[Tuple[int, EpsilonPayload]]:
        gamma = float(view.knowledge.get("cbf:gamma", 1.0))
        x_r = self._pose(view.agent_id)
        out = []
        for leader, barrier in sorted(self.local.follows.items()):
            if not barrier.active(view.time):
                continue
            eps = epsilon_term(barrier, self.local.spec, self._pose(leader), x_r, gamma)
            out.append((leader, EpsilonPayload(leader, view.agent_id, eps, view.time)))
        return out

    def _update(self, value: List[Tuple[int, EpsilonPayload]]) -> None:
        for leader, payload in value:
            self.outbox.send(leader, payload, payload.t_k)


@register_component("cbf-controller")
class CbfController(_CbfComponent):
    """
    Descripción
        CLASE: QP de norma minima del agente con la arista que lidera y sus
        tareas propias. Sin epsilon de t_k usa la cota degradada.

    Argumentos
        - lam / nu (float): pendiente clase-K y margen de muestreo.
        - kappa (float): temperatura del smooth-min.
    """
    kind = ComponentKind.CONTROLLER

    def __init__(self, kappa: float = CONF.CBF.SMOOTH_MIN_KAPPA, **kwargs):
        super().__init__(**kwargs)
        self.kappa = float(kappa)
        self.degraded_steps = 0

    def _compute(self, view: WorldView):
        x_i = view.awareness_self.belief
        gamma = float(view.knowledge.get("cbf:gamma", 1.0))
        local = dataclasses.replace(self.local, spec=dataclasses.replace(self.local.spec, gamma=gamma))
        x_partner = eps = partner_spec = None
        if local.leads is not None:
            r = local.leads[0]
            other = view.awareness_others.get(r)
            if other is None:
                raise ComponentError(f"agent {view.agent_id}: no state for edge partner {r}")
            x_partner = other.belief
            entry = view.knowledge.entry(f"epsilon:{r}")
            if entry is not MISSING and entry.timestamp is not None and abs(entry.timestamp - view.time) <= EPS_TIME_TOL:
                eps = float(entry.value)
            partner_spec = box_spec(view.knowledge, r)
        dt = self.context.world.dt
        result, degraded = agent_input(local, x_i, x_partner, eps, view.time, dt, partner_spec, self.kappa)
        if degraded:
            log.warning("agent %s: no epsilon at t=%.3f, degraded step", view.agent_id, view.time)
        return result, degraded

    def _update(self, value) -> None:
        result, degraded = value
        agent = self.owner
        agent.control_input = np.asarray(result.u, dtype=float)
        if degraded:
            self.degraded_steps += 1
        agent.knowledge.set("cbf:degraded", degraded, kind=ValueKind.BLOB)
        agent.knowledge.set("cbf:qp_feasible", result.feasible, kind=ValueKind.BLOB)
        # gamma calculado por el riesgo de este paso rige el siguiente
        nxt = agent.knowledge.get("cbf:gamma_next")
        if nxt is not MISSING:
            agent.knowledge.set("cbf:gamma", nxt)


@register_component("barrier-risk")
class BarrierRisk(_CbfComponent):
    """Riesgo por margen de las barreras de las aristas seguidas; fija gamma del paso siguiente."""
    kind = ComponentKind.RISK

    def __init__(self, reference: float = CONF.CBF.RISK_BARRIER_REF, eta: float = CONF.CBF.GAMMA_ETA,
                 gamma_min: float = CONF.CBF.GAMMA_MIN, **kwargs):
        super().__init__(**kwargs)
        self.reference = float(reference)
        self.eta = float(eta)
        self.gamma_min = float(gamma_min)

    def _compute(self, view: WorldView) -> float:
        x_r = view.awareness_self.belief
        values = []
        for leader, barrier in self.local.follows.items():
            other = view.awareness_others.get(leader)
            if other is None or not barrier.active(view.time):
                continue
            values.append(barrier.value(np.concatenate([other.belief, x_r]), view.time))
        return barrier_risk(values, self.reference)

    def _update(self, risk: float) -> None:
        self.owner.awareness_self.set_risk(risk)
        self.owner.knowledge.set("cbf:gamma_next", update_gamma(risk, self.eta, self.gamma_min))

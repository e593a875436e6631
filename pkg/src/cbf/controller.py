"""
Ley de control descentralizada por CBF muestreadas.

Descripción
-------------------
    MÓDULO: Cada paso t_k tiene dos fases:
        1) cada seguidor r calcula, por arista (i, r), su peor contribucion
           epsilon^{ir} = min_{u_r en gamma_r U_r} db/dx_r . (f_r + g_r u_r)
           y se la envia al lider i;
        2) cada agente resuelve su QP de norma minima con la restriccion de la
           arista que lidera (con epsilon) y la de sus tareas independientes.

    Si el epsilon de t_k no llega, el lider usa la cota con gamma = 1 sobre la
    caja nominal del seguidor y marca el paso como degradado.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np

from cbf.barrier import BarrierTask, smooth_min
from cbf.qp import Constraint, QpResult, solve_min_norm
from configs.package import CONF
from utils.errors import ConfigurationError
from utils.logger import get_logger

log = get_logger("CBF")

Drift = Callable[[np.ndarray], np.ndarray]
Gain = Callable[[np.ndarray], np.ndarray]


@dataclass
class AgentControlSpec:
    """
    Descripción
        CLASE: Dinamica afin en el control x' = f_c(x) + g_c(x) u, caja de
        entrada U y factor de encogimiento gamma en (0, 1].

    Argumentos
        - lo / hi (Sequence[float]): caja U (0 en su interior).
        - gamma (float)
        - drift (Optional[Drift]): f_c; None = 0 (integrador simple).
        - gain (Optional[Gain]): g_c; None = identidad.
    """
    lo: Sequence[float]
    hi: Sequence[float]
    gamma: float = 1.0
    drift: Optional[Drift] = None
    gain: Optional[Gain] = None

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        if self.lo.shape != self.hi.shape:
            raise ConfigurationError("input box bounds differ in dimension")
        if not (np.all(self.lo < 0.0) and np.all(self.hi > 0.0)):
            raise ConfigurationError("input box must contain 0 in its interior")
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigurationError(f"shrinking factor must lie in (0, 1], got {self.gamma}")

    @property
    def dim(self) -> int:
        return int(self.lo.size)

    def scaled_box(self, gamma: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
        g = self.gamma if gamma is None else float(gamma)
        return g * self.lo, g * self.hi

    def f(self, x: np.ndarray) -> np.ndarray:
        return np.zeros(x.size) if self.drift is None else np.asarray(self.drift(x), dtype=float)

    def g(self, x: np.ndarray) -> np.ndarray:
        return np.eye(x.size, self.dim) if self.gain is None else np.asarray(self.gain(x), dtype=float)


def box_minimum(c: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    """min_{lo <= u <= hi} c . u, coordenada a coordenada por signo (vertice)."""
    return float(np.sum(np.minimum(c * lo, c * hi)))


def epsilon_term(barrier: BarrierTask, spec_r: AgentControlSpec, x_leader: Sequence[float],
                 x_follower: Sequence[float], gamma: Optional[float] = None) -> float:
    """
    Descripción
        FUNCIÓN: Peor contribucion del seguidor r a db/dt en la arista (i, r).
        La barrera esta escrita sobre el estado apilado [x_lider; x_seguidor].

    Argumentos
        - barrier (BarrierTask): barrera colaborativa.
        - spec_r (AgentControlSpec): dinamica y caja del seguidor.
        - x_leader / x_follower (Sequence[float])
        - gamma (Optional[float]): factor del seguidor (por defecto spec_r.gamma).
    """
    xi = np.asarray(x_leader, dtype=float)
    xr = np.asarray(x_follower, dtype=float)
    grad_r = barrier.gradient(np.concatenate([xi, xr]))[xi.size:]
    c = grad_r @ spec_r.g(xr)
    lo, hi = spec_r.scaled_box(gamma)
    return float(grad_r @ spec_r.f(xr)) + box_minimum(c, lo, hi)


def leader_constraint(barrier: BarrierTask, spec_i: AgentControlSpec, x_leader: Sequence[float],
                      x_follower: Sequence[float], epsilon: float, t_k: float,
                      dt: Optional[float] = None) -> Constraint:
    """
    Restriccion de la arista liderada:
        db/dx_i . (f + g u) >= -db/dt - lambda b + nu - epsilon
    como (a, beta) con a . u >= beta.
    """
    xi = np.asarray(x_leader, dtype=float)
    xr = np.asarray(x_follower, dtype=float)
    z = np.concatenate([xi, xr])
    grad_i = barrier.gradient(z)[:xi.size]
    b = barrier.value(z, t_k)
    rhs = -barrier.time_derivative(t_k, dt) - barrier.lam * b + barrier.nu - float(epsilon)
    return grad_i @ spec_i.g(xi), rhs - float(grad_i @ spec_i.f(xi))


def independent_constraint(barriers: Sequence[BarrierTask], spec: AgentControlSpec, x: Sequence[float],
                           t_k: float, dt: Optional[float] = None,
                           kappa: float = CONF.CBF.SMOOTH_MIN_KAPPA) -> Optional[Constraint]:
    """Restriccion de las tareas propias activas combinadas con smooth-min; None si no hay."""
    x = np.asarray(x, dtype=float)
    live = [b for b in barriers if b.active(t_k)]
    if not live:
        return None
    value, w = smooth_min([b.value(x, t_k) for b in live], kappa)
    grad = sum(wj * b.gradient(x) for wj, b in zip(w, live))
    db_dt = float(sum(wj * b.time_derivative(t_k, dt) for wj, b in zip(w, live)))
    lam = min(b.lam for b in live)
    nu = max(b.nu for b in live)
    rhs = -db_dt - lam * value + nu
    return grad @ spec.g(x), rhs - float(grad @ spec.f(x))


def update_gamma(risk: float, eta: float = CONF.CBF.GAMMA_ETA, gamma_min: float = CONF.CBF.GAMMA_MIN) -> float:
    """gamma_{k+1} = clamp(1 - eta * risk, gamma_min, 1); no creciente en el riesgo."""
    risk = min(1.0, max(0.0, float(risk)))
    return float(min(1.0, max(gamma_min, 1.0 - eta * risk)))


def barrier_risk(values: Iterable[float], reference: float = CONF.CBF.RISK_BARRIER_REF) -> float:
    """risk = clamp(1 - b_min / b_ref, 0, 1); 0 sin barreras."""
    values = list(values)
    if not values:
        return 0.0
    return float(min(1.0, max(0.0, 1.0 - min(values) / reference)))


@dataclass
class CbfAgent:
    """
    Descripción
        CLASE: Datos locales de un agente para la ley descentralizada.

    Atributos
        - agent_id (int)
        - spec (AgentControlSpec)
        - independent (List[BarrierTask]): tareas propias (sobre x_i).
        - leads (Optional[Tuple[int, BarrierTask]]): (seguidor r, barrera) si lidera.
        - follows (Dict[int, BarrierTask]): lider -> barrera de cada arista seguida.
    """
    agent_id: int
    spec: AgentControlSpec
    independent: List[BarrierTask] = field(default_factory=list)
    leads: Optional[Tuple[int, BarrierTask]] = None
    follows: Dict[int, BarrierTask] = field(default_factory=dict)


@dataclass
class StepOutcome:
    inputs: Dict[int, np.ndarray]
    degraded: Set[int]
    epsilons: Dict[Tuple[int, int], float]
    qp: Dict[int, QpResult]


def agent_input(agent: CbfAgent, x_i: np.ndarray, x_partner: Optional[np.ndarray], epsilon: Optional[float],
                t_k: float, dt: Optional[float] = None, partner_spec: Optional[AgentControlSpec] = None,
                kappa: float = CONF.CBF.SMOOTH_MIN_KAPPA) -> Tuple[QpResult, bool]:
    """
    Descripción
        FUNCIÓN: Resuelve el QP de un agente con su informacion local.

    Argumentos
        - epsilon (Optional[float]): epsilon recibido en t_k; None = no llego.
        - partner_spec (Optional[AgentControlSpec]): caja nominal del seguidor
          para la cota degradada (gamma = 1).

    Retorno
        - (QpResult, degradado)
    """
    constraints: List[Constraint] = []
    degraded = False
    if agent.leads is not None and agent.leads[1].active(t_k):
        _, barrier = agent.leads
        if epsilon is None:
            if partner_spec is None:
                raise ConfigurationError(f"agent {agent.agent_id}: no follower box for the degraded bound")
            epsilon = epsilon_term(barrier, partner_spec, x_i, x_partner, gamma=1.0)
            degraded = True
        constraints.append(leader_constraint(barrier, agent.spec, x_i, x_partner, epsilon, t_k, dt))
    own = independent_constraint(agent.independent, agent.spec, x_i, t_k, dt, kappa)
    if own is not None:
        constraints.append(own)
    lo, hi = agent.spec.scaled_box()
    result = solve_min_norm(constraints, lo, hi)
    if not result.feasible:
        log.warning("agent %s QP infeasible at t=%.3f, violations %s", agent.agent_id, t_k, result.violations)
    return result, degraded


def decentralized_step(agents: Mapping[int, CbfAgent], states: Mapping[int, Sequence[float]], t_k: float,
                       dt: Optional[float] = None, links_down: Iterable[Tuple[int, int]] = (),
                       kappa: float = CONF.CBF.SMOOTH_MIN_KAPPA) -> StepOutcome:
    """
    Descripción
        FUNCIÓN: Un paso completo de la ley descentralizada (ambas fases).

    Argumentos
        - agents (Mapping[int, CbfAgent])
        - states (Mapping[int, state]): estado de cada agente en t_k.
        - t_k (float) / dt (Optional[float]): instante y periodo de muestreo.
        - links_down (Iterable[(emisor, receptor)]): enlaces caidos.

    Retorno
        - StepOutcome: entradas, agentes degradados, epsilons enviados y QPs.
    """
    down = {(int(a), int(b)) for a, b in links_down}
    xs = {i: np.asarray(x, dtype=float) for i, x in states.items()}
    # 1) epsilons de los seguidores
    sent: Dict[Tuple[int, int], float] = {}
    for r in sorted(agents):
        follower = agents[r]
        for leader_id, barrier in sorted(follower.follows.items()):
            sent[(leader_id, r)] = epsilon_term(barrier, follower.spec, xs[leader_id], xs[r])
    # 2) QPs
    inputs, qp, degraded = {}, {}, set()
    for i in sorted(agents):
        agent = agents[i]
        partner = eps = x_partner = spec_r = None
        if agent.leads is not None:
            partner = agent.leads[0]
            x_partner = xs[partner]
            spec_r = agents[partner].spec
            if (partner, i) not in down:
                eps = sent.get((i, partner))
        result, was_degraded = agent_input(agent, xs[i], x_partner, eps, t_k, dt,
                                           AgentControlSpec(spec_r.lo, spec_r.hi) if spec_r is not None else None,
                                           kappa)
        if was_degraded:
            degraded.add(i)
            log.warning("agent %s: no epsilon from %s at t=%.3f, degraded step", i, partner, t_k)
        inputs[i] = result.u
        qp[i] = result
    return StepOutcome(inputs, degraded, sent, qp)

import numpy as np
import pytest

from cbf.barrier import build_barrier, build_barriers
from cbf.controller import (
    AgentControlSpec,
    CbfAgent,
    agent_input,
    barrier_risk,
    box_minimum,
    decentralized_step,
    epsilon_term,
    update_gamma,
)
from cbf.scenario import formation_setup
from logic.parser import parse
from utils.errors import ConfigurationError

UNIT_BOX = ([-1.0, -1.0], [1.0, 1.0])


def _edge_barrier(text: str, z):
    return build_barrier(parse(text), z, 0.0, kind="collaborative", edge=(1, 2))


def star_agents(cfg):
    """CbfAgent por vertice a partir de la configuracion de formacion."""
    agents = {}
    for i in cfg.graph.vertices:
        lo, hi = cfg.boxes[i]
        independent = []
        if i in cfg.self_tasks:
            independent = build_barriers(parse(cfg.self_tasks[i]), cfg.positions[i], 0.0, lam=cfg.lam, nu=cfg.nu)
        agents[i] = CbfAgent(i, AgentControlSpec(lo, hi), independent)
    for (leader, follower), text in cfg.edge_tasks.items():
        z = np.concatenate([cfg.positions[leader], cfg.positions[follower]])
        barrier = build_barrier(parse(text), z, 0.0, lam=cfg.lam, nu=cfg.nu, kind="collaborative",
                                edge=(leader, follower))
        agents[leader].leads = (follower, barrier)
        agents[follower].follows[leader] = barrier
    return agents


# --------------------
# Especificacion de agente y termino epsilon
# --------------------
def test_control_spec_validation():
    with pytest.raises(ConfigurationError):
        AgentControlSpec([0.0, -1.0], [1.0, 1.0])
    with pytest.raises(ConfigurationError):
        AgentControlSpec(*UNIT_BOX, gamma=0.0)
    with pytest.raises(ConfigurationError):
        AgentControlSpec(*UNIT_BOX, gamma=1.5)
    with pytest.raises(ConfigurationError):
        AgentControlSpec([-1.0], [1.0, 1.0])
    lo, hi = AgentControlSpec(*UNIT_BOX, gamma=0.5).scaled_box()
    assert lo.tolist() == [-0.5, -0.5] and hi.tolist() == [0.5, 0.5]


def test_epsilon_at_box_vertex():
    # db/dx_r = (1, 0) sobre el estado apilado [x_lider; x_seguidor]
    barrier = _edge_barrier("G[0,5] (x3 - 10 >= 0)", (0.0, 0.0, 12.0, 0.0))
    spec = AgentControlSpec(*UNIT_BOX)
    assert epsilon_term(barrier, spec, (0.0, 0.0), (12.0, 0.0)) == pytest.approx(-1.0)
    assert epsilon_term(barrier, spec, (0.0, 0.0), (12.0, 0.0), gamma=0.5) == pytest.approx(-0.5)


def test_epsilon_includes_drift():
    barrier = _edge_barrier("G[0,5] (x3 - 10 >= 0)", (0.0, 0.0, 12.0, 0.0))
    spec = AgentControlSpec(*UNIT_BOX, drift=lambda x: np.array([0.5, 0.0]))
    assert epsilon_term(barrier, spec, (0.0, 0.0), (12.0, 0.0)) == pytest.approx(-0.5)


def test_epsilon_with_zero_gradient_is_drift_only():
    barrier = _edge_barrier("G[0,5] (x1 + 1 >= 0)", (0.0, 0.0, 0.0, 0.0))
    spec = AgentControlSpec(*UNIT_BOX, drift=lambda x: np.array([2.0, 3.0]))
    assert epsilon_term(barrier, spec, (0.0, 0.0), (5.0, 5.0)) == 0.0


def test_box_minimum_is_attained_at_a_vertex():
    rng = np.random.default_rng(11)
    lo, hi = np.array([-1.5, -0.5]), np.array([1.0, 2.0])
    vertices = np.array(np.meshgrid(*zip(lo, hi))).reshape(2, -1).T
    for _ in range(5):
        c = rng.normal(size=2)
        exact = box_minimum(c, lo, hi)
        assert exact == pytest.approx(float((vertices @ c).min()))
        samples = rng.uniform(lo, hi, size=(1_000_000, 2))
        sampled = float((samples @ c).min())
        assert exact <= sampled
        assert sampled - exact < 0.05


# --------------------
# Factor gamma y riesgo
# --------------------
def test_update_gamma_examples():
    assert update_gamma(0.0, 0.5, 0.1) == 1.0
    assert update_gamma(1.0, 0.5, 0.1) == pytest.approx(0.5)
    assert update_gamma(1.0, 2.0, 0.1) == pytest.approx(0.1)
    # fuera de [0, 1] se recorta
    assert update_gamma(-3.0, 0.5, 0.1) == 1.0
    assert update_gamma(4.0, 0.5, 0.1) == pytest.approx(0.5)


def test_update_gamma_is_monotone():
    risks = np.linspace(0.0, 1.0, 51)
    gammas = [update_gamma(r, 0.8, 0.3) for r in risks]
    assert all(a >= b for a, b in zip(gammas, gammas[1:]))
    assert all(0.3 <= g <= 1.0 for g in gammas)


def test_barrier_risk():
    assert barrier_risk([]) == 0.0
    assert barrier_risk([1.0, 2.0], reference=0.5) == 0.0
    assert barrier_risk([0.25, 3.0], reference=0.5) == pytest.approx(0.5)
    assert barrier_risk([-1.0], reference=0.5) == 1.0


# --------------------
# Ley descentralizada
# --------------------
def test_inactive_constraint_gives_zero_input():
    barrier = build_barrier(parse("G[0,5] (x1 + 10 >= 0)"), (0.0, 0.0))
    agent = CbfAgent(1, AgentControlSpec(*UNIT_BOX), [barrier])
    result, degraded = agent_input(agent, np.zeros(2), None, None, 0.0)
    assert result.feasible
    assert not degraded
    assert np.allclose(result.u, 0.0)


def test_missing_epsilon_without_follower_box_is_an_error():
    barrier = _edge_barrier("G[0,5] (x3 - 10 >= 0)", (0.0, 0.0, 12.0, 0.0))
    agent = CbfAgent(1, AgentControlSpec(*UNIT_BOX), leads=(2, barrier))
    with pytest.raises(ConfigurationError):
        agent_input(agent, np.zeros(2), np.array([12.0, 0.0]), None, 0.0)


def test_star_step_exchanges_one_epsilon_per_edge():
    cfg = formation_setup()
    agents = star_agents(cfg)
    outcome = decentralized_step(agents, cfg.positions, 0.0, cfg.dt)
    assert sorted(outcome.epsilons) == [(2, 1), (3, 1), (4, 1), (5, 1)]
    assert outcome.degraded == set()
    assert sorted(outcome.qp) == [1, 2, 3, 4, 5]
    for i, u in outcome.inputs.items():
        lo, hi = cfg.boxes[i]
        assert np.all(u >= np.asarray(lo) - 1e-9) and np.all(u <= np.asarray(hi) + 1e-9)


def test_dropped_link_degrades_only_its_leader():
    cfg = formation_setup()
    agents = star_agents(cfg)
    nominal = decentralized_step(agents, cfg.positions, 0.0, cfg.dt)
    cut = decentralized_step(agents, cfg.positions, 0.0, cfg.dt, links_down=[(1, 3)])
    assert cut.degraded == {3}
    for i in (1, 2, 4, 5):
        assert np.allclose(cut.inputs[i], nominal.inputs[i])


def test_input_depends_only_on_neighbours():
    cfg = formation_setup()
    agents = star_agents(cfg)
    nominal = decentralized_step(agents, cfg.positions, 0.0, cfg.dt)
    moved = dict(cfg.positions)
    moved[4] = (-3.0, -2.5)
    perturbed = decentralized_step(agents, moved, 0.0, cfg.dt)
    for i in (1, 2, 3, 5):
        assert np.allclose(perturbed.inputs[i], nominal.inputs[i])

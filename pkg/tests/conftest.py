import os

import pytest

from comms.channel import InProcessChannel
from core.agent import Agent
from core.components import GoalController, PerceptionComponent
from core.coordinator import Coordinator
from environment.entity import Disc, Entity
from environment.geometry import Rect
from environment.models import SingleIntegratorModel
from environment.world import World2D

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def make_goal_world(seed: int = 0, noise: float = 0.0, goals=((4.0, 4.0), (-3.0, 2.0))) -> Coordinator:
    """Integradores con GoalController hacia metas fijas."""
    world = World2D(Rect(-10.0, -10.0, 10.0, 10.0), 0.1, seed)
    agents = []
    for k, goal in enumerate(goals, start=1):
        model = SingleIntegratorModel(2, [-2.0, -2.0], [2.0, 2.0], noise_scale=noise)
        world.add_entity(Entity(k, (0.0, float(k)), model, Disc(0.1)))
        agent = Agent(k, entity_id=k)
        agent.knowledge.set("goal", list(goal))
        agent.add_component(PerceptionComponent())
        agent.add_component(GoalController())
        agents.append(agent)
    return Coordinator(world, agents, InProcessChannel(drop_probability=0.0), seed=seed)


@pytest.fixture
def goal_world():
    return make_goal_world


@pytest.fixture
def scenarios_dir() -> str:
    return os.path.join(ROOT, "scenarios")

import pytest

from cbf.graph import TaskGraph
from utils.errors import ConfigurationError


def test_star_makes_the_leaves_leaders():
    graph = TaskGraph.star(1, [2, 3, 4])
    assert graph.vertices == (1, 2, 3, 4)
    assert graph.neighbors(1) == [2, 3, 4]
    assert graph.neighbors(3) == [1]
    assert graph.leader((1, 2)) == 2
    assert graph.leader((2, 1)) == 2
    assert graph.led_edge(2) == (2, 1)
    assert graph.led_edge(1) is None
    assert graph.followed_edges(1) == [(2, 1), (3, 1), (4, 1)]
    assert graph.followed_edges(2) == []


def test_path_graph_with_mixed_leaders():
    graph = TaskGraph([1, 2, 3], [(1, 2), (2, 3)], {(1, 2): 1, (3, 2): 3})
    assert graph.led_edge(3) == (3, 2)
    assert graph.led_edge(2) is None
    assert graph.followed_edges(2) == [(1, 2), (3, 2)]
    assert graph.adjacency() == {1: [2], 2: [1, 3], 3: [2]}


def test_single_agent_without_edges():
    graph = TaskGraph([7], [], {})
    assert graph.led_edge(7) is None
    assert graph.neighbors(7) == []


@pytest.mark.parametrize(
    "vertices, edges, leaders, match",
    [
        ([1, 1, 2], [(1, 2)], {(1, 2): 1}, "duplicate"),
        ([1, 2], [(1, 1)], {}, "self-loop"),
        ([1, 2], [(1, 3)], {(1, 3): 1}, "unknown agent"),
        ([1, 2, 3], [(1, 2), (2, 1)], {(1, 2): 1}, "twice"),
        ([1, 2, 3], [(1, 2)], {(1, 2): 1}, "tree"),
        ([1, 2, 3, 4], [(1, 2), (2, 3), (3, 1)], {(1, 2): 1, (2, 3): 2, (3, 1): 3}, "connected"),
        ([1, 2], [(1, 2)], {}, "no leader"),
        ([1, 2, 3], [(1, 2), (2, 3)], {(1, 2): 3, (2, 3): 2}, "endpoint"),
        ([1, 2, 3], [(1, 2), (2, 3)], {(1, 2): 2, (2, 3): 2}, "leads both"),
        ([1, 2, 3], [(1, 2), (2, 3)], {(1, 2): 1, (2, 3): 2, (1, 3): 3}, "unknown edges"),
    ],
)
def test_invalid_graphs(vertices, edges, leaders, match):
    with pytest.raises(ConfigurationError, match=match):
        TaskGraph(vertices, edges, leaders)

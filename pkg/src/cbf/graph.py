"""
Grafo de tareas colaborativas.

Descripción
-------------------
    MÓDULO: Vertices = agentes, aristas = tareas colaborativas (i, j). Cada arista
    tiene un lider unico (uno de sus extremos) que impone la restriccion en su
    QP; el otro extremo es el seguidor y le envia el termino epsilon.
"""
from __future__ import annotations
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from utils.errors import ConfigurationError

Edge = Tuple[int, int]


def _key(edge: Sequence[int]) -> FrozenSet[int]:
    return frozenset((int(edge[0]), int(edge[1])))


@dataclass
class TaskGraph:
    """
    Descripción
        CLASE: Grafo no dirigido, conexo y aciclico, con mapa de lideres.

    Argumentos
        - vertices (Sequence[int])
        - edges (Sequence[Edge])
        - leaders (Mapping[Edge, int]): lider de cada arista (extremo de la misma).

    Excepciones
        - ConfigurationError: arista con extremo desconocido, lazo o repetida,
          grafo no conexo o con ciclos, lider invalido o agente que lidera mas
          de una arista.
    """
    vertices: Sequence[int]
    edges: Sequence[Edge]
    leaders: Mapping[Edge, int]
    _leader_of: Dict[FrozenSet[int], int] = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self):
        self.vertices = tuple(sorted(int(v) for v in self.vertices))
        self.edges = tuple((int(i), int(j)) for i, j in self.edges)
        self._leader_of = {_key(e): int(l) for e, l in dict(self.leaders).items()}
        self.validate()

    def validate(self) -> None:
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ConfigurationError("duplicate vertices in task graph")
        seen = set()
        for e in self.edges:
            if e[0] == e[1]:
                raise ConfigurationError(f"self-loop {e} in task graph")
            if not set(e) <= vs:
                raise ConfigurationError(f"edge {e} references an unknown agent")
            if _key(e) in seen:
                raise ConfigurationError(f"edge {e} listed twice")
            seen.add(_key(e))
        if vs and len(self.edges) != len(vs) - 1:
            raise ConfigurationError(
                f"task graph must be a tree: {len(vs)} agents need {len(vs) - 1} edges, got {len(self.edges)}"
            )
        if not self._connected():
            raise ConfigurationError("task graph must be connected")
        led: Dict[int, Edge] = {}
        for e in self.edges:
            leader = self._leader_of.get(_key(e))
            if leader is None:
                raise ConfigurationError(f"edge {e} has no leader")
            if leader not in e:
                raise ConfigurationError(f"leader {leader} is not an endpoint of edge {e}")
            if leader in led:
                raise ConfigurationError(f"agent {leader} leads both {led[leader]} and {e}")
            led[leader] = e
        extra = set(self._leader_of) - seen
        if extra:
            raise ConfigurationError(f"leaders given for unknown edges: {sorted(tuple(sorted(k)) for k in extra)}")

    def _connected(self) -> bool:
        if not self.vertices:
            return True
        adj = self.adjacency()
        start = self.vertices[0]
        visited = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in visited:
                    visited.add(w)
                    queue.append(w)
        return len(visited) == len(self.vertices)

    def adjacency(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {v: [] for v in self.vertices}
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return {v: sorted(ns) for v, ns in adj.items()}

    def neighbors(self, agent_id: int) -> List[int]:
        return self.adjacency()[int(agent_id)]

    def leader(self, edge: Sequence[int]) -> int:
        return self._leader_of[_key(edge)]

    def led_edge(self, agent_id: int) -> Optional[Tuple[int, int]]:
        """(lider, seguidor) de la arista que lidera `agent_id`, o None."""
        for e in self.edges:
            if self.leader(e) == agent_id:
                return agent_id, e[1] if e[0] == agent_id else e[0]
        return None

    def followed_edges(self, agent_id: int) -> List[Tuple[int, int]]:
        """Aristas (lider, seguidor=agent_id) en las que el agente es seguidor."""
        out = []
        for e in self.edges:
            if agent_id in e and self.leader(e) != agent_id:
                out.append((self.leader(e), agent_id))
        return sorted(out)

    @classmethod
    def star(cls, hub: int, spokes: Iterable[int]) -> "TaskGraph":
        """Estrella con las hojas como lideres de su arista."""
        spokes = [int(s) for s in spokes]
        edges = [(hub, s) for s in spokes]
        return cls([hub, *spokes], edges, {e: e[1] for e in edges})

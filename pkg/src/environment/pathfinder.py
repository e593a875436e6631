import heapq
import math
from typing import Dict, List, Optional, Sequence, Tuple

from environment.geometry import Rect, Vector2
from configs.package import CONF


class VisibilityGraph:
    """
    Servicio A* sobre un grafo de visibilidad.

    - Nodos: esquinas de los obstaculos inflados con `margin` que quedan dentro de
      `bounds` y fuera de cualquier otro obstaculo inflado.
    - Aristas: pares de nodos cuyo segmento no atraviesa el interior de ningun
      obstaculo inflado (recorrer un borde esta permitido).

    - find_path(start, goal) -> Optional[List[Vector2]]
        Inserta start y goal como nodos temporales y ejecuta A*. Devuelve
        [start, esquina1, ..., goal] o None si no existe camino. Un obstaculo que
        ya contiene start o goal se ignora (el robot esta pegado a la pared).
    """

    def __init__(self, obstacles: Sequence[Rect], margin: float = CONF.TASKING.WALL_MARGIN,
                 bounds: Optional[Rect] = None):
        self.margin = float(margin)
        self.inflated: List[Rect] = [r.inflate(self.margin) for r in obstacles]
        self.bounds = bounds
        self.nodes: List[Vector2] = []
        for k, rect in enumerate(self.inflated):
            for corner in rect.corners():
                if bounds is not None and not bounds.contains(corner):
                    continue
                if any(j != k and other.strictly_contains(corner) for j, other in enumerate(self.inflated)):
                    continue
                self.nodes.append(corner)
        self._edges: Dict[int, List[int]] = {i: [] for i in range(len(self.nodes))}
        for i in range(len(self.nodes)):
            for j in range(i + 1, len(self.nodes)):
                if self.visible(self.nodes[i], self.nodes[j]):
                    self._edges[i].append(j)
                    self._edges[j].append(i)

    def _dist(self, a: Vector2, b: Vector2) -> float:
        """Distancia euclidiana entre dos puntos (x, y)."""
        return math.hypot(a[0] - b[0], a[1] - b[1])

    def visible(self, a: Vector2, b: Vector2, ignore: Sequence[int] = ()) -> bool:
        return not any(k not in ignore and rect.blocks_segment(a, b) for k, rect in enumerate(self.inflated))

    def find_path(self, start: Vector2, goal: Vector2) -> Optional[List[Vector2]]:
        start = (float(start[0]), float(start[1]))
        goal = (float(goal[0]), float(goal[1]))
        ignore = [k for k, r in enumerate(self.inflated) if r.strictly_contains(start) or r.strictly_contains(goal)]
        if self.visible(start, goal, ignore):
            return [start, goal]

        # Nodos temporales: S = n, G = n + 1
        n = len(self.nodes)
        points = self.nodes + [start, goal]
        S, G = n, n + 1
        neighbors: Dict[int, List[int]] = {i: list(self._edges[i]) for i in range(n)}
        neighbors[S], neighbors[G] = [], []
        for i in range(n):
            if self.visible(start, points[i], ignore):
                neighbors[S].append(i)
            if self.visible(points[i], goal, ignore):
                neighbors[i].append(G)

        # Estructuras A*
        open_heap: List[Tuple[float, int]] = []
        came_from: Dict[int, int] = {}
        g_score = {S: 0.0}
        heapq.heappush(open_heap, (self._dist(start, goal), S))
        closed = set()

        while open_heap:
            _, current = heapq.heappop(open_heap)
            # entradas obsoletas (el mismo nodo puede aparecer varias veces)
            if current in closed:
                continue
            if current == G:
                path = [points[G]]
                node = G
                while node in came_from:
                    node = came_from[node]
                    path.append(points[node])
                path.reverse()
                return path
            closed.add(current)
            for nb in neighbors[current]:
                if nb in closed:
                    continue
                tentative_g = g_score[current] + self._dist(points[current], points[nb])
                if tentative_g < g_score.get(nb, math.inf):
                    came_from[nb] = current
                    g_score[nb] = tentative_g
                    heapq.heappush(open_heap, (tentative_g + self._dist(points[nb], goal), nb))

        # No se encontro camino
        return None

    def path_length(self, start: Vector2, goal: Vector2) -> float:
        path = self.find_path(start, goal)
        if path is None:
            return math.inf
        return sum(self._dist(a, b) for a, b in zip(path, path[1:]))

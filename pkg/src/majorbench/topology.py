"""Qubit connectivity graphs that constrain two-qubit gate placement."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class TopologyGraph:
    n_qubits: int
    edges: frozenset

    def __post_init__(self):
        if self.n_qubits < 1:
            raise TopologyError("need at least one qubit")
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise TopologyError(f"self-loop on qubit {a}")
            if not (0 <= a < self.n_qubits and 0 <= b < self.n_qubits):
                raise TopologyError(f"edge ({a}, {b}) outside {self.n_qubits} qubits")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))
        if not self._connected():
            raise TopologyError("topology must be connected")

    def _connected(self) -> bool:
        adj = {q: set() for q in range(self.n_qubits)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == self.n_qubits

    @property
    def sorted_edges(self) -> list:
        return sorted(self.edges)

    @property
    def directed_edges(self) -> list:
        """Both orientations of every edge, ``(a, b)`` then ``(b, a)``."""
        out = []
        for a, b in self.sorted_edges:
            out += [(a, b), (b, a)]
        return out

    @property
    def degrees(self) -> list:
        deg = [0] * self.n_qubits
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges


def topology(n_qubits: int, edges: Iterable) -> TopologyGraph:
    return TopologyGraph(n_qubits, frozenset(tuple(e) for e in edges))


def average_connectivity(g: TopologyGraph) -> float:
    """Mean number of neighbours per qubit, ``2|E|/n``."""
    return 2 * len(g.edges) / g.n_qubits


def complete_graph(n: int) -> TopologyGraph:
    return topology(n, combinations(range(n), 2))


def ring(n: int) -> TopologyGraph:
    if n < 3:
        return line(n)
    return topology(n, [(i, (i + 1) % n) for i in range(n)])


def line(n: int) -> TopologyGraph:
    return topology(n, [(i, i + 1) for i in range(n - 1)])


def circulant(n: int, offsets: Iterable[int]) -> TopologyGraph:
    return topology(n, [(i, (i + d) % n) for i in range(n) for d in offsets])


PRESETS = {
    # two triangles sharing qubit 2
    "bowtie5": lambda: topology(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]),
    "ring5": lambda: ring(5),
    "line5": lambda: line(5),
    "t5": lambda: topology(5, [(0, 1), (1, 2), (1, 3), (3, 4)]),
    "ring8": lambda: ring(8),
    "k4_8": lambda: circulant(8, (1, 2)),
    "k6_8": lambda: circulant(8, (1, 2, 3)),
    "all8": lambda: complete_graph(8),
    "h7": lambda: topology(7, [(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)]),
}


def preset_topology(name: str) -> TopologyGraph:
    try:
        return PRESETS[name]()
    except KeyError:
        raise TopologyError(f"unknown topology {name!r}; choose from {sorted(PRESETS)}") from None


def topology_from_config(spec) -> TopologyGraph:
    """Preset name, or ``{"n_qubits": n, "edges": [[a, b], ...]}``."""
    if isinstance(spec, str):
        return preset_topology(spec)
    return topology(int(spec["n_qubits"]), [tuple(e) for e in spec.get("edges", [])])

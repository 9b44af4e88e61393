"""Directed-graph utilities: SCC condensation, transitive reduction, reachability.

Nodes keep insertion order and every traversal follows it, so all functions
here are deterministic for a given construction sequence.
"""

from __future__ import annotations

import math
from typing import Hashable, Iterable, Iterator

from .errors import GraphError

Node = Hashable


class DirectedGraph:
    """Weighted directed graph without parallel edges.

    Re-adding an edge overwrites its weight. Self-loops are allowed (they
    simply make their node its own strongly connected component).
    """

    def __init__(self, nodes: Iterable[Node] = (), edges: Iterable = ()):
        self._adj: dict[Node, dict[Node, float]] = {}
        for n in nodes:
            self.add_node(n)
        for e in edges:
            self.add_edge(*e)

    def add_node(self, n: Node) -> None:
        self._adj.setdefault(n, {})

    def add_edge(self, u: Node, v: Node, weight: float = 1.0) -> None:
        if not math.isfinite(weight):
            raise GraphError(f"edge ({u!r}, {v!r}) has non-finite weight {weight!r}")
        self.add_node(u)
        self.add_node(v)
        self._adj[u][v] = float(weight)

    @property
    def nodes(self) -> list[Node]:
        return list(self._adj)

    def edges(self) -> Iterator[tuple[Node, Node, float]]:
        for u, nbrs in self._adj.items():
            for v, w in nbrs.items():
                yield u, v, w

    def successors(self, u: Node) -> list[Node]:
        return list(self._adj[u])

    def has_edge(self, u: Node, v: Node) -> bool:
        return u in self._adj and v in self._adj[u]

    def weight(self, u: Node, v: Node) -> float:
        return self._adj[u][v]

    def num_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self._adj.values())

    def copy(self) -> "DirectedGraph":
        g = DirectedGraph()
        g._adj = {u: dict(nbrs) for u, nbrs in self._adj.items()}
        return g

    def __contains__(self, n: Node) -> bool:
        return n in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def __repr__(self) -> str:
        return f"DirectedGraph({len(self)} nodes, {self.num_edges()} edges)"


def strongly_connected_components(g: DirectedGraph) -> list[list[Node]]:
    """Tarjan's algorithm, iterative to be safe on deep graphs.

    Components are returned ordered by the smallest insertion index of their
    members, and members within a component keep insertion order.
    """
    order = {n: i for i, n in enumerate(g.nodes)}
    index: dict[Node, int] = {}
    lowlink: dict[Node, int] = {}
    on_stack: set[Node] = set()
    stack: list[Node] = []
    counter = 0
    components: list[list[Node]] = []

    for root in g.nodes:
        if root in index:
            continue
        # Each frame is (node, iterator over successors).
        work = [(root, iter(g.successors(root)))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(g.successors(w))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comp.sort(key=order.__getitem__)
                components.append(comp)

    components.sort(key=lambda comp: order[comp[0]])
    return components


def scc_condensation(g: DirectedGraph) -> tuple[DirectedGraph, dict[Node, int]]:
    """Contract each strongly connected component into a single vertex.

    Returns the condensed graph (nodes are component indices 0..k-1) and the
    node -> component map. The result is always a DAG; two nodes share a
    component iff they are mutually reachable in ``g``.
    """
    components = strongly_connected_components(g)
    comp_of = {n: i for i, comp in enumerate(components) for n in comp}
    cond = DirectedGraph(nodes=range(len(components)))
    for u, v, _ in g.edges():
        cu, cv = comp_of[u], comp_of[v]
        if cu != cv and not cond.has_edge(cu, cv):
            cond.add_edge(cu, cv)
    return cond, comp_of


def reachable_sets(g: DirectedGraph) -> dict[Node, set[Node]]:
    """Nodes reachable from each node via one or more edges."""
    reach: dict[Node, set[Node]] = {}
    for start in g.nodes:
        seen: set[Node] = set()
        frontier = list(g.successors(start))
        while frontier:
            n = frontier.pop()
            if n in seen:
                continue
            seen.add(n)
            frontier.extend(g.successors(n))
        reach[start] = seen
    return reach


def is_dag(g: DirectedGraph) -> bool:
    reach = reachable_sets(g)
    return all(n not in reach[n] for n in g.nodes)


def transitive_reduction(g: DirectedGraph) -> DirectedGraph:
    """Minimal edge set with the same reachability relation as ``g``.

    ``g`` must be a DAG; the reduction of a DAG is unique.
    """
    reach = reachable_sets(g)
    for n in g.nodes:
        if n in reach[n]:
            raise GraphError(f"transitive reduction requires a DAG; {n!r} lies on a cycle")
    reduced = DirectedGraph(nodes=g.nodes)
    for u in g.nodes:
        succ = g.successors(u)
        for v in succ:
            # (u, v) is redundant iff some other successor of u reaches v.
            if not any(w != v and v in reach[w] for w in succ):
                reduced.add_edge(u, v, g.weight(u, v))
    return reduced

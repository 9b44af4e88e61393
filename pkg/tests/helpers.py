"""Shared random-instance generators for the test suite."""

from __future__ import annotations

import random

from kph import DirectedGraph, Hierarchy, ScoreMatrix, canonical_hierarchy


def random_digraph(rng: random.Random, n: int = 8, p: float = 0.25) -> DirectedGraph:
    g = DirectedGraph()
    nodes = list(range(n))
    for u in nodes:
        g.add_node(u)
    for u in nodes:
        for v in nodes:
            if u != v and rng.random() < p:
                g.add_edge(u, v, weight=rng.random())
    return g


def random_dag_edges(rng: random.Random, n: int = 8, p: float = 0.35) -> set[tuple[int, int]]:
    order = list(range(n))
    rng.shuffle(order)
    pos = {u: k for k, u in enumerate(order)}
    edges = set()
    for u in range(n):
        for v in range(n):
            if pos[u] < pos[v] and rng.random() < p:
                edges.add((u, v))
    return edges


def random_hierarchy(rng: random.Random, n: int, summary_id: str = "s",
                     domain: str = "other") -> Hierarchy:
    """Random cluster forest over key points k0..k{n-1}."""
    ids = [f"k{i:02d}" for i in range(n)]
    blocks: list[list[str]] = []
    for x in ids:
        if blocks and rng.random() < 0.35:
            rng.choice(blocks).append(x)
        else:
            blocks.append([x])
    m = len(blocks)
    order = list(range(m))
    rng.shuffle(order)
    parent: dict[int, int] = {}
    for pos, c in enumerate(order):
        if pos > 0 and rng.random() < 0.6:
            parent[c] = order[rng.randrange(pos)]
    return canonical_hierarchy(summary_id, [frozenset(b) for b in blocks],
                               parent, domain=domain)


def random_score_matrix(rng: random.Random, n: int, summary_id: str = "s",
                        quantize: bool = False) -> ScoreMatrix:
    ids = tuple(f"k{i:02d}" for i in range(n))
    scores = {}
    for a in ids:
        for b in ids:
            if a != b:
                v = rng.random()
                scores[(a, b)] = round(v, 6) if quantize else v
    return ScoreMatrix(summary_id=summary_id, kp_ids=ids, scores=scores)


def forest_matrix(rng: random.Random, h: Hierarchy, high: tuple[float, float] = (0.7, 0.95),
                  low: tuple[float, float] = (0.02, 0.2)) -> ScoreMatrix:
    """Score matrix whose high-scoring pairs are exactly the relations of h."""
    from kph import derive_relations

    rel = derive_relations(h)
    ids = tuple(sorted(h.kp_ids))
    scores = {}
    for a in ids:
        for b in ids:
            if a != b:
                lo, hi = high if (a, b) in rel else low
                scores[(a, b)] = rng.uniform(lo, hi)
    return ScoreMatrix(summary_id=h.summary_id, kp_ids=ids, scores=scores)

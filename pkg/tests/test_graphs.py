"""Graph utilities checked against Floyd-Warshall reachability oracles."""

import random

import pytest

from kph import (
    DirectedGraph,
    GraphError,
    scc_condensation,
    strongly_connected_components,
    transitive_reduction,
)
from helpers import random_dag_edges, random_digraph
from oracles import condensation_edges, fw_closure, is_transitive_reduction_of, scc_partition


def _dag_from_edges(n, edges):
    g = DirectedGraph()
    for u in range(n):
        g.add_node(u)
    for u, v in edges:
        g.add_edge(u, v)
    return g


class TestStronglyConnectedComponents:
    def test_two_cycle(self):
        g = _dag_from_edges(3, {(0, 1), (1, 0), (1, 2)})
        comps = strongly_connected_components(g)
        assert {frozenset(c) for c in comps} == {frozenset({0, 1}), frozenset({2})}

    def test_matches_mutual_reachability_oracle(self):
        rng = random.Random(101)
        for _ in range(200):
            g = random_digraph(rng, n=rng.randrange(1, 9), p=rng.uniform(0.05, 0.6))
            got = {frozenset(c) for c in strongly_connected_components(g)}
            want = scc_partition(sorted(g.nodes), {(u, v) for u, v, _ in g.edges()})
            assert got == want

    def test_deterministic(self):
        rng = random.Random(7)
        g = random_digraph(rng, n=8, p=0.4)
        first = strongly_connected_components(g)
        assert strongly_connected_components(g) == first

    def test_isolated_nodes(self):
        g = DirectedGraph()
        for u in range(4):
            g.add_node(u)
        comps = strongly_connected_components(g)
        assert sorted(map(sorted, comps)) == [[0], [1], [2], [3]]


class TestCondensation:
    def test_condensed_graph_is_dag(self):
        rng = random.Random(202)
        for _ in range(100):
            g = random_digraph(rng, n=rng.randrange(2, 9), p=rng.uniform(0.1, 0.7))
            condensed, comp_of = scc_condensation(g)
            closure = fw_closure(sorted(condensed.nodes), {(u, v) for u, v, _ in condensed.edges()})
            for u in condensed.nodes:
                assert u not in closure[u], "condensation left a cycle"

    def test_edges_match_oracle(self):
        rng = random.Random(303)
        for _ in range(100):
            g = random_digraph(rng, n=rng.randrange(2, 9), p=rng.uniform(0.1, 0.7))
            condensed, comp_of = scc_condensation(g)
            members = {}
            for node, c in comp_of.items():
                members.setdefault(c, set()).add(node)
            got = {(frozenset(members[u]), frozenset(members[v]))
                   for u, v, _ in condensed.edges()}
            assert got == condensation_edges(sorted(g.nodes), {(u, v) for u, v, _ in g.edges()})


class TestTransitiveReduction:
    def test_chain_with_shortcut(self):
        g = _dag_from_edges(3, {(0, 1), (1, 2), (0, 2)})
        r = transitive_reduction(g)
        assert {(u, v) for u, v, _ in r.edges()} == {(0, 1), (1, 2)}

    def test_unique_minimal_equivalent_graph(self):
        # For a DAG the reduction is characterized by: same closure as the
        # input, and removing any one edge changes the closure.
        rng = random.Random(404)
        for _ in range(200):
            n = rng.randrange(1, 9)
            edges = random_dag_edges(rng, n=n, p=rng.uniform(0.1, 0.7))
            r = transitive_reduction(_dag_from_edges(n, edges))
            assert is_transitive_reduction_of(list(range(n)), edges, {(u, v) for u, v, _ in r.edges()})

    def test_rejects_cycles(self):
        g = _dag_from_edges(2, {(0, 1), (1, 0)})
        with pytest.raises(GraphError):
            transitive_reduction(g)

    def test_preserves_nodes(self):
        g = _dag_from_edges(5, {(0, 4)})
        r = transitive_reduction(g)
        assert set(r.nodes) == set(range(5))

"""Independent reference implementations used to check the package.

Everything here is deliberately written with different algorithms and data
structures than the package (Floyd-Warshall matrices instead of DFS,
numpy ranking instead of sorted lists) so that agreement between the two
is meaningful evidence of correctness.
"""

from __future__ import annotations

import itertools

import numpy as np


# -- reachability (Floyd-Warshall) ---------------------------------------

def fw_closure(nodes: list, edges: set[tuple]) -> dict:
    """node -> set of nodes reachable by at least one edge."""
    idx = {n: i for i, n in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for u, v in edges:
        reach[idx[u]][idx[v]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return {u: {v for v in nodes if reach[idx[u]][idx[v]]} for u in nodes}


def scc_partition(nodes: list, edges: set[tuple]) -> set[frozenset]:
    """Partition by mutual reachability."""
    closure = fw_closure(nodes, edges)
    comps = set()
    for u in nodes:
        comp = {v for v in nodes if
                (v == u) or (v in closure[u] and u in closure[v])}
        comps.add(frozenset(comp))
    return comps


def condensation_edges(nodes: list, edges: set[tuple]) -> set[tuple[frozenset, frozenset]]:
    comp_of = {}
    for comp in scc_partition(nodes, edges):
        for u in comp:
            comp_of[u] = comp
    return {(comp_of[u], comp_of[v]) for u, v in edges if comp_of[u] != comp_of[v]}


def is_transitive_reduction_of(nodes: list, original: set[tuple],
                               reduced: set[tuple]) -> bool:
    """A DAG's transitive reduction is its unique minimal equivalent graph:
    same closure, and dropping any single edge changes the closure."""
    if fw_closure(nodes, reduced) != fw_closure(nodes, original):
        return False
    target = fw_closure(nodes, original)
    for e in reduced:
        if fw_closure(nodes, reduced - {e}) == target:
            return False
    return True


# -- hierarchy relations --------------------------------------------------

def relations_by_closure(clusters, parent: dict) -> frozenset[tuple[str, str]]:
    """Relations of a cluster forest via transitive closure of its pair graph:
    co-cluster pairs in both directions plus member-to-parent-member edges."""
    nodes = sorted(x for c in clusters for x in c)
    edges = set()
    for i, c in enumerate(clusters):
        for x in c:
            for y in c:
                if x != y:
                    edges.add((x, y))
        if i in parent:
            for x in c:
                for y in clusters[parent[i]]:
                    edges.add((x, y))
    closure = fw_closure(nodes, edges)
    return frozenset((x, y) for x in nodes for y in closure[x] if x != y)


# -- distributional scorers (numpy formulations) --------------------------

def bininc_ref(wi: np.ndarray, wj: np.ndarray, theta: float) -> float:
    si = wi >= theta
    sj = wj >= theta
    if not si.any():
        return 0.0
    return float((si & sj).sum() / si.sum())


def weedsprec_ref(wi: np.ndarray, wj: np.ndarray, theta: float) -> float:
    si = wi >= theta
    sj = wj >= theta
    denom = wi[si].sum()
    if denom == 0.0:
        return 0.0
    return float(wi[si & sj].sum() / denom)


def clarkede_ref(wi: np.ndarray, wj: np.ndarray, theta: float) -> float:
    si = wi >= theta
    sj = wj >= theta
    denom = wi[si].sum()
    if denom == 0.0:
        return 0.0
    return float(np.minimum(wi, wj)[si & sj].sum() / denom)


def apinc_ref(wi: np.ndarray, wj: np.ndarray, theta: float) -> float:
    si = np.flatnonzero(wi >= theta)
    sj = np.flatnonzero(wj >= theta)
    if si.size == 0:
        return 0.0
    order_i = si[np.lexsort((si, -wi[si]))]
    order_j = sj[np.lexsort((sj, -wj[sj]))]
    rank_j = {int(f): r for r, f in enumerate(order_j, start=1)}
    in_j = np.array([int(f) in rank_j for f in order_i])
    precision_at = np.cumsum(in_j) / np.arange(1, order_i.size + 1)
    rel = np.array([1.0 - rank_j[int(f)] / (sj.size + 1) if int(f) in rank_j else 0.0
                    for f in order_i])
    return float((precision_at * rel).sum() / si.size)


# -- clustering ------------------------------------------------------------

def average_linkage_ref(ids: list[str], dist: dict[tuple[str, str], float],
                        threshold: float) -> set[frozenset]:
    """Naive agglomerative clustering, merging the closest pair of clusters
    (mean pairwise distance) while that distance is <= threshold.

    Uses frozensets and itertools instead of positional lists; ties are
    broken by the sorted-members representation of the pair, which matches
    index order when clusters start as sorted singletons.
    """
    clusters: list[frozenset[str]] = [frozenset([x]) for x in ids]
    while len(clusters) > 1:
        scored = []
        for a, b in itertools.combinations(range(len(clusters)), 2):
            ds = [dist[(x, y)] for x in sorted(clusters[a]) for y in sorted(clusters[b])]
            scored.append((sum(ds) / len(ds), a, b))
        best = min(scored)
        if best[0] > threshold:
            break
        _, a, b = best
        merged = clusters[a] | clusters[b]
        clusters = [c for k, c in enumerate(clusters) if k not in (a, b)]
        clusters.insert(a, merged)
    return set(clusters)


# -- precision/recall ------------------------------------------------------

def pr_points_ref(scored_labels: list[tuple[float, bool]]) -> list[tuple[float, float, float]]:
    """(threshold, recall, precision) per distinct score, via numpy cumsums."""
    arr = np.array(sorted(scored_labels, key=lambda t: -t[0]),
                   dtype=[("score", float), ("pos", bool)])
    num_pos = int(arr["pos"].sum())
    tp = np.cumsum(arr["pos"])
    seen = np.arange(1, len(arr) + 1)
    out = []
    for t in sorted(set(arr["score"].tolist()), reverse=True):
        k = int(np.flatnonzero(arr["score"] >= t)[-1])  # last index of the block
        recall = tp[k] / num_pos if num_pos else 0.0
        out.append((t, float(recall), float(tp[k] / seen[k])))
    return out

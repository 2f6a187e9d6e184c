"""Louvain-style community detection and Newman modularity.

The optimizer works greedily on the undirected simple view with a seeded,
deterministic node-visit order; the reported Q is always recomputed from the
final partition with the plain modularity formula (resolution 1), so it can
be checked independently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from lokg.errors import EmptyGraph, PartitionMismatch
from lokg.kg import KnowledgeGraph


def modularity(kg: KnowledgeGraph, partition: dict[str, int]) -> float:
    """Newman modularity Q = sum_c [ e_c/m - (d_c/2m)^2 ] on the simple view."""
    if set(partition) != set(kg.nodes):
        raise PartitionMismatch("partition must cover exactly the node set")
    adj = kg.undirected_neighbors()
    edges = [(u, v) for u in sorted(adj) for v in adj[u] if u < v]
    m = len(edges)
    if m == 0:
        return 0.0
    intra: dict[int, int] = {}
    degree_sum: dict[int, int] = {}
    for nid in sorted(adj):
        degree_sum[partition[nid]] = degree_sum.get(partition[nid], 0) + len(adj[nid])
    for u, v in edges:
        if partition[u] == partition[v]:
            intra[partition[u]] = intra.get(partition[u], 0) + 1
    q = 0.0
    for c in sorted(degree_sum):
        q += intra.get(c, 0) / m - (degree_sum[c] / (2.0 * m)) ** 2
    return q


@dataclass
class CommunityResult:
    community_count: int
    partition: dict[str, int]
    modularity: float
    seed: int
    resolution: float


def _one_level(graph: dict, degrees: dict, total_weight: float, resolution: float,
               rng: random.Random) -> tuple[dict, bool]:
    """One Louvain pass: greedy single-node moves until no move improves Q."""
    nodes = sorted(graph)
    order = list(nodes)
    rng.shuffle(order)
    community = {n: i for i, n in enumerate(nodes)}
    sigma_tot = {community[n]: degrees[n] for n in nodes}
    two_m = 2.0 * total_weight
    improved = False
    moved = True
    while moved:
        moved = False
        for node in order:
            k_i = degrees[node]
            old = community[node]
            weight_to: dict[int, float] = {}
            for nbr, w in graph[node].items():
                if nbr != node:
                    c = community[nbr]
                    weight_to[c] = weight_to.get(c, 0.0) + w
            sigma_tot[old] -= k_i
            best_com = old
            best_gain = weight_to.get(old, 0.0) - resolution * sigma_tot[old] * k_i / two_m
            for c in sorted(weight_to):
                if c == old:
                    continue
                gain = weight_to[c] - resolution * sigma_tot[c] * k_i / two_m
                if gain > best_gain:
                    best_gain, best_com = gain, c
            sigma_tot[best_com] = sigma_tot.get(best_com, 0.0) + k_i
            if best_com != old:
                community[node] = best_com
                moved = True
                improved = True
    return community, improved


def _aggregate(graph: dict, community: dict) -> dict:
    """Collapse communities to supernodes; intra-community weight becomes a self-loop."""
    agg: dict = {}
    for u in sorted(graph):
        cu = community[u]
        agg.setdefault(cu, {})
        for v, w in graph[u].items():
            cv = community[v]
            if u == v:  # existing self-loop carries its full weight
                agg[cu][cv] = agg[cu].get(cv, 0.0) + w
            elif cu == cv:
                # each undirected intra edge appears twice in this loop
                agg[cu][cv] = agg[cu].get(cv, 0.0) + w / 2.0
            else:
                agg[cu][cv] = agg[cu].get(cv, 0.0) + w
    return agg


def detect_communities(kg: KnowledgeGraph, resolution: float = 1.0,
                       seed: int = 0) -> CommunityResult:
    """Greedy modularity optimization; deterministic for a fixed seed."""
    if not kg.nodes:
        raise EmptyGraph("community detection on an empty graph")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    adj = kg.undirected_neighbors()
    nodes = sorted(adj)
    m = sum(len(nbrs) for nbrs in adj.values()) // 2
    if m == 0:
        partition = {n: i for i, n in enumerate(nodes)}
        return CommunityResult(len(nodes), partition, 0.0, seed, resolution)

    graph = {u: {v: 1.0 for v in adj[u]} for u in nodes}
    assignment = {n: n for n in nodes}
    rng = random.Random(seed)
    while True:
        degrees = {
            u: sum(w for v, w in graph[u].items() if v != u) + 2.0 * graph[u].get(u, 0.0)
            for u in graph
        }
        community, improved = _one_level(graph, degrees, float(m), resolution, rng)
        if not improved:
            break
        assignment = {n: community[assignment[n]] for n in assignment}
        graph = _aggregate(graph, community)

    labels: dict = {}
    partition: dict[str, int] = {}
    for n in nodes:
        com = assignment[n]
        if com not in labels:
            labels[com] = len(labels)
        partition[n] = labels[com]
    return CommunityResult(
        community_count=len(labels),
        partition=partition,
        modularity=modularity(kg, partition),
        seed=seed,
        resolution=resolution,
    )

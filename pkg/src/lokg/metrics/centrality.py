"""Betweenness centrality: exact accumulation over all sources, or the
pivot-sampled estimate over k seeded sources scaled by |V|/k.

Both run the same per-source dependency accumulation, so the pivot variant
with k = |V| reproduces the exact result bit for bit.  Values are
unnormalized with each unordered pair counted once; shortest paths are
unweighted unless ``weighted`` asks for edge weights as distances.
"""

from __future__ import annotations

import heapq
import random
from collections import deque
from dataclasses import dataclass

from lokg.errors import BadPivotCount, EmptyGraph, NonPositiveWeight
from lokg.kg import KnowledgeGraph


@dataclass
class BetweennessResult:
    per_node: dict[str, float]
    mean: float
    method: str  # "exact" or "pivot:k"


def _simple_weights(kg: KnowledgeGraph) -> dict[tuple[str, str], float]:
    # parallel hierarchical/semantic edges collapse to their minimum weight
    weights: dict[tuple[str, str], float] = {}
    for e in kg.edges:
        for key in ((e.src, e.dst), (e.dst, e.src)):
            weights[key] = min(weights.get(key, e.weight), e.weight)
    return weights


def _single_source(source, adj, weights, sigma, dist, preds):
    """Order of settled nodes for one source (Brandes; BFS or Dijkstra)."""
    settled = []
    if weights is None:
        dist[source] = 0
        sigma[source] = 1.0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            settled.append(v)
            for w in adj[v]:
                if dist[w] is None:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
    else:
        sigma[source] = 1.0
        seen = {source: 0.0}
        heap = [(0.0, source, source)]
        while heap:
            d, pred, v = heapq.heappop(heap)
            if dist[v] is not None:
                continue
            dist[v] = d
            settled.append(v)
            for w in adj[v]:
                nd = d + weights[(v, w)]
                if dist[w] is None and (w not in seen or nd < seen[w]):
                    seen[w] = nd
                    sigma[w] = sigma[v]
                    preds[w] = [v]
                    heapq.heappush(heap, (nd, v, w))
                elif dist[w] is None and nd == seen[w]:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
    return settled


def _accumulate(kg: KnowledgeGraph, sources, weighted: bool) -> dict[str, float]:
    adj = kg.undirected_neighbors()
    weights = None
    if weighted:
        weights = _simple_weights(kg)
        bad = [k for k, w in weights.items() if w <= 0]
        if bad:
            raise NonPositiveWeight(f"non-positive weight on edge {bad[0]}")
    bc = {nid: 0.0 for nid in adj}
    for s in sources:
        sigma = {nid: 0.0 for nid in adj}
        dist = {nid: None for nid in adj}
        preds: dict[str, list[str]] = {nid: [] for nid in adj}
        settled = _single_source(s, adj, weights, sigma, dist, preds)
        delta = {nid: 0.0 for nid in adj}
        while settled:
            w = settled.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return bc


def betweenness_exact(kg: KnowledgeGraph, weighted: bool = False) -> BetweennessResult:
    if not kg.nodes:
        raise EmptyGraph("betweenness of an empty graph")
    nodes = sorted(kg.nodes)
    bc = _accumulate(kg, nodes, weighted)
    per_node = {nid: bc[nid] * 0.5 for nid in nodes}
    return BetweennessResult(
        per_node=per_node,
        mean=sum(per_node.values()) / len(nodes),
        method="exact",
    )


def betweenness_pivot(kg: KnowledgeGraph, k_pivots: int, seed: int = 0,
                      weighted: bool = False) -> BetweennessResult:
    if not kg.nodes:
        raise EmptyGraph("betweenness of an empty graph")
    nodes = sorted(kg.nodes)
    if not 1 <= k_pivots <= len(nodes):
        raise BadPivotCount(f"k_pivots must be in [1, {len(nodes)}], got {k_pivots}")
    pivots = sorted(random.Random(seed).sample(nodes, k_pivots))
    bc = _accumulate(kg, pivots, weighted)
    scale = 0.5 * (len(nodes) / k_pivots)
    per_node = {nid: bc[nid] * scale for nid in nodes}
    return BetweennessResult(
        per_node=per_node,
        mean=sum(per_node.values()) / len(nodes),
        method=f"pivot:{k_pivots}",
    )

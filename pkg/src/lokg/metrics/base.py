"""Degree centrality, weakly connected components, local clustering."""

from __future__ import annotations

from dataclasses import dataclass

from lokg.errors import EmptyGraph
from lokg.kg import EdgeKind, KnowledgeGraph


@dataclass
class DegreeReport:
    adc_directed: float  # stored edges per node (semantic counted once)
    adc_total: float     # mean total degree (every incident edge)
    per_node: dict       # id -> {"in", "out", "semantic", "total"}


def degree_centrality(kg: KnowledgeGraph) -> DegreeReport:
    """Per-node degrees over all edge kinds plus the two ADC conventions."""
    if not kg.nodes:
        raise EmptyGraph("degree centrality of an empty graph")
    per_node = {nid: {"in": 0, "out": 0, "semantic": 0, "total": 0} for nid in kg.nodes}
    for e in kg.edges:
        if e.kind is EdgeKind.HIERARCHICAL:
            per_node[e.src]["out"] += 1
            per_node[e.dst]["in"] += 1
        else:
            per_node[e.src]["semantic"] += 1
            per_node[e.dst]["semantic"] += 1
    for counts in per_node.values():
        counts["total"] = counts["in"] + counts["out"] + counts["semantic"]
    n = len(kg.nodes)
    return DegreeReport(
        adc_directed=len(kg.edges) / n,
        adc_total=sum(c["total"] for c in per_node.values()) / n,
        per_node=per_node,
    )


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.size = {x: 1 for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:  # path compression
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]


def weakly_connected_components(kg: KnowledgeGraph) -> tuple[int, dict[str, int]]:
    """Component count and a deterministic node->component labeling
    (components numbered by their smallest member id)."""
    uf = UnionFind(kg.nodes)
    for e in kg.edges:
        uf.union(e.src, e.dst)
    members: dict[str, list[str]] = {}
    for nid in kg.nodes:
        members.setdefault(uf.find(nid), []).append(nid)
    labels: dict[str, int] = {}
    for i, root in enumerate(sorted(members, key=lambda r: min(members[r]))):
        for nid in members[root]:
            labels[nid] = i
    return len(members), labels


def local_clustering(kg: KnowledgeGraph) -> tuple[float, dict[str, float]]:
    """Standard local clustering coefficient on the undirected simple view;
    nodes with degree < 2 contribute 0."""
    adj = {nid: set(nbrs) for nid, nbrs in kg.undirected_neighbors().items()}
    per_node: dict[str, float] = {}
    for nid, nbrs in adj.items():
        deg = len(nbrs)
        if deg < 2:
            per_node[nid] = 0.0
            continue
        ordered = sorted(nbrs)
        links = sum(
            1
            for i, u in enumerate(ordered)
            for v in ordered[i + 1:]
            if v in adj[u]
        )
        per_node[nid] = 2.0 * links / (deg * (deg - 1))
    avg = sum(per_node[v] for v in sorted(per_node)) / len(per_node) if per_node else 0.0
    return avg, per_node

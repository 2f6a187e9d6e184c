"""Knowledge graph built from the hierarchy plus passed similarity verdicts.

Hierarchical edges stay exactly as the filtered forest declared them
(directed parent->child, weight 1.0).  Each passed verdict adds one
semantic edge, stored once per unordered pair (src < dst) and treated as
bidirectional, weighted by the combined similarity score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from lokg.errors import DanglingReference, NotAJourney
from lokg.taxonomy import Level, TaxonomyForest


class EdgeKind(Enum):
    HIERARCHICAL = "hierarchical"
    SEMANTIC = "semantic"


@dataclass(frozen=True)
class Node:
    id: str
    level: Level
    label: str


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: EdgeKind
    weight: float

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"self-loop on {self.src!r}")
        if self.kind is EdgeKind.SEMANTIC and self.src > self.dst:
            raise ValueError("semantic edges are stored with src < dst")


@dataclass
class KnowledgeGraph:
    nodes: dict[str, Node]
    edges: list[Edge]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            if e.src not in self.nodes or e.dst not in self.nodes:
                raise DanglingReference(f"edge {e.src}->{e.dst} references a missing node")
            key = (e.src, e.dst, e.kind)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        self.edges = sorted(self.edges, key=lambda e: (e.kind.value, e.src, e.dst))

    # -- views --

    def hierarchical_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.kind is EdgeKind.HIERARCHICAL]

    def semantic_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.kind is EdgeKind.SEMANTIC]

    def undirected_neighbors(self) -> dict[str, list[str]]:
        """Simple undirected adjacency (parallel edges collapsed), sorted."""
        adj: dict[str, set[str]] = {nid: set() for nid in self.nodes}
        for e in self.edges:
            adj[e.src].add(e.dst)
            adj[e.dst].add(e.src)
        return {nid: sorted(nbrs) for nid, nbrs in adj.items()}

    def journey_ids(self) -> list[str]:
        return sorted(n.id for n in self.nodes.values() if n.level is Level.JOURNEY)

    def __eq__(self, other):
        return (isinstance(other, KnowledgeGraph)
                and self.nodes == other.nodes
                and self.edges == other.edges
                and self.provenance == other.provenance)


def build_kg(forest: TaxonomyForest, verdicts=(), include_intra_journey: bool = False,
             provenance: dict | None = None) -> KnowledgeGraph:
    """Complete the hierarchy with semantic edges from passed verdicts."""
    nodes = {
        obj.id: Node(id=obj.id, level=obj.level, label=obj.clean_title)
        for obj in forest.objects.values()
    }
    edges = [
        Edge(src=pid, dst=cid, kind=EdgeKind.HIERARCHICAL, weight=1.0)
        for pid, cid in forest.hierarchy_edges
    ]
    accepted = 0
    for v in verdicts:
        if not v.passed:
            raise ValueError(f"verdict {v.pair} did not pass; build only from passed verdicts")
        if v.intra_journey and not include_intra_journey:
            continue
        if v.id_a not in nodes or v.id_b not in nodes:
            raise DanglingReference(f"verdict {v.pair} references a missing node")
        edges.append(Edge(src=v.id_a, dst=v.id_b, kind=EdgeKind.SEMANTIC, weight=v.combined))
        accepted += 1
    prov = dict(provenance or {})
    prov.setdefault("semantic_edge_count", accepted)
    prov.setdefault("hierarchical_edge_count", len(forest.hierarchy_edges))
    return KnowledgeGraph(nodes=nodes, edges=edges, provenance=prov)


@dataclass(frozen=True)
class JourneyPath:
    nodes: tuple[str, ...]
    kinds: tuple[EdgeKind, ...]

    @property
    def length(self) -> int:
        return len(self.kinds)


def journey_paths(kg: KnowledgeGraph, journey_a: str, journey_b: str,
                  max_len: int) -> list[JourneyPath]:
    """All simple paths of at most ``max_len`` edges between two Journeys,
    on the undirected view, annotated with the kind of every hop."""
    for jid in (journey_a, journey_b):
        node = kg.nodes.get(jid)
        if node is None or node.level is not Level.JOURNEY:
            raise NotAJourney(f"{jid!r} is not a Journey node")
    kind_of: dict[tuple[str, str], EdgeKind] = {}
    for e in kg.edges:
        # a hierarchical and a semantic edge may share endpoints; prefer the
        # hierarchical kind for annotation stability
        for key in ((e.src, e.dst), (e.dst, e.src)):
            if key not in kind_of or e.kind is EdgeKind.HIERARCHICAL:
                kind_of[key] = e.kind
    adj = kg.undirected_neighbors()
    paths: list[JourneyPath] = []
    if max_len < 1 or journey_a == journey_b:
        return paths

    def walk(node, trail, kinds):
        if len(kinds) >= max_len:
            return
        for nxt in adj[node]:
            if nxt == journey_b:
                paths.append(JourneyPath(nodes=trail + (nxt,), kinds=kinds + (kind_of[(node, nxt)],)))
            elif nxt not in trail:
                walk(nxt, trail + (nxt,), kinds + (kind_of[(node, nxt)],))

    walk(journey_a, (journey_a,), ())
    return sorted(paths, key=lambda p: (p.length, p.nodes))


# --- serialization --------------------------------------------------------------


def to_native(kg: KnowledgeGraph) -> str:
    """Canonical JSON document with provenance block; round-trips exactly."""
    doc = {
        "nodes": [
            {"id": n.id, "level": n.level.value, "label": n.label}
            for n in sorted(kg.nodes.values(), key=lambda n: n.id)
        ],
        "edges": [
            {"src": e.src, "dst": e.dst, "kind": e.kind.value, "weight": e.weight}
            for e in kg.edges
        ],
        "provenance": {k: kg.provenance[k] for k in sorted(kg.provenance)},
    }
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def from_native(text: str) -> KnowledgeGraph:
    doc = json.loads(text)
    nodes = {
        rec["id"]: Node(id=rec["id"], level=Level(rec["level"]), label=rec["label"])
        for rec in doc["nodes"]
    }
    edges = [
        Edge(src=rec["src"], dst=rec["dst"], kind=EdgeKind(rec["kind"]), weight=rec["weight"])
        for rec in doc["edges"]
    ]
    return KnowledgeGraph(nodes=nodes, edges=edges, provenance=doc.get("provenance", {}))


def to_edge_list(kg: KnowledgeGraph) -> str:
    """Flat text export: one ``src,dst,kind,weight`` line per edge."""
    lines = [f"{e.src},{e.dst},{e.kind.value},{e.weight!r}" for e in kg.edges]
    return "\n".join(lines) + "\n"


def to_graphml(kg: KnowledgeGraph) -> str:
    """GraphML export with node attribute ``level`` and edge attributes
    ``kind`` and ``weight`` (semantic edges appear once, src < dst)."""
    import xml.etree.ElementTree as ET

    root = ET.Element("graphml", xmlns="http://graphml.graphdrawing.org/xmlns")
    for key_id, target, name, type_ in (
        ("d0", "node", "level", "string"),
        ("d1", "node", "label", "string"),
        ("d2", "edge", "kind", "string"),
        ("d3", "edge", "weight", "double"),
    ):
        ET.SubElement(root, "key", id=key_id, attrib={
            "for": target, "attr.name": name, "attr.type": type_,
        })
    graph = ET.SubElement(root, "graph", id="lokg", edgedefault="directed")
    for n in sorted(kg.nodes.values(), key=lambda n: n.id):
        el = ET.SubElement(graph, "node", id=n.id)
        ET.SubElement(el, "data", key="d0").text = n.level.value
        ET.SubElement(el, "data", key="d1").text = n.label
    for e in kg.edges:
        el = ET.SubElement(graph, "edge", source=e.src, target=e.dst)
        ET.SubElement(el, "data", key="d2").text = e.kind.value
        ET.SubElement(el, "data", key="d3").text = repr(e.weight)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"

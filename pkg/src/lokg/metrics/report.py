"""Full metric suite report, hierarchy-vs-KG comparison, trend directions."""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field

from lokg.kg import KnowledgeGraph
from lokg.metrics.base import degree_centrality, local_clustering, weakly_connected_components
from lokg.metrics.centrality import betweenness_exact, betweenness_pivot
from lokg.metrics.communities import detect_communities

# preferred direction of each metric when semantic relations are added to the
# hierarchy (more contexts reachable, better linked, fewer stray components)
PREFERRED_TRENDS = {
    "adc_directed": "increasing",
    "adc_total": "increasing",
    "community_count": "increasing",
    "modularity": "decreasing",
    "wcc_count": "decreasing",
    "bc_mean": "increasing",
}

# values reported for the full-scale expert-curated dataset; kept as
# annotations only, not reproducible at desk scale
REFERENCE_RUN = {
    "adc_directed": {"hierarchical": 1.079, "kg": 2.262},
    "community_count": {"hierarchical": 253, "kg": 541},
    "modularity": {"hierarchical": 0.779, "kg": 0.636},
    "wcc_count": {"hierarchical": 63, "kg": 35},
    "bc_mean": {"hierarchical": 1.57, "kg": 15.1},
}


@dataclass
class MetricsConfig:
    bc_mode: str = "exact"  # "exact" or "pivot:<k>"
    weighted_bc: bool = False
    resolution: float = 1.0
    seed: int = 0

    def bc_pivots(self) -> int | None:
        if self.bc_mode == "exact":
            return None
        mode, _, k = self.bc_mode.partition(":")
        if mode != "pivot" or not k.isdigit() or int(k) < 1:
            raise ValueError(f"bc_mode must be 'exact' or 'pivot:<k>', got {self.bc_mode!r}")
        return int(k)


@dataclass
class MetricsReport:
    adc_directed: float
    adc_total: float
    community_count: int
    modularity: float
    avg_local_clustering: float
    wcc_count: int
    bc_mean: float
    bc_per_node: dict[str, float]
    method_flags: dict
    degrees_per_node: dict = field(default_factory=dict)
    clustering_per_node: dict = field(default_factory=dict)
    partition: dict = field(default_factory=dict)
    wcc_labels: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "adc_directed": self.adc_directed,
            "adc_total": self.adc_total,
            "community_count": self.community_count,
            "modularity": self.modularity,
            "avg_local_clustering": self.avg_local_clustering,
            "wcc_count": self.wcc_count,
            "bc_mean": self.bc_mean,
        }

    def to_dict(self, include_per_node: bool = True) -> dict:
        doc = dict(self.summary())
        doc["method_flags"] = dict(self.method_flags)
        doc["preferred_trends"] = dict(PREFERRED_TRENDS)
        if include_per_node:
            doc["bc_per_node"] = {k: self.bc_per_node[k] for k in sorted(self.bc_per_node)}
        return doc


def full_report(kg: KnowledgeGraph, config: MetricsConfig | None = None) -> MetricsReport:
    """Run the whole metric suite with the configured methods."""
    config = config or MetricsConfig()
    deg = degree_centrality(kg)
    wcc_count, wcc_labels = weakly_connected_components(kg)
    avg_cc, cc_per_node = local_clustering(kg)
    communities = detect_communities(kg, resolution=config.resolution, seed=config.seed)
    k = config.bc_pivots()
    if k is None:
        bc = betweenness_exact(kg, weighted=config.weighted_bc)
    else:
        bc = betweenness_pivot(kg, min(k, len(kg.nodes)), seed=config.seed,
                               weighted=config.weighted_bc)
    return MetricsReport(
        adc_directed=deg.adc_directed,
        adc_total=deg.adc_total,
        community_count=communities.community_count,
        modularity=communities.modularity,
        avg_local_clustering=avg_cc,
        wcc_count=wcc_count,
        bc_mean=bc.mean,
        bc_per_node=bc.per_node,
        method_flags={
            "bc": bc.method,
            "bc_weighted": config.weighted_bc,
            "communities_seed": config.seed,
            "resolution": config.resolution,
        },
        degrees_per_node=deg.per_node,
        clustering_per_node=cc_per_node,
        partition=communities.partition,
        wcc_labels=wcc_labels,
    )


def compare_reports(base: MetricsReport, completed: MetricsReport) -> dict:
    """Per-metric before/after deltas with preferred-trend checkmarks."""
    out = {}
    for name, preferred in PREFERRED_TRENDS.items():
        before = base.summary()[name]
        after = completed.summary()[name]
        delta = after - before
        if delta > 0:
            direction = "increasing"
        elif delta < 0:
            direction = "decreasing"
        else:
            direction = "unchanged"
        out[name] = {
            "hierarchical": before,
            "kg": after,
            "delta": delta,
            "preferred": preferred,
            "trend_matched": direction == preferred,
            "reference": REFERENCE_RUN.get(name),
        }
    return out


def per_node_csv(kg: KnowledgeGraph, report: MetricsReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "level", "deg", "bc", "community", "clustering"])
    for nid in sorted(kg.nodes):
        writer.writerow([
            nid,
            kg.nodes[nid].level.value,
            report.degrees_per_node[nid]["total"],
            repr(report.bc_per_node[nid]),
            report.partition[nid],
            repr(report.clustering_per_node[nid]),
        ])
    return buf.getvalue()

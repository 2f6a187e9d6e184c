from lokg.metrics.base import (
    DegreeReport,
    degree_centrality,
    local_clustering,
    weakly_connected_components,
)
from lokg.metrics.centrality import (
    BetweennessResult,
    betweenness_exact,
    betweenness_pivot,
)
from lokg.metrics.communities import CommunityResult, detect_communities, modularity
from lokg.metrics.report import (
    PREFERRED_TRENDS,
    REFERENCE_RUN,
    MetricsConfig,
    MetricsReport,
    compare_reports,
    full_report,
    per_node_csv,
)

__all__ = [
    "PREFERRED_TRENDS",
    "REFERENCE_RUN",
    "BetweennessResult",
    "CommunityResult",
    "DegreeReport",
    "MetricsConfig",
    "MetricsReport",
    "betweenness_exact",
    "betweenness_pivot",
    "compare_reports",
    "degree_centrality",
    "detect_communities",
    "full_report",
    "local_clustering",
    "modularity",
    "per_node_csv",
    "weakly_connected_components",
]

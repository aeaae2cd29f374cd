"""Discrete Ricci curvatures and market-instability indicators over rolling
correlation-based threshold networks built from stock-price panels."""

__version__ = "0.1.0"

from .curvature import (
    CurvatureConfig,
    EdgeCurvatures,
    all_edge_curvatures,
    forman_ricci_edge,
    haantjes_ricci_edge,
    menger_ricci_edge,
    neighbor_measure,
    ollivier_ricci_edge,
    wasserstein_w1,
)
from .graph import (
    DistanceTable,
    Graph,
    GraphError,
    build_graph,
    mst_prim,
    shortest_paths,
    simple_paths_between,
    triangles_of_edge,
    unit_graph,
)

__all__ = [
    "CurvatureConfig",
    "DistanceTable",
    "EdgeCurvatures",
    "Graph",
    "GraphError",
    "all_edge_curvatures",
    "build_graph",
    "forman_ricci_edge",
    "haantjes_ricci_edge",
    "menger_ricci_edge",
    "mst_prim",
    "neighbor_measure",
    "ollivier_ricci_edge",
    "shortest_paths",
    "simple_paths_between",
    "triangles_of_edge",
    "unit_graph",
    "wasserstein_w1",
]

"""Whole-graph measures tracked alongside the curvature averages.

Degree conventions follow the market-network usage: ``avg_degree = m / n``
and the weighted variant divides the sum of edge weights (each edge counted
once) by the node count, so unit weights reduce the two to the same number.
Entropy uses natural logarithms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, shortest_paths


class MeasureError(ValueError):
    """Invalid input to a network measure."""


@dataclass(frozen=True)
class MeasureConfig:
    """How the summary reads the graph: path metric and degree weighting."""

    path_mode: str = "hop"  # hop | weighted, for path length / diameter / CE
    weighted_degree_weight: str = "corr"  # corr | dist


@dataclass(frozen=True)
class GraphSummary:
    edge_count: int
    edge_density: float
    avg_degree: float
    avg_weighted_degree: float
    avg_path_length: float
    diameter: float
    clustering: float
    communication_efficiency: float
    modularity: float
    community_count: int
    network_entropy: float
    communities: tuple[int, ...]


def basic_stats(g: Graph, weight: str = "corr"):
    """Edge count, edge density 2m/(n(n-1)), average degree m/n and its
    weighted counterpart (sum of chosen edge weights over n)."""
    n = g.node_count
    if n < 2:
        raise MeasureError("basic_stats requires at least 2 nodes")
    m = g.edge_count
    if weight == "corr":
        w_sum = float(g.edge_corrs().sum()) if m else 0.0
    elif weight == "dist":
        w_sum = float(g.edge_dists().sum()) if m else 0.0
    else:
        raise MeasureError(f"unknown weight {weight!r}")
    density = 2.0 * m / (n * (n - 1))
    return m, density, m / n, w_sum / n


def path_stats(g: Graph, mode: str = "hop"):
    """Average shortest-path length and diameter over ordered node pairs."""
    n = g.node_count
    d = shortest_paths(g, mode).d
    off = d[~np.eye(n, dtype=bool)]
    if off.size == 0:
        raise MeasureError("path_stats requires at least 2 nodes")
    if not np.all(np.isfinite(off)):
        raise MeasureError("path_stats requires a connected graph")
    return float(off.mean()), float(off.max())


def communication_efficiency(g: Graph, mode: str = "hop") -> float:
    """Mean inverse shortest-path length; unreachable pairs contribute 0."""
    n = g.node_count
    if n < 2:
        raise MeasureError("communication_efficiency requires at least 2 nodes")
    d = shortest_paths(g, mode).d
    off = d[~np.eye(n, dtype=bool)]
    with np.errstate(divide="ignore"):
        inv = np.where(np.isfinite(off) & (off > 0.0), 1.0 / off, 0.0)
    return float(inv.mean())


def clustering_coefficient(g: Graph) -> float:
    """Average local clustering; nodes of degree < 2 contribute 0."""
    n = g.node_count
    if n < 1:
        raise MeasureError("clustering requires at least 1 node")
    if g.edge_count == 0:
        return 0.0
    a = g.adjacency().astype(np.float64)
    triangles = np.diag(a @ a @ a) / 2.0
    deg = g.degrees().astype(np.float64)
    local = np.zeros(n)
    mask = deg >= 2
    local[mask] = 2.0 * triangles[mask] / (deg[mask] * (deg[mask] - 1.0))
    return float(local.mean())


def network_entropy(g: Graph) -> float:
    """Shannon entropy (nats) of the remaining-degree distribution
    q_k = (k+1) p_{k+1} / <k>, with p the degree distribution."""
    if g.edge_count == 0:
        raise MeasureError("network_entropy requires at least one edge")
    deg = g.degrees()
    counts = np.bincount(deg)
    p = counts / g.node_count
    mean_deg = deg.mean()
    ks = np.arange(1, len(counts))
    q = ks * p[1:] / mean_deg
    q = q[q > 0.0]
    return float(-(q * np.log(q)).sum())


# ---------------------------------------------------------------------------
# Louvain community detection
# ---------------------------------------------------------------------------

def _modularity(n, edges, weights, communities):
    m_w = float(sum(weights))
    if m_w == 0.0:
        return 0.0
    strength = np.zeros(n)
    intra = 0.0
    for (i, j), w in zip(edges, weights):
        strength[i] += w
        strength[j] += w
        if communities[i] == communities[j]:
            intra += w
    q = intra / m_w
    for c in set(communities):
        d_c = strength[np.fromiter((i for i in range(n) if communities[i] == c), dtype=int)].sum()
        q -= (d_c / (2.0 * m_w)) ** 2
    return float(q)


def _local_moving(adj, loops, m_total):
    """One Louvain level: greedy first-improvement moves in ascending node order."""
    n = len(adj)
    community = list(range(n))
    strength = [2.0 * loops[i] + sum(adj[i].values()) for i in range(n)]
    tot = strength.copy()
    moved_any = True
    while moved_any:
        moved_any = False
        for i in range(n):
            own = community[i]
            # weight from i to each neighbouring community
            k_to: dict[int, float] = {}
            for j, w in adj[i].items():
                k_to[community[j]] = k_to.get(community[j], 0.0) + w
            tot[own] -= strength[i]
            base = k_to.get(own, 0.0) - tot[own] * strength[i] / (2.0 * m_total)
            target = own
            for c in sorted(k_to):
                if c == own:
                    continue
                gain = k_to[c] - tot[c] * strength[i] / (2.0 * m_total)
                if gain > base + 1e-12:
                    target = c
                    break  # first strictly improving community in id order
            tot[target] += strength[i]
            if target != own:
                community[i] = target
                moved_any = True
    return community


def _aggregate(adj, loops, community):
    """Collapse communities into supernodes, keeping internal weight as loops."""
    ids = sorted(set(community))
    remap = {c: k for k, c in enumerate(ids)}
    n_new = len(ids)
    new_adj: list[dict[int, float]] = [{} for _ in range(n_new)]
    new_loops = [0.0] * n_new
    for i, c in enumerate(community):
        new_loops[remap[c]] += loops[i]
    for i in range(len(adj)):
        ci = remap[community[i]]
        for j, w in adj[i].items():
            if j <= i:
                continue
            cj = remap[community[j]]
            if ci == cj:
                new_loops[ci] += w
            else:
                a, b = (ci, cj) if ci < cj else (cj, ci)
                new_adj[a][b] = new_adj[a].get(b, 0.0) + w
                new_adj[b][a] = new_adj[b].get(a, 0.0) + w
    return new_adj, new_loops, remap


def louvain_modularity(g: Graph, weights=None, seed=None):
    """Greedy Louvain modularity maximisation; deterministic given the graph.

    ``weights`` aligns with ``g.edges()`` (default: unit weights) and must be
    non-negative. ``seed`` is reserved for optional randomised restarts; the
    default pass visits nodes in ascending id order with first-improvement
    moves, so runs are reproducible without it.

    Returns ``(Q, communities)`` where ``communities[i]`` is the community id
    of node ``i`` (ids renumbered by first appearance).
    """
    del seed
    edges = g.edges()
    if not edges:
        raise MeasureError("louvain_modularity requires at least one edge")
    if weights is None:
        w = [1.0] * len(edges)
    else:
        w = [float(x) for x in weights]
        if len(w) != len(edges):
            raise MeasureError("weights must align with g.edges()")
        if any(x < 0.0 for x in w):
            raise MeasureError("louvain weights must be non-negative")
    n = g.node_count
    m_total = float(sum(w))
    if m_total == 0.0:
        return 0.0, tuple([0] * n)

    adj: list[dict[int, float]] = [{} for _ in range(n)]
    loops = [0.0] * n
    for (i, j), wt in zip(edges, w):
        adj[i][j] = adj[i].get(j, 0.0) + wt
        adj[j][i] = adj[j].get(i, 0.0) + wt

    node_to_comm = list(range(n))
    while True:
        community = _local_moving(adj, loops, m_total)
        if len(set(community)) == len(adj):
            break  # no merge happened at this level
        adj, loops, remap = _aggregate(adj, loops, community)
        node_to_comm = [remap[community[c]] for c in node_to_comm]

    # renumber communities by first appearance over node ids
    order: dict[int, int] = {}
    final = []
    for c in node_to_comm:
        if c not in order:
            order[c] = len(order)
        final.append(order[c])
    q = _modularity(n, edges, w, final)
    return q, tuple(final)


def graph_summary(g: Graph, config: MeasureConfig | None = None) -> GraphSummary:
    """All whole-graph measures of a connected market graph in one record.

    Louvain runs on correlation weights clamped at zero; MST-forced edges can
    carry negative correlations, which the modularity null model cannot.
    """
    config = config or MeasureConfig()
    m, density, avg_deg, avg_wdeg = basic_stats(g, config.weighted_degree_weight)
    avg_len, diameter = path_stats(g, config.path_mode)
    louvain_w = np.maximum(g.edge_corrs(), 0.0) if m else []
    q, communities = louvain_modularity(g, louvain_w)
    return GraphSummary(
        edge_count=m,
        edge_density=density,
        avg_degree=avg_deg,
        avg_weighted_degree=avg_wdeg,
        avg_path_length=avg_len,
        diameter=diameter,
        clustering=clustering_coefficient(g),
        communication_efficiency=communication_efficiency(g, config.path_mode),
        modularity=q,
        community_count=len(set(communities)),
        network_entropy=network_entropy(g),
        communities=communities,
    )

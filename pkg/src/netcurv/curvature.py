"""Four edge-centric discrete Ricci curvatures and their graph-wide averages.

* Ollivier: ``1 - W1(m_u, m_v) / d(u, v)`` with measures uniform over the
  neighbours of each endpoint (zero idleness) and ``W1`` the exact optimal
  transport cost over shortest-path ground distances.
* Forman: algebraic combination of edge, endpoint and incident-edge weights;
  reduces to ``4 - deg(u) - deg(v)`` on unweighted graphs.
* Menger: ``sqrt(3)/2`` per combinatorial triangle adjacent to the edge.
* Haantjes: ``sqrt(n - 1)`` per simple detour path of edge-length ``n``
  between the edge's endpoints (default bound: length <= 4).

Menger and Haantjes ignore edge weights by construction; Ollivier and Forman
accept either hop/unit or distance-weighted inputs. All functions are pure;
per-edge computations share no mutable state.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import DistanceTable, Graph, GraphError, shortest_paths, simple_paths_between, triangles_of_edge

#: Lower clamp for zero-length edges (perfectly correlated pairs) so that
#: curvature ratios over weighted shortest paths stay finite.
WEIGHT_CLAMP = 1e-9

#: Menger curvature of a combinatorial (unit side) triangle.
UNIT_TRIANGLE_CURVATURE = math.sqrt(3.0) / 2.0


class CurvatureError(ValueError):
    """Degenerate input to a curvature computation."""


@dataclass(frozen=True)
class ProbabilityMeasure:
    """Finitely supported probability measure on graph nodes."""

    support: tuple[int, ...]
    mass: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.mass):
            raise CurvatureError("support and mass must have equal length")
        if len(set(self.support)) != len(self.support):
            raise CurvatureError("support ids must be distinct")
        if any(m < 0.0 for m in self.mass):
            raise CurvatureError("masses must be non-negative")
        if abs(sum(self.mass) - 1.0) > 1e-12:
            raise CurvatureError("masses must sum to 1")


def neighbor_measure(g: Graph, u: int) -> ProbabilityMeasure:
    """Uniform measure over the neighbours of ``u`` (no mass on ``u`` itself)."""
    nbrs = g.neighbors(u)
    if not nbrs:
        raise CurvatureError(f"node {u} is isolated; neighbour measure undefined")
    share = 1.0 / len(nbrs)
    return ProbabilityMeasure(nbrs, tuple(share for _ in nbrs))


# ---------------------------------------------------------------------------
# Exact transportation solver (dense simplex on the basis tree)
# ---------------------------------------------------------------------------

def _northwest_corner(supply, demand):
    """Initial basic feasible solution with exactly m + n - 1 basic cells."""
    m, n = len(supply), len(demand)
    s = supply.copy()
    r = demand.copy()
    basis: list[tuple[int, int]] = []
    alloc = np.zeros((m, n))
    i = j = 0
    while True:
        q = min(s[i], r[j])
        alloc[i, j] = q
        basis.append((i, j))
        s[i] -= q
        r[j] -= q
        if i == m - 1 and j == n - 1:
            break
        # advance exactly one index per step; degenerate steps add zero cells
        if i == m - 1:
            j += 1
        elif j == n - 1 or s[i] <= r[j]:
            i += 1
        else:
            j += 1
    return alloc, basis


def _potentials(cost, basis, m, n):
    """Dual potentials (u, v) with u_i + v_j = c_ij on every basic cell."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(m + n)]
    for i, j in basis:
        adj[i].append((m + j, i * n + j))
        adj[m + j].append((i, i * n + j))
    pot = np.zeros(m + n)
    seen = np.zeros(m + n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    flat = cost.ravel()
    while queue:
        node = queue.popleft()
        for other, cell in adj[node]:
            if not seen[other]:
                seen[other] = True
                pot[other] = flat[cell] - pot[node]
                queue.append(other)
    if not seen.all():  # basis is always a spanning tree by construction
        raise CurvatureError("transport basis lost connectivity")
    return pot[:m], pot[m:], adj


def _basis_cycle(entering, basis_adj, m, n):
    """Cells of the unique basis-tree cycle closed by the entering cell."""
    i0, j0 = entering
    target = m + j0
    parent = {i0: -1}
    queue = deque([i0])
    while queue:
        node = queue.popleft()
        if node == target:
            break
        for other, _cell in basis_adj[node]:
            if other not in parent:
                parent[other] = node
                queue.append(other)
    path_nodes = [target]
    while path_nodes[-1] != i0:
        path_nodes.append(parent[path_nodes[-1]])
    path_nodes.reverse()  # row i0 ... col j0, alternating row/col nodes
    cells = [entering]
    for a, b in zip(path_nodes, path_nodes[1:]):
        row, col = (a, b - m) if a < m else (b, a - m)
        cells.append((row, col))
    return cells


def solve_transport(cost, supply, demand, max_iter=100000):
    """Exact optimal transportation cost between two discrete mass vectors.

    Dense transportation simplex: northwest-corner start, most-negative
    entering rule with a Bland fallback against degenerate cycling.
    Marginals must each sum to the same total (tolerance 1e-9).
    """
    cost = np.asarray(cost, dtype=float)
    supply = np.asarray(supply, dtype=float)
    demand = np.asarray(demand, dtype=float)
    m, n = cost.shape
    if supply.shape != (m,) or demand.shape != (n,):
        raise CurvatureError("marginal lengths must match the cost matrix")
    if not np.all(np.isfinite(cost)):
        raise CurvatureError("transport cost between support points is infinite")
    if abs(supply.sum() - demand.sum()) > 1e-9:
        raise CurvatureError("marginals must carry equal total mass")
    demand = demand * (supply.sum() / demand.sum())  # absorb rounding mismatch

    alloc, basis = _northwest_corner(supply, demand)
    basis_set = set(basis)
    bland_after = 50 * (m + n) + 200
    for it in range(max_iter):
        u, v, adj = _potentials(cost, basis, m, n)
        reduced = cost - u[:, None] - v[None, :]
        if it < bland_after:
            flat = int(np.argmin(reduced))
            entering = (flat // n, flat % n)
            if reduced[entering] >= -1e-12:
                break
        else:  # Bland: first improving cell in row-major order
            neg = np.argwhere(reduced < -1e-12)
            if len(neg) == 0:
                break
            entering = (int(neg[0][0]), int(neg[0][1]))
        if entering in basis_set:
            break
        cycle = _basis_cycle(entering, adj, m, n)
        minus = cycle[1::2]
        theta = min(alloc[c] for c in minus)
        leaving = min((c for c in minus if alloc[c] == theta))
        for k, c in enumerate(cycle):
            alloc[c] = alloc[c] + theta if k % 2 == 0 else max(alloc[c] - theta, 0.0)
        basis_set.remove(leaving)
        basis_set.add(entering)
        basis.remove(leaving)
        basis.append(entering)
    else:
        raise CurvatureError("transportation simplex failed to converge")
    return float(sum(alloc[c] * cost[c] for c in basis_set))


def wasserstein_w1(mu: ProbabilityMeasure, mv: ProbabilityMeasure, d: DistanceTable) -> float:
    """Exact 1-Wasserstein distance between two node measures.

    Ground costs are shortest-path distances from ``d``; raises if any
    support pair is unreachable (infinite cost). Shortest-path costs form a
    metric, so mass shared by both measures can provably stay in place; only
    the residual masses enter the transportation solve.
    """
    mv_map = dict(zip(mv.support, mv.mass))
    mu_map = dict(zip(mu.support, mu.mass))
    rows, supply = [], []
    for node, mass in zip(mu.support, mu.mass):
        residual = mass - min(mass, mv_map.get(node, 0.0))
        if residual > 1e-15:
            rows.append(node)
            supply.append(residual)
    cols, demand = [], []
    for node, mass in zip(mv.support, mv.mass):
        residual = mass - min(mass, mu_map.get(node, 0.0))
        if residual > 1e-15:
            cols.append(node)
            demand.append(residual)
    if not rows or not cols:
        return 0.0
    cost = d.d[np.ix_(np.array(rows, dtype=np.intp), np.array(cols, dtype=np.intp))]
    value = solve_transport(cost, np.array(supply), np.array(demand))
    return max(value, 0.0)


# ---------------------------------------------------------------------------
# Per-edge curvatures
# ---------------------------------------------------------------------------

def ollivier_ricci_edge(g: Graph, e, mode: str = "hop", dist_table: DistanceTable | None = None) -> float:
    """Ollivier curvature ``1 - W1(m_u, m_v) / d(u, v)`` of one edge.

    ``mode`` selects hop or distance-weighted shortest paths for both the
    transport costs and the edge distance. Pass a precomputed ``dist_table``
    when evaluating many edges of the same graph.
    """
    u, v = e
    if not g.has_edge(u, v):
        raise GraphError(f"edge ({u},{v}) not in graph")
    if dist_table is None:
        dist_table = curvature_distance_table(g, mode)
    duv = float(dist_table.d[u, v])
    if duv == 0.0:
        raise CurvatureError(f"edge ({u},{v}) has zero distance; curvature undefined")
    if not np.isfinite(duv):
        raise CurvatureError(f"endpoints of edge ({u},{v}) are disconnected")
    w1 = wasserstein_w1(neighbor_measure(g, u), neighbor_measure(g, v), dist_table)
    return 1.0 - w1 / duv


def curvature_distance_table(g: Graph, mode: str) -> DistanceTable:
    """Shortest-path table for curvature use; weighted mode clamps zero edges."""
    clamp = WEIGHT_CLAMP if mode == "weighted" else 0.0
    return shortest_paths(g, mode, min_edge_length=clamp)


def forman_ricci_edge(g: Graph, e, node_weights=None, edge_weights=None) -> float:
    """Forman curvature of one edge from node and edge weights (all > 0).

    ``node_weights`` is a per-node sequence (default all 1); ``edge_weights``
    maps sorted node pairs to weights (default all 1). With unit weights the
    value is exactly ``4 - deg(u) - deg(v)``.
    """
    u, v = e
    if not g.has_edge(u, v):
        raise GraphError(f"edge ({u},{v}) not in graph")

    def w_node(x):
        return 1.0 if node_weights is None else float(node_weights[x])

    def w_edge(a, b):
        if edge_weights is None:
            return 1.0
        return float(edge_weights[(min(a, b), max(a, b))])

    w_e = w_edge(u, v)
    w_u, w_v = w_node(u), w_node(v)
    if w_e <= 0.0 or w_u <= 0.0 or w_v <= 0.0:
        raise CurvatureError("Forman curvature requires strictly positive weights")
    total = w_u / w_e + w_v / w_e
    for x, w_x in ((u, w_u), (v, w_v)):
        for nbr in g.neighbors(x):
            if {x, nbr} == {u, v}:
                continue
            w_inc = w_edge(x, nbr)
            if w_inc <= 0.0:
                raise CurvatureError("Forman curvature requires strictly positive weights")
            total -= w_x / math.sqrt(w_e * w_inc)
    return w_e * total


def menger_ricci_edge(g: Graph, e) -> float:
    """Menger curvature: sqrt(3)/2 per combinatorial triangle through the edge."""
    return len(triangles_of_edge(g, e)) * UNIT_TRIANGLE_CURVATURE


def haantjes_ricci_edge(g: Graph, e, max_len: int | None = 4) -> float:
    """Haantjes curvature: sum of sqrt(n - 1) over simple detours of length n.

    Detours run between the edge's endpoints with edge-length 2..``max_len``
    (``None`` lifts the bound), never traversing the edge itself.
    """
    u, v = e
    if not g.has_edge(u, v):
        raise GraphError(f"edge ({u},{v}) not in graph")
    paths = simple_paths_between(g, u, v, max_len=max_len, exclude_edge=True)
    return float(sum(math.sqrt(len(p) - 2) for p in paths))


def haantjes_all_edges(g: Graph, max_len: int | None = 4) -> dict[tuple[int, int], float]:
    """Haantjes curvature for every edge at once.

    For the standard bound (``max_len <= 4``) detour counts come from closed
    adjacency-matrix expressions, avoiding path enumeration on dense graphs;
    longer bounds fall back to depth-first enumeration per edge.
    """
    edges = g.edges()
    if max_len is not None and max_len <= 4:
        counts = _detour_counts_upto4(g)
        out = {}
        weights = [0.0, 1.0, math.sqrt(2.0), math.sqrt(3.0)]  # index = path length - 1
        for e in edges:
            total = 0.0
            for length in range(2, max_len + 1):
                total += counts[length][e] * weights[length - 1]
            out[e] = total
        return out
    return {e: haantjes_ricci_edge(g, e, max_len=max_len) for e in edges}


def _detour_counts_upto4(g: Graph):
    """Counts of simple u-v paths of length 2, 3 and 4 avoiding each edge (u, v).

    Uses walk counts from adjacency powers with exact corrections for the
    non-simple walks; all quantities are small integers computed in float64.
    """
    a = g.adjacency().astype(np.float64)
    deg = g.degrees().astype(np.float64)
    a2 = a @ a
    a3 = a2 @ a
    a4 = a3 @ a
    w = (a * deg[None, :]) @ a  # W[u,v] = sum over common neighbours x of deg(x)
    diag3 = np.diag(a3)
    c2, c3, c4 = {}, {}, {}
    for u, v in g.edges():
        cn = a2[u, v]
        c2[(u, v)] = int(round(cn))
        c3[(u, v)] = int(round(a3[u, v] - deg[u] - deg[v] + 1.0))
        walks = a4[u, v] - diag3[u] - diag3[v] + a2[u, v]
        bad = (deg[u] + deg[v] - 4.0) * cn + w[u, v]
        c4[(u, v)] = int(round(walks - bad))
    return {2: c2, 3: c3, 4: c4}


# ---------------------------------------------------------------------------
# Whole-graph evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvatureConfig:
    """Which curvature notions to evaluate and how they read the graph weights."""

    ollivier: bool = True
    forman: bool = True
    menger: bool = True
    haantjes: bool = True
    ollivier_mode: str = "weighted"  # hop | weighted shortest paths
    forman_edge_weight: str = "dist"  # dist | unit
    haantjes_max_len: int | None = 4


@dataclass(frozen=True)
class EdgeCurvatures:
    """Per-edge curvature maps plus their graph-wide arithmetic means."""

    edges: tuple[tuple[int, int], ...]
    ollivier: dict | None
    forman: dict | None
    menger: dict | None
    haantjes: dict | None
    ore: float | None
    fre: float | None
    mre: float | None
    hre: float | None


def _mean(values) -> float:
    return float(np.mean(list(values)))


def all_edge_curvatures(g: Graph, config: CurvatureConfig | None = None) -> EdgeCurvatures:
    """Evaluate every enabled curvature on every edge of a connected graph."""
    config = config or CurvatureConfig()
    edges = g.edges()
    if not edges:
        raise CurvatureError("graph has no edges")

    ollivier = forman = menger = haantjes = None
    if config.ollivier:
        if not g.is_connected():
            raise CurvatureError("Ollivier curvature requires a connected graph")
        table = curvature_distance_table(g, config.ollivier_mode)
        measures = {}
        for u in range(g.node_count):
            if g.degree(u) > 0:
                measures[u] = neighbor_measure(g, u)
        ollivier = {}
        for u, v in edges:
            duv = float(table.d[u, v])
            if duv == 0.0:
                raise CurvatureError(f"edge ({u},{v}) has zero distance; curvature undefined")
            w1 = wasserstein_w1(measures[u], measures[v], table)
            ollivier[(u, v)] = 1.0 - w1 / duv
    if config.forman:
        if config.forman_edge_weight == "dist":
            edge_w = {e: max(g.dist(*e), WEIGHT_CLAMP) for e in edges}
        elif config.forman_edge_weight == "unit":
            edge_w = None
        else:
            raise CurvatureError(f"unknown forman_edge_weight {config.forman_edge_weight!r}")
        forman = {e: forman_ricci_edge(g, e, edge_weights=edge_w) for e in edges}
    if config.menger:
        menger = {e: menger_ricci_edge(g, e) for e in edges}
    if config.haantjes:
        haantjes = haantjes_all_edges(g, max_len=config.haantjes_max_len)

    return EdgeCurvatures(
        edges=edges,
        ollivier=ollivier,
        forman=forman,
        menger=menger,
        haantjes=haantjes,
        ore=_mean(ollivier.values()) if ollivier is not None else None,
        fre=_mean(forman.values()) if forman is not None else None,
        mre=_mean(menger.values()) if menger is not None else None,
        hre=_mean(haantjes.values()) if haantjes is not None else None,
    )

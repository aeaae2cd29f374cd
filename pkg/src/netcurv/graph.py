"""Undirected weighted graphs and the primitive algorithms everything else builds on.

Nodes are dense integer ids ``0..n-1``; string labels (stock tickers) ride along
in a side tuple. Every edge carries two weights: a correlation in ``[-1, 1]``
and the derived distance ``sqrt(2 * (1 - corr))``. Graphs are immutable after
construction, so all functions here are pure and safe to call concurrently on
shared inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path as _csgraph_shortest_path

#: Allowed |dist - sqrt(2 * (1 - corr))| when both edge weights are supplied.
DIST_CORR_TOL = 1e-12


class GraphError(ValueError):
    """Invalid graph construction or query."""


def corr_to_dist(corr: float) -> float:
    """Map a correlation to the metric distance sqrt(2 * (1 - corr))."""
    return math.sqrt(max(2.0 * (1.0 - corr), 0.0))


class Graph:
    """Undirected simple graph with per-edge correlation and distance weights.

    Build through :func:`build_graph`; instances are treated as immutable.
    Adjacency queries return neighbours in ascending node-id order.
    """

    __slots__ = ("node_count", "labels", "_adj", "_edge_attr", "_cache")

    def __init__(self, node_count, edge_list, labels=None):
        if node_count < 0:
            raise GraphError("node_count must be >= 0")
        if labels is not None and len(labels) != node_count:
            raise GraphError("labels length must equal node_count")
        self.node_count = int(node_count)
        self.labels = tuple(labels) if labels is not None else None
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        attr: dict[tuple[int, int], tuple[float, float]] = {}
        for item in edge_list:
            i, j = int(item[0]), int(item[1])
            corr = float(item[2]) if len(item) > 2 else 1.0
            dist = float(item[3]) if len(item) > 3 else corr_to_dist(corr)
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise GraphError(f"edge ({i},{j}) out of range for n={self.node_count}")
            if i == j:
                raise GraphError(f"self-loop at node {i}")
            if not -1.0 - 1e-12 <= corr <= 1.0 + 1e-12:
                raise GraphError(f"edge ({i},{j}): correlation {corr} outside [-1, 1]")
            if dist < 0.0:
                raise GraphError(f"edge ({i},{j}): negative distance {dist}")
            if abs(dist - corr_to_dist(corr)) > DIST_CORR_TOL:
                raise GraphError(
                    f"edge ({i},{j}): dist {dist} inconsistent with corr {corr}"
                )
            key = (i, j) if i < j else (j, i)
            if key in attr:
                raise GraphError(f"duplicate edge {key}")
            attr[key] = (corr, dist)
            adj[i].append(j)
            adj[j].append(i)
        self._adj = tuple(tuple(sorted(nbrs)) for nbrs in adj)
        self._edge_attr = attr
        self._cache: dict[str, object] = {}

    # -- basic queries --------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self._edge_attr)

    def edges(self) -> tuple[tuple[int, int], ...]:
        """All edges as (i, j) with i < j, sorted lexicographically."""
        cached = self._cache.get("edges")
        if cached is None:
            cached = tuple(sorted(self._edge_attr))
            self._cache["edges"] = cached
        return cached

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._adj[u]

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edge_attr

    def corr(self, u: int, v: int) -> float:
        return self._edge_attr[(min(u, v), max(u, v))][0]

    def dist(self, u: int, v: int) -> float:
        return self._edge_attr[(min(u, v), max(u, v))][1]

    def label(self, u: int) -> str:
        return self.labels[u] if self.labels is not None else str(u)

    # -- cached dense views ---------------------------------------------

    def degrees(self) -> np.ndarray:
        cached = self._cache.get("degrees")
        if cached is None:
            cached = np.array([len(nbrs) for nbrs in self._adj], dtype=np.int64)
            self._cache["degrees"] = cached
        return cached

    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency matrix (n x n)."""
        cached = self._cache.get("adjacency")
        if cached is None:
            a = np.zeros((self.node_count, self.node_count), dtype=bool)
            for i, j in self._edge_attr:
                a[i, j] = a[j, i] = True
            cached = a
            self._cache["adjacency"] = cached
        return cached

    def edge_dists(self) -> np.ndarray:
        """Distances aligned with :meth:`edges`."""
        return np.array([self._edge_attr[e][1] for e in self.edges()])

    def edge_corrs(self) -> np.ndarray:
        """Correlations aligned with :meth:`edges`."""
        return np.array([self._edge_attr[e][0] for e in self.edges()])

    def csr(self, weighted: bool, min_edge_length: float = 0.0) -> csr_matrix:
        """Sparse adjacency with edge lengths; hop mode uses unit lengths.

        ``min_edge_length`` clamps zero distances (perfectly correlated pairs)
        so downstream shortest-path ratios stay well defined.
        """
        n = self.node_count
        rows, cols, vals = [], [], []
        for (i, j), (_, dist) in self._edge_attr.items():
            w = max(dist, min_edge_length) if weighted else 1.0
            rows.extend((i, j))
            cols.extend((j, i))
            vals.extend((w, w))
        return csr_matrix((vals, (rows, cols)), shape=(n, n))

    def is_connected(self) -> bool:
        if self.node_count <= 1:
            return True
        seen = [False] * self.node_count
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        return count == self.node_count

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


@dataclass(frozen=True)
class DistanceTable:
    """All-pairs shortest-path lengths; unreachable pairs hold ``+inf``."""

    mode: str  # "hop" or "weighted"
    d: np.ndarray  # (n, n) float matrix, zero diagonal, symmetric

    def __getitem__(self, pair):
        return self.d[pair]


def build_graph(n, edge_list, labels=None) -> Graph:
    """Validate and build a graph from (i, j, corr, dist) tuples.

    Tuples may omit ``dist`` (derived from ``corr``) or both weights
    (``corr=1``, ``dist=0``). Rejects out-of-range ids, self-loops,
    duplicate edges and corr/dist inconsistencies beyond ``DIST_CORR_TOL``.
    """
    return Graph(n, edge_list, labels=labels)


def unit_graph(n, pairs, labels=None) -> Graph:
    """Unweighted convenience constructor: corr=1, dist=0 on every edge."""
    return Graph(n, [(i, j, 1.0, 0.0) for i, j in pairs], labels=labels)


def shortest_paths(g: Graph, mode: str = "hop", min_edge_length: float = 0.0) -> DistanceTable:
    """Exact all-pairs shortest paths, hop counts or distance-weighted."""
    if mode not in ("hop", "weighted"):
        raise GraphError(f"unknown shortest-path mode {mode!r}")
    n = g.node_count
    if n == 0:
        return DistanceTable(mode, np.zeros((0, 0)))
    if g.edge_count == 0:
        d = np.full((n, n), np.inf)
        np.fill_diagonal(d, 0.0)
        return DistanceTable(mode, d)
    graph = g.csr(weighted=(mode == "weighted"), min_edge_length=min_edge_length)
    d = _csgraph_shortest_path(graph, method="D", directed=False,
                               unweighted=(mode == "hop"))
    return DistanceTable(mode, d)


def mst_prim(dist) -> list[tuple[int, int]]:
    """Minimum spanning tree of a full symmetric distance matrix, via Prim.

    Ties are broken by the lexicographically smallest (min-id, max-id) edge
    pair so output is reproducible. Returns n-1 edges sorted as (i, j), i < j.
    """
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise GraphError("distance matrix must be square")
    n = d.shape[0]
    if n == 0:
        raise GraphError("distance matrix must have at least one node")
    if not np.all(np.isfinite(d)):
        raise GraphError("distance matrix entries must be finite")
    if not np.allclose(d, d.T, atol=1e-12, rtol=0.0):
        raise GraphError("distance matrix must be symmetric")
    if n == 1:
        return []

    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best = d[0].copy()
    best[0] = np.inf
    parent = np.zeros(n, dtype=np.int64)
    edges: list[tuple[int, int]] = []
    for _ in range(n - 1):
        vals = np.where(in_tree, np.inf, best)
        mval = vals.min()
        cands = np.flatnonzero(vals == mval)
        u = int(min(cands, key=lambda x: (min(x, parent[x]), max(x, parent[x]))))
        p = int(parent[u])
        edges.append((min(u, p), max(u, p)))
        in_tree[u] = True
        du = d[u]
        free = ~in_tree
        improve = free & (du < best)
        best[improve] = du[improve]
        parent[improve] = u
        for w in np.flatnonzero(free & (du == best) & (parent != u)):
            if (min(u, w), max(u, w)) < (min(parent[w], w), max(parent[w], w)):
                parent[w] = u
    return sorted(edges)


def triangles_of_edge(g: Graph, e: tuple[int, int]) -> list[int]:
    """Third vertices of every triangle containing edge ``e``, ascending."""
    u, v = e
    if not g.has_edge(u, v):
        raise GraphError(f"edge ({u},{v}) not in graph")
    nu, nv = set(g.neighbors(u)), set(g.neighbors(v))
    return sorted(nu & nv)


def simple_paths_between(g, u, v, max_len=4, exclude_edge=True):
    """All simple paths from u to v with edge-length in 2..max_len.

    ``max_len=None`` removes the length bound. Paths are returned as node
    tuples in lexicographic order (neighbours explored in ascending id order).
    A simple path anchored at both endpoints can only traverse the direct
    edge (u, v) as the whole length-1 path, which is below the 2-edge floor,
    so ``exclude_edge`` never changes the result; it is kept to make the
    contract explicit at call sites.
    """
    if u == v:
        raise GraphError("endpoints must differ")
    if max_len is not None and max_len < 2:
        raise GraphError("max_len must be >= 2")
    if not (0 <= u < g.node_count and 0 <= v < g.node_count):
        raise GraphError("endpoint out of range")
    del exclude_edge
    limit = max_len if max_len is not None else g.node_count
    paths: list[tuple[int, ...]] = []
    path = [u]
    on_path = {u}

    def walk(node: int) -> None:
        for w in g.neighbors(node):
            if w == v:
                if 2 <= len(path) <= limit:  # closing step yields len(path) edges
                    paths.append(tuple(path) + (v,))
                continue
            if w in on_path or len(path) >= limit:
                continue
            path.append(w)
            on_path.add(w)
            walk(w)
            path.pop()
            on_path.remove(w)

    walk(u)
    return paths

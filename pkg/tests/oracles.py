"""Independent brute-force reference implementations used only by tests.

Everything here deliberately avoids the package's own algorithms: distances
come from Floyd-Warshall, optimal transport from a dense scipy LP, spanning
trees and partitions from exhaustive enumeration, portfolios from grid search.
"""

from itertools import combinations

import numpy as np
from scipy.optimize import linprog


def floyd_warshall(n, edges, weights=None):
    """All-pairs shortest paths; ``weights`` maps edge index to length (hop=1)."""
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for idx, (i, j) in enumerate(edges):
        w = 1.0 if weights is None else weights[idx]
        d[i, j] = min(d[i, j], w)
        d[j, i] = min(d[j, i], w)
    for k in range(n):
        d = np.minimum(d, d[:, k][:, None] + d[k][None, :])
    return d


def lp_transport(cost, supply, demand):
    """Exact transportation LP via scipy's dense HiGHS solver."""
    cost = np.asarray(cost, dtype=float)
    m, n = cost.shape
    a_eq = np.zeros((m + n, m * n))
    for i in range(m):
        a_eq[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        a_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([supply, demand])
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    assert res.status == 0, f"oracle LP failed: {res.message}"
    return float(res.fun)


def lp_ollivier(n, edges, e, mode="hop", dists=None, clamp=1e-9):
    """Ollivier curvature of edge ``e`` from scratch: Floyd-Warshall + LP.

    ``dists`` gives per-edge lengths for weighted mode (aligned with edges).
    """
    if mode == "weighted":
        lengths = [max(w, clamp) for w in dists]
        d = floyd_warshall(n, edges, lengths)
    else:
        d = floyd_warshall(n, edges)
    adj = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    u, v = e
    su, sv = sorted(adj[u]), sorted(adj[v])
    mu = np.full(len(su), 1.0 / len(su))
    mv = np.full(len(sv), 1.0 / len(sv))
    cost = d[np.ix_(su, sv)]
    w1 = lp_transport(cost, mu, mv)
    return 1.0 - w1 / d[u, v]


def brute_force_mst_weight(dist):
    """Minimum spanning-tree weight by enumerating all edge subsets (n <= 7)."""
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    all_edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    best = np.inf
    for subset in combinations(all_edges, n - 1):
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for i, j in subset:
            ri, rj = find(i), find(j)
            if ri == rj:
                ok = False
                break
            parent[ri] = rj
        if ok:
            best = min(best, sum(d[i, j] for i, j in subset))
    return best


def set_partitions(items):
    """All set partitions of ``items`` (Bell-number many; keep len small)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        for k in range(len(partition)):
            yield partition[:k] + [[first] + partition[k]] + partition[k + 1:]
        yield [[first]] + partition


def modularity_value(n, edges, weights, communities):
    """Newman modularity of a node->community assignment."""
    m_w = sum(weights)
    if m_w == 0:
        return 0.0
    strength = np.zeros(n)
    for (i, j), w in zip(edges, weights):
        strength[i] += w
        strength[j] += w
    q = 0.0
    for (i, j), w in zip(edges, weights):
        if communities[i] == communities[j]:
            q += w / m_w
    for c in set(communities):
        d_c = sum(strength[i] for i in range(n) if communities[i] == c)
        q -= (d_c / (2.0 * m_w)) ** 2
    return q


def exhaustive_best_modularity(n, edges, weights):
    """Maximum modularity over every partition of the nodes (n <= 8)."""
    best = -np.inf
    for partition in set_partitions(range(n)):
        assign = {}
        for cid, block in enumerate(partition):
            for node in block:
                assign[node] = cid
        comm = [assign[i] for i in range(n)]
        best = max(best, modularity_value(n, edges, weights, comm))
    return best


def grid_min_risk_3assets(omega, step=1e-3):
    """Minimum portfolio risk on the 3-simplex: coarse grid + local refinement."""
    omega = np.asarray(omega, dtype=float)
    ticks = np.arange(0.0, 1.0 + step / 2, step)
    best_w, best_val = None, np.inf
    for w1 in ticks:
        w2 = np.arange(0.0, 1.0 - w1 + step / 2, step)
        w3 = 1.0 - w1 - w2
        ws = np.column_stack([np.full_like(w2, w1), w2, w3])
        vals = np.einsum("ki,ij,kj->k", ws, omega, ws)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = vals[k]
            best_w = ws[k]
    # local refinement around the grid optimum
    w = best_w
    scale = step
    for _ in range(40):
        improved = False
        for i in range(3):
            for j in range(3):
                if i == j:
                    continue
                cand = w.copy()
                shift = min(scale, cand[i])
                cand[i] -= shift
                cand[j] += shift
                val = cand @ omega @ cand
                if val < best_val - 1e-16:
                    best_val, w, improved = val, cand, True
        if not improved:
            scale /= 2.0
            if scale < 1e-9:
                break
    return np.sqrt(max(best_val, 0.0)), w


def random_connected_graph(rng, max_nodes=8, weighted=True):
    """Random connected graph as (n, edges, corrs, dists) for oracle tests."""
    n = int(rng.integers(2, max_nodes + 1))
    # random spanning tree first, then extra edges
    edges = set()
    nodes = list(range(n))
    rng.shuffle(nodes)
    for k in range(1, n):
        a = nodes[int(rng.integers(0, k))]
        b = nodes[k]
        edges.add((min(a, b), max(a, b)))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < 0.35:
                edges.add((i, j))
    edges = sorted(edges)
    if weighted:
        corrs = [float(rng.uniform(-0.99, 0.999)) for _ in edges]
    else:
        corrs = [1.0 for _ in edges]
    dists = [float(np.sqrt(2.0 * (1.0 - c))) for c in corrs]
    return n, edges, corrs, dists

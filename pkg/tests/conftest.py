"""Shared graph builders for the test suite."""

import numpy as np
import pytest

from netcurv.graph import unit_graph

#: Per-criterion pass/fail lines collected by the acceptance tests and
#: echoed after the run, outside pytest's output capture.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])


def cycle_graph(n):
    return unit_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return unit_graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return unit_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves):
    return unit_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def book_graph(pages):
    """``pages`` triangles sharing the common edge (0, 1)."""
    edges = [(0, 1)]
    for k in range(pages):
        w = 2 + k
        edges += [(0, w), (1, w)]
    return unit_graph(pages + 2, edges)


def dist_edges(pairs_with_dist):
    """Edge tuples with an arbitrary distance and the matching correlation."""
    return [(i, j, 1.0 - d * d / 2.0, d) for i, j, d in pairs_with_dist]


def triangle_with_two_detours():
    """Triangle (0,1,2) plus a 4-edge and a 5-edge detour between 1 and 2.

    Exactly three simple paths join nodes 1 and 2 besides their direct edge:
    lengths 2 (through 0), 4 (through 7, 8) and 5 (through 6, 5, 4, 3).
    """
    edges = [(0, 1), (0, 2), (1, 2),
             (0, 7), (7, 8), (8, 2),
             (1, 6), (6, 5), (5, 4), (4, 3), (3, 2)]
    return unit_graph(9, edges)


def two_hub_graph():
    """13 nodes / 13 edges; edge (0,1) joins degree-3 hubs, (7,9) degree-4 hubs."""
    edges = [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 3),
             (7, 9), (6, 7), (7, 8), (7, 10), (6, 9), (9, 11), (9, 12)]
    return unit_graph(13, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

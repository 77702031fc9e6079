"""Shared fixtures: the 3x3 reference graph and random-graph helpers.

The reference graph (called ref_base throughout the tests) has variable
nodes b0..b2, check nodes c0..c2 and seven edges:

    e0={b0,c0} e1={b0,c1} e2={b1,c0} e3={b1,c1} e4={b1,c2}
    e5={b2,c1} e6={b2,c2}

Its three cycles, in canonical edge-tuple form:

    xi1 = (0,2,3,1)        4-cycle over b0,b1   ace 1
    xi2 = (3,5,6,4)        4-cycle over b1,b2   ace 1
    xi3 = (0,2,4,6,5,1)    6-cycle over all     ace 1
"""

import numpy as np
import pytest

from qcforge import TannerGraph

REF_EDGES = [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)]

XI1 = (0, 2, 3, 1)
XI2 = (3, 5, 6, 4)
XI3 = (0, 2, 4, 6, 5, 1)

# longer reference TBC walks, canonical form (see test_walks for the
# raw traversals they come from)
W1 = (0, 2, 3, 5, 6, 4, 3, 1)           # two 4-cycles sharing e3
W2 = (0, 2, 3, 1, 0, 2, 4, 6, 5, 1)     # xi1 + xi3
W3 = (0, 2, 4, 6, 5, 3, 4, 6, 5, 1)     # xi2 + xi3


@pytest.fixture
def ref_base():
    return TannerGraph(3, 3, REF_EDGES)


def random_graph(rng, max_var=8, max_chk=8, max_deg=4, min_var_deg=2,
                 allow_parallel=False):
    """Random bipartite multigraph with bounded degrees.

    Variable degrees are drawn in [min_var_deg, max_deg]; check targets
    are drawn per edge.  Check degrees land where they land, so use
    degree_distribution-sensitive tests only on the variable side.
    """
    n_var = int(rng.integers(2, max_var + 1))
    n_chk = int(rng.integers(2, max_chk + 1))
    edges = []
    for v in range(n_var):
        d = int(rng.integers(min_var_deg, max_deg + 1))
        if allow_parallel:
            targets = rng.integers(0, n_chk, size=d)
        else:
            d = min(d, n_chk)
            targets = rng.permutation(n_chk)[:d]
        for c in targets:
            edges.append((v, int(c)))
    return TannerGraph(n_var, n_chk, edges)


def random_assignment(rng, graph, N):
    from qcforge import ShiftAssignment
    return ShiftAssignment(N, rng.integers(0, N, size=graph.n_edges))


def nx_cycle_lengths(graph, max_len):
    """Cycle counts per length via networkx, as an independent oracle."""
    import networkx as nx
    g = nx.MultiGraph()
    g.add_nodes_from(("v", i) for i in range(graph.n_var))
    g.add_nodes_from(("c", j) for j in range(graph.n_chk))
    for v, c in graph.edges():
        g.add_edge(("v", v), ("c", c))
    counts = {}
    for cyc in nx.simple_cycles(g, length_bound=max_len):
        counts[len(cyc)] = counts.get(len(cyc), 0) + 1
    return counts

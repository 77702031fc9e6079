"""Progressive edge-growth construction of base Tanner graphs.

Builds a simple bipartite graph with a prescribed variable degree
sequence, one edge at a time.  Each new edge from a variable node goes
to a check node as far away as possible in the graph built so far
(breaking ties toward low check degree, then by seeded random choice),
which pushes short cycles out as far as the degree sequence allows.
"""

from __future__ import annotations

import numpy as np

from .graph import TannerGraph


def _bfs_check_dists(var_nbrs, chk_nbrs, root, n_chk):
    """Distances from variable `root` to every check, -1 if unreached."""
    dist_c = np.full(n_chk, -1, dtype=np.int64)
    dist_v = np.full(len(var_nbrs), -1, dtype=np.int64)
    dist_v[root] = 0
    frontier = [root]
    depth = 0
    while frontier:
        # variable layer at `depth`; reach checks at depth+1
        nxt = []
        for v in frontier:
            for c in var_nbrs[v]:
                if dist_c[c] < 0:
                    dist_c[c] = depth + 1
                    nxt.append(c)
        frontier2 = []
        for c in nxt:
            for v in chk_nbrs[c]:
                if dist_v[v] < 0:
                    dist_v[v] = depth + 2
                    frontier2.append(v)
        frontier = frontier2
        depth += 2
    return dist_c


def peg_construct(n_var, n_chk, var_degrees, seed=0):
    """Build a simple Tanner graph with the given variable degrees.

    Variables are wired in nondecreasing degree order; the first edge of
    each goes to a lowest-degree check, later edges to checks at maximal
    BFS distance (unreached checks count as infinitely far).  Among
    candidates the lowest-degree ones are kept and one is drawn from the
    seeded generator, so runs are deterministic given the seed.

    Output edge ids are grouped by variable in index order regardless of
    the internal wiring order.
    """
    n_var = int(n_var)
    n_chk = int(n_chk)
    degs = [int(d) for d in var_degrees]
    if len(degs) != n_var:
        raise ValueError(f"expected {n_var} degrees, got {len(degs)}")
    if any(d < 2 for d in degs):
        raise ValueError("variable degrees must be >= 2")
    if any(d > n_chk for d in degs):
        raise ValueError("variable degree exceeds n_chk; no simple graph")
    if sum(degs) > n_var * n_chk:
        raise ValueError("degree sum exceeds n_var * n_chk")

    rng = np.random.default_rng(seed)
    var_nbrs = [[] for _ in range(n_var)]
    chk_nbrs = [[] for _ in range(n_chk)]
    chk_deg = np.zeros(n_chk, dtype=np.int64)

    def pick(candidates):
        # lowest current degree first, seeded draw among ties
        cand = np.asarray(sorted(candidates), dtype=np.int64)
        dmin = chk_deg[cand].min()
        cand = cand[chk_deg[cand] == dmin]
        return int(cand[rng.integers(len(cand))])

    order = sorted(range(n_var), key=lambda v: (degs[v], v))
    for v in order:
        for k in range(degs[v]):
            if k == 0:
                c = pick(range(n_chk))
            else:
                dist_c = _bfs_check_dists(var_nbrs, chk_nbrs, v, n_chk)
                unreached = np.flatnonzero(dist_c < 0)
                if len(unreached) > 0:
                    c = pick(unreached)
                else:
                    # exclude current neighbors; they sit at distance 1
                    # and a repeat would create a parallel edge
                    far = np.flatnonzero(dist_c == dist_c.max())
                    far = [int(x) for x in far if x not in var_nbrs[v]]
                    if not far:
                        raise ValueError(
                            f"variable {v}: no check available for edge "
                            f"{k + 1}; degree sequence infeasible under PEG")
                    c = pick(far)
            var_nbrs[v].append(c)
            chk_nbrs[c].append(v)
            chk_deg[c] += 1

    edges = [(v, c) for v in range(n_var) for c in sorted(var_nbrs[v])]
    return TannerGraph(n_var, n_chk, edges)

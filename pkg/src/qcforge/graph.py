"""Tanner graphs as bipartite multigraphs with first-class edges.

Variable nodes and check nodes are indexed 0..n_var-1 and 0..n_chk-1
separately.  Edges carry dense integer ids (0..n_edges-1) and parallel
edges are allowed, which matters for protographs: a lifted code can need
several circulants in one block position.

Cycles and closed walks are represented as tuples of edge ids.  Because
every walk considered here starts and ends on a variable node and
alternates sides, the traversal direction of each edge is implied by its
position: even positions go variable to check, odd positions go check to
variable.

Main entry points:

  TannerGraph          -- the graph itself
  Cycle                -- a cycle with its ACE value
  DegreeDistribution   -- exact edge-perspective degree fractions
  girth(g)             -- length of shortest cycle, inf if forest
  enumerate_cycles(g)  -- all cycles up to a length bound
  degree_distribution(g)
  walk_nodes(g, edges) -- node sequence of an edge walk, with validation
  canonical_cycle(edges)
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

# Hard ceiling for exhaustive cycle enumeration.  DFS cost explodes with
# the bound, so anything bigger must be requested explicitly.
DEFAULT_MAX_ENUM_LEN = 12
MAX_ENUM_LEN_ENV = "QCFORGE_MAX_ENUM_LEN"


class EnumerationBoundError(RuntimeError):
    """Requested enumeration length exceeds the configured safety bound."""


def max_enum_len():
    """Current enumeration safety bound (env override or default)."""
    raw = os.environ.get(MAX_ENUM_LEN_ENV)
    if raw is None:
        return DEFAULT_MAX_ENUM_LEN
    try:
        val = int(raw)
    except ValueError:
        raise ValueError(
            f"{MAX_ENUM_LEN_ENV} must be an integer, got {raw!r}")
    if val < 2:
        raise ValueError(f"{MAX_ENUM_LEN_ENV} must be >= 2, got {val}")
    return val


class TannerGraph:
    """Bipartite multigraph over variable and check nodes.

    Edges are given as (var, chk) pairs; the edge id is the position in
    that list.  Incidence is stored both ways as np arrays so walk code
    can stay vectorized.
    """

    def __init__(self, n_var, n_chk, edges):
        n_var = int(n_var)
        n_chk = int(n_chk)
        if n_var <= 0 or n_chk <= 0:
            raise ValueError("graph needs at least one node on each side")
        edges = list(edges)
        ev = np.zeros(len(edges), dtype=np.int64)
        ec = np.zeros(len(edges), dtype=np.int64)
        for i, (v, c) in enumerate(edges):
            v = int(v)
            c = int(c)
            if not (0 <= v < n_var):
                raise ValueError(f"edge {i}: variable index {v} out of range")
            if not (0 <= c < n_chk):
                raise ValueError(f"edge {i}: check index {c} out of range")
            ev[i] = v
            ec[i] = c
        self.n_var = n_var
        self.n_chk = n_chk
        self.edge_var = ev
        self.edge_chk = ec
        self.var_degrees = np.bincount(ev, minlength=n_var)
        self.chk_degrees = np.bincount(ec, minlength=n_chk)
        # edge ids incident to each node, in edge-id order
        order_v = np.argsort(ev, kind="stable")
        splits_v = np.cumsum(self.var_degrees)[:-1]
        self.var_edges = np.split(order_v, splits_v)
        order_c = np.argsort(ec, kind="stable")
        splits_c = np.cumsum(self.chk_degrees)[:-1]
        self.chk_edges = np.split(order_c, splits_c)

    @property
    def n_edges(self):
        return len(self.edge_var)

    def edges(self):
        """List of (var, chk) pairs in edge-id order."""
        return list(zip(self.edge_var.tolist(), self.edge_chk.tolist()))

    def adjacency_matrix(self):
        """Dense n_chk x n_var integer matrix of edge multiplicities."""
        h = np.zeros((self.n_chk, self.n_var), dtype=np.int64)
        np.add.at(h, (self.edge_chk, self.edge_var), 1)
        return h

    def csr_arrays(self):
        """Flat incidence arrays for compiled kernels.

        Returns (var_ptr, var_e, var_c, chk_ptr, chk_e, chk_v): for each
        variable node, var_e[var_ptr[u]:var_ptr[u+1]] are its edge ids
        and var_c the check endpoints, and symmetrically for checks.
        """
        var_ptr = np.concatenate(([0], np.cumsum(self.var_degrees)))
        chk_ptr = np.concatenate(([0], np.cumsum(self.chk_degrees)))
        if self.n_edges:
            var_e = np.concatenate(self.var_edges)
            chk_e = np.concatenate(self.chk_edges)
        else:
            var_e = np.zeros(0, np.int64)
            chk_e = np.zeros(0, np.int64)
        return (var_ptr.astype(np.int64), var_e.astype(np.int64),
                self.edge_chk[var_e].astype(np.int64),
                chk_ptr.astype(np.int64), chk_e.astype(np.int64),
                self.edge_var[chk_e].astype(np.int64))

    def __repr__(self):
        return (f"TannerGraph(n_var={self.n_var}, n_chk={self.n_chk}, "
                f"n_edges={self.n_edges})")

    def __eq__(self, other):
        if not isinstance(other, TannerGraph):
            return NotImplemented
        return (self.n_var == other.n_var and self.n_chk == other.n_chk
                and np.array_equal(self.edge_var, other.edge_var)
                and np.array_equal(self.edge_chk, other.edge_chk))

    def to_json(self):
        """Serialize to the protograph JSON dict format."""
        return {
            "n_var": self.n_var,
            "n_chk": self.n_chk,
            "edges": [[int(v), int(c)]
                      for v, c in zip(self.edge_var, self.edge_chk)],
        }

    @classmethod
    def from_json(cls, obj):
        for key in ("n_var", "n_chk", "edges"):
            if key not in obj:
                raise ValueError(f"protograph JSON missing field {key!r}")
        return cls(obj["n_var"], obj["n_chk"], obj["edges"])


def save_protograph(graph, path):
    with open(path, "w") as fh:
        json.dump(graph.to_json(), fh, indent=1)
        fh.write("\n")


def load_protograph(path):
    with open(path) as fh:
        return TannerGraph.from_json(json.load(fh))


def walk_nodes(graph, edges):
    """Node sequence [v0, c0, v1, c1, ..., v0] of a closed edge walk.

    Checks that consecutive edges actually share the node implied by the
    position parity and that the walk closes; raises ValueError if not.
    Odd length is rejected (walks here alternate sides).
    """
    edges = list(edges)
    if len(edges) == 0 or len(edges) % 2 != 0:
        raise ValueError("closed walk needs a positive even edge count")
    ev, ec = graph.edge_var, graph.edge_chk
    seq = [int(ev[edges[0]])]
    for i, e in enumerate(edges):
        if not (0 <= e < graph.n_edges):
            raise ValueError(f"edge id {e} out of range")
        if i % 2 == 0:
            if int(ev[e]) != seq[-1]:
                raise ValueError(f"edge {e} at position {i} does not leave "
                                 f"variable node {seq[-1]}")
            seq.append(int(ec[e]))
        else:
            if int(ec[e]) != seq[-1]:
                raise ValueError(f"edge {e} at position {i} does not leave "
                                 f"check node {seq[-1]}")
            seq.append(int(ev[e]))
    if seq[-1] != seq[0]:
        raise ValueError("walk does not close")
    return seq


def canonical_cycle(edges):
    """Canonical representative of a closed walk under rotation/reflection.

    Rotations must keep variable alignment, so only even offsets apply.
    Reflection reverses the edge order.  Returns the lexicographically
    smallest edge tuple among all representations.
    """
    edges = tuple(int(e) for e in edges)
    w = len(edges)
    if w == 0 or w % 2 != 0:
        raise ValueError("closed walk needs a positive even edge count")
    rev = edges[::-1]
    best = edges
    for r in range(0, w, 2):
        cand = edges[r:] + edges[:r]
        if cand < best:
            best = cand
        cand = rev[r:] + rev[:r]
        if cand < best:
            best = cand
    return best


def walk_ace(graph, edges):
    """ACE of a closed walk: sum of (deg - 2) over variable visits.

    Visits count with multiplicity, so a walk crossing a variable twice
    pays its excess degree twice.
    """
    edges = list(edges)
    total = 0
    for i in range(0, len(edges), 2):
        v = int(graph.edge_var[edges[i]])
        total += int(graph.var_degrees[v]) - 2
    return total


@dataclass(frozen=True)
class Cycle:
    """A cycle in a Tanner graph: canonical edge tuple plus its ACE."""

    edges: tuple
    ace: int

    @property
    def length(self):
        return len(self.edges)

    def __lt__(self, other):
        return (self.length, self.edges) < (other.length, other.edges)


def girth(graph):
    """Length of the shortest cycle, or float('inf') for a forest.

    BFS from every node; parallel edges give girth 2.  Exact on
    multigraphs because a shortest cycle through the BFS root is found
    when two BFS branches meet.
    """
    n = graph.n_var + graph.n_chk
    # unified node ids: variables 0..n_var-1, checks n_var..n-1
    nbr_node = []
    nbr_edge = []
    for v in range(graph.n_var):
        ids = graph.var_edges[v]
        nbr_node.append(graph.edge_chk[ids] + graph.n_var)
        nbr_edge.append(ids)
    for c in range(graph.n_chk):
        ids = graph.chk_edges[c]
        nbr_node.append(graph.edge_var[ids])
        nbr_edge.append(ids)

    best = np.inf
    dist = np.empty(n, dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    for root in range(n):
        dist.fill(-1)
        parent.fill(-1)
        dist[root] = 0
        queue = [root]
        head = 0
        while head < len(queue):
            x = queue[head]
            head += 1
            if 2 * dist[x] >= best:
                break
            for y, e in zip(nbr_node[x], nbr_edge[x]):
                if e == parent[x]:
                    continue
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    parent[y] = e
                    queue.append(y)
                elif e != parent[y]:
                    # non-tree edge closes a cycle through or above root
                    best = min(best, dist[x] + dist[y] + 1)
    return best


def enumerate_cycles(graph, max_len=None):
    """All cycles of length <= max_len, sorted by (length, edges).

    A cycle visits distinct nodes apart from the closing return, so both
    its variables and its checks are distinct.  Enumeration roots each
    cycle at its smallest variable node and walks variable to check; the
    direction is fixed by requiring first edge id < last edge id.

    max_len defaults to the graph's girth ceiling of interest and is
    capped by max_enum_len() to keep runaway searches out; raise the cap
    via the QCFORGE_MAX_ENUM_LEN environment variable if really needed.
    Returns a list of Cycle objects with canonical edge tuples.
    """
    if max_len is None:
        max_len = DEFAULT_MAX_ENUM_LEN
    max_len = int(max_len)
    if max_len < 2:
        return []
    bound = max_enum_len()
    if max_len > bound:
        raise EnumerationBoundError(
            f"cycle enumeration up to length {max_len} exceeds the bound "
            f"{bound}; set {MAX_ENUM_LEN_ENV} to allow it")
    max_len -= max_len % 2

    ev, ec = graph.edge_var, graph.edge_chk
    var_deg = graph.var_degrees
    out = []
    seen_var = np.zeros(graph.n_var, dtype=bool)
    seen_chk = np.zeros(graph.n_chk, dtype=bool)
    path = []

    def dfs(root, u, depth, ace):
        # arrived at variable u with 2*depth edges on the path
        for e in graph.var_edges[u]:
            c = ec[e]
            if seen_chk[c]:
                continue
            for f in graph.chk_edges[c]:
                if f == e or ev[f] != root:
                    continue
                first = path[0] if path else e
                if first < f:
                    cyc = tuple(path) + (int(e), int(f))
                    out.append(Cycle(canonical_cycle(cyc), ace))
            if 2 * depth + 4 <= max_len:
                seen_chk[c] = True
                for f in graph.chk_edges[c]:
                    if f == e:
                        continue
                    v2 = ev[f]
                    if v2 <= root or seen_var[v2]:
                        continue
                    seen_var[v2] = True
                    path.append(int(e))
                    path.append(int(f))
                    dfs(root, v2, depth + 1, ace + int(var_deg[v2]) - 2)
                    path.pop()
                    path.pop()
                    seen_var[v2] = False
                seen_chk[c] = False

    for root in range(graph.n_var):
        seen_var[root] = True
        dfs(root, root, 0, int(var_deg[root]) - 2)
        seen_var[root] = False
    out.sort()
    return out


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective degree distribution with exact rational weights.

    lam[i] is the fraction of edges attached to degree-i variable nodes,
    rho[i] the same for check nodes; both are dicts keyed by degree with
    Fraction values summing to 1.
    """

    lam: dict
    rho: dict

    def design_rate(self):
        """1 - sum(rho_j / j) / sum(lam_i / i), exact."""
        num = sum(f / j for j, f in self.rho.items())
        den = sum(f / i for i, f in self.lam.items())
        return 1 - Fraction(num, 1) / Fraction(den, 1)

    def __str__(self):
        lam = " + ".join(f"{f} x^{i}" for i, f in sorted(self.lam.items()))
        rho = " + ".join(f"{f} x^{j}" for j, f in sorted(self.rho.items()))
        return f"lambda(x) = {lam}; rho(x) = {rho}"


def degree_distribution(graph):
    """Exact edge-perspective degree distribution of a Tanner graph.

    Every node must have degree >= 2; lower degrees have no place in the
    edge-perspective polynomials and signal a broken construction.
    """
    ne = graph.n_edges
    lam = {}
    for v in range(graph.n_var):
        d = int(graph.var_degrees[v])
        if d < 2:
            raise ValueError(f"variable node {v} has degree {d} < 2")
        lam[d] = lam.get(d, 0) + d
    rho = {}
    for c in range(graph.n_chk):
        d = int(graph.chk_degrees[c])
        if d < 2:
            raise ValueError(f"check node {c} has degree {d} < 2")
        rho[d] = rho.get(d, 0) + d
    lam = {d: Fraction(k, ne) for d, k in sorted(lam.items())}
    rho = {d: Fraction(k, ne) for d, k in sorted(rho.items())}
    return DegreeDistribution(lam=lam, rho=rho)

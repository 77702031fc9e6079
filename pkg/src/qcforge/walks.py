"""Tailless backtrackless closed (TBC) walks and ACE spectra.

A TBC walk alternates variable and check nodes, starts and ends at the
same variable node, never reuses an edge immediately (e_i != e_{i+1}),
and its last edge differs from its first.  Cycles are the TBC walks with
no repeated nodes; every other TBC walk decomposes into two or more
cycles, which is why controlling walks controls the lifted cycles.

ACE of a walk is the sum of (degree - 2) over its variable-node visits,
counted with multiplicity.  The ACE spectrum of depth d_max collects,
for each even length 2i <= 2*d_max, the minimum ACE over all cycles of
that length (+inf when none exist).

A walk of length w and ACE eta is problematic for a target spectrum and
lift degree N when some divisor k of N has k*w <= 2*d_max and
k*eta < eta_{k*w}: its lifted image could then land below the target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graph import (EnumerationBoundError, MAX_ENUM_LEN_ENV, canonical_cycle,
                    enumerate_cycles, max_enum_len, walk_nodes)

INF = float("inf")


@dataclass(frozen=True)
class TBCWalk:
    """A TBC walk as a canonical edge tuple with its ACE value.

    Directions are implied by position parity (even index = variable to
    check), so edges alone determine the walk.
    """

    edges: tuple
    ace: int

    @property
    def length(self):
        return len(self.edges)

    def sort_key(self):
        # high ACE first within a length: walks through dense variable
        # nodes interlock the most and need shifts picked while the
        # edge space is still free
        return (self.length, -self.ace, self.edges)

    def to_json(self):
        dirs = [1 if i % 2 == 0 else -1 for i in range(len(self.edges))]
        return {
            "edges": [[int(e), d] for e, d in zip(self.edges, dirs)],
            "length": self.length,
            "ace": self.ace,
        }


@dataclass(frozen=True)
class ACESpectrum:
    """Minimum cycle ACE per length, for lengths 2, 4, ..., 2*d_max.

    values[i] is the entry for length 2*(i+1); entries are nonnegative
    integers or +inf.  The length-2 entry is only finite for multigraphs
    (parallel edges).
    """

    values: tuple

    def __post_init__(self):
        if len(self.values) < 1:
            raise ValueError("spectrum needs at least the length-2 entry")
        for v in self.values:
            if v != INF and (not isinstance(v, int) or v < 0):
                raise ValueError(f"spectrum entry {v!r} is not a "
                                 f"nonnegative integer or inf")

    @property
    def d_max(self):
        return len(self.values)

    def eta(self, length):
        """Entry for cycle length `length` (even, within depth)."""
        if length % 2 != 0 or not (2 <= length <= 2 * self.d_max):
            raise ValueError(f"length {length} outside spectrum depth")
        return self.values[length // 2 - 1]

    def render(self):
        return ",".join("inf" if v == INF else str(v) for v in self.values)

    @classmethod
    def parse(cls, text):
        vals = []
        for tok in text.split(","):
            tok = tok.strip().lower()
            if tok in ("inf", "+inf", "infinity"):
                vals.append(INF)
            else:
                vals.append(int(tok))
        return cls(tuple(vals))

    def dominates(self, other):
        """Pointwise >= comparison over the common depth."""
        if self.d_max != other.d_max:
            raise ValueError("spectra have different depths")
        return all(a >= b for a, b in zip(self.values, other.values))

    def to_json(self):
        return [None if v == INF else v for v in self.values]

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(INF if v is None else int(v) for v in obj))

    def __str__(self):
        return f"({self.render()})"


def enumerate_tbc_walks(graph, max_len, restrict=None, max_ace=None,
                        engine="auto"):
    """All TBC walks of length <= max_len, canonical and sorted.

    Grows walks from every variable node, recording a walk each time the
    growth returns to its root with the tail condition satisfied;
    rotations and reflections collapse onto one canonical tuple.  Walks
    are only rooted at their minimum variable node, which prunes the
    search without losing anything.

    restrict="two-cycles" keeps only walks whose edge multiset splits
    into at most two cycles, a cheaper approximation for dense graphs
    that still covers the dominant lifted structures.  Default keeps
    every walk.

    max_ace drops walks whose ACE exceeds it.  ACE only grows as a walk
    does, so the cap prunes during growth; it is the practical knob for
    bases with high-degree variable nodes, where heavy walks can never
    fall below any spectrum entry worth targeting anyway.

    engine picks the tree walker: "python" is the plain recursion below,
    "compiled" the numba kernel, and "auto" switches to the kernel once
    the graph is big enough to care.  Both produce the identical sorted
    list.  max_len is capped by the same bound as cycle enumeration
    (env QCFORGE_MAX_ENUM_LEN overrides).
    """
    max_len = int(max_len)
    if max_len < 2:
        return []
    bound = max_enum_len()
    if max_len > bound:
        raise EnumerationBoundError(
            f"TBC walk enumeration up to length {max_len} exceeds the "
            f"bound {bound}; set {MAX_ENUM_LEN_ENV} to allow it")
    max_len -= max_len % 2
    if restrict not in (None, "two-cycles"):
        raise ValueError(f"unknown restrict mode {restrict!r}")
    if engine not in ("auto", "python", "compiled"):
        raise ValueError(f"unknown engine {engine!r}")
    if engine == "auto":
        engine = "compiled" if graph.n_edges * max_len > 512 else "python"
    cap = INF if max_ace is None else int(max_ace)

    found = {}

    def keep(walk, ace):
        key = canonical_cycle(walk)
        if key in found:
            return
        if restrict == "two-cycles":
            if len(decompose_closed_walk(graph, walk)) > 2:
                return
        found[key] = TBCWalk(edges=key, ace=ace)

    if engine == "compiled":
        from .walkscan import scan_tbc_walks

        for walk, ace in scan_tbc_walks(graph, max_len, max_ace=max_ace):
            keep(walk, ace)
        return sorted(found.values(), key=TBCWalk.sort_key)

    ev, ec = graph.edge_var, graph.edge_chk
    var_deg = graph.var_degrees
    path = []

    def dfs(root, u, ace):
        # at variable u; path holds an even number of edges
        for e in graph.var_edges[u]:
            if path and e == path[-1]:
                continue
            c = ec[e]
            for f in graph.chk_edges[c]:
                if f == e:
                    continue
                v2 = ev[f]
                if v2 < root:
                    continue
                path.append(int(e))
                path.append(int(f))
                if v2 == root and f != path[0]:
                    keep(tuple(path), ace)
                if len(path) + 2 <= max_len:
                    ace2 = ace + int(var_deg[v2]) - 2
                    if ace2 <= cap:
                        dfs(root, v2, ace2)
                path.pop()
                path.pop()

    for root in range(graph.n_var):
        if int(var_deg[root]) - 2 <= cap:
            dfs(root, root, int(var_deg[root]) - 2)
    return sorted(found.values(), key=TBCWalk.sort_key)


def is_cycle(graph, walk_edges):
    """True when the closed walk has no repeated nodes."""
    seq = walk_nodes(graph, walk_edges)
    inner = seq[:-1]
    half = len(inner) // 2
    vs = inner[0::2]
    cs = inner[1::2]
    return len(set(vs)) == half and len(set(cs)) == half


def decompose_closed_walk(graph, walk_edges):
    """Split a closed walk's edges into node-disjoint-per-piece cycles.

    Scans the node sequence and peels off a loop whenever a node repeats
    on the open stack; each peeled piece has distinct nodes, hence is a
    cycle.  The union of the returned edge tuples is exactly the walk's
    edge multiset.  Backtracking walks (e, e) would peel a doubled edge,
    which only forms a cycle in multigraphs, so feed TBC walks only.
    """
    seq = walk_nodes(graph, walk_edges)
    walk_edges = list(walk_edges)
    # tag nodes by side so variable i and check i do not collide
    tagged = [(i % 2, seq[i]) for i in range(len(seq) - 1)]
    w = len(walk_edges)
    cycles = []
    node_stack = [tagged[0]]
    edge_stack = []
    pos = {tagged[0]: 0}
    for i in range(w):
        nxt = tagged[(i + 1) % w]
        e = walk_edges[i]
        if nxt in pos:
            j = pos[nxt]
            piece = edge_stack[j:] + [e]
            if nxt[0] == 1:
                # piece closes at a check node; rotate one step so the
                # tuple is variable-rooted like every other cycle here
                piece = piece[1:] + piece[:1]
            cycles.append(canonical_cycle(piece))
            for popped in node_stack[j + 1:]:
                del pos[popped]
            del node_stack[j + 1:]
            del edge_stack[j:]
        else:
            pos[nxt] = len(node_stack)
            node_stack.append(nxt)
            edge_stack.append(e)
    return cycles


def ace_spectrum_from_cycles(cycles, d_max):
    """Spectrum of depth d_max from an iterable of Cycle objects."""
    vals = [INF] * d_max
    for cyc in cycles:
        idx = cyc.length // 2 - 1
        if idx < d_max and cyc.ace < vals[idx]:
            vals[idx] = cyc.ace
    return ACESpectrum(tuple(vals))


def ace_spectrum(graph, d_max):
    """Exact ACE spectrum of depth d_max by cycle enumeration."""
    d_max = int(d_max)
    if d_max < 1:
        raise ValueError(f"depth must be >= 1, got {d_max}")
    return ace_spectrum_from_cycles(enumerate_cycles(graph, 2 * d_max),
                                    d_max)


def divisors(n):
    out = [k for k in range(1, n + 1) if n % k == 0]
    return out


@dataclass(frozen=True)
class ProblematicWalk:
    """A TBC walk with the (k, k*w) pairs that violate the target."""

    walk: TBCWalk
    pairs: tuple  # of (k, k * length)


@dataclass(frozen=True)
class ProblematicWalkSet:
    """Problematic walks ordered by length, descending ACE, edge tuple."""

    entries: tuple

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def walks(self):
        return [entry.walk for entry in self.entries]

    def participation(self, n_edges):
        """How many problematic walks each edge appears in.

        Repeat traversals inside one walk still count that walk once.
        """
        counts = [0] * n_edges
        for entry in self.entries:
            for e in set(entry.walk.edges):
                counts[e] += 1
        return counts


def find_problematic_walks(graph, target, N, walks=None):
    """Walks whose lifted image could violate `target` at degree N.

    The test is literal: walk W of length w and ACE eta is problematic
    iff some divisor k of N has k*w <= 2*d_max and k*eta < eta_{k*w}.
    k = 1 and k = N are included.  The target must have an infinite
    length-2 entry; a finite one would tolerate parallel edges in the
    lift, which the swap machinery never aims for.

    `walks` injects a precomputed walk list (it is filtered to the
    target's depth); by default walks up to length 2*d_max are
    enumerated here.
    """
    N = int(N)
    if N < 1:
        raise ValueError(f"lift degree must be >= 1, got {N}")
    if target.eta(2) != INF:
        raise ValueError("target spectrum must have eta_2 = +inf")
    two_dmax = 2 * target.d_max
    if walks is None:
        walks = enumerate_tbc_walks(graph, two_dmax)
    entries = []
    for w in walks:
        if w.length > two_dmax:
            continue
        pairs = []
        for k in divisors(N):
            klen = k * w.length
            if klen > two_dmax:
                break
            if k * w.ace < target.eta(klen):
                pairs.append((k, klen))
        if pairs:
            entries.append(ProblematicWalk(walk=w, pairs=tuple(pairs)))
    entries.sort(key=lambda pw: pw.walk.sort_key())
    return ProblematicWalkSet(entries=tuple(entries))


def dump_walks_jsonl(walks, path):
    with open(path, "w") as fh:
        for w in walks:
            fh.write(json.dumps(w.to_json()) + "\n")

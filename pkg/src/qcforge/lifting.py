"""Cyclic lifts of Tanner graphs.

A degree-N cyclic lift replaces every base node by N copies and every
base edge e = {b, c} with shift d by the N edges {b^i, c^(i+d mod N)}.
The parity-check matrix of the lift is block-circulant: base entry (c,b)
becomes the N x N circulant that shifts by d, so these codes are
quasi-cyclic.

Shift arithmetic on walks: traversing e from variable to check
contributes +d, the reverse direction -d.  Since all walks here start at
a variable node, the sign of position i is (-1)^i and the total
determines how the walk's lifted copies close up: a walk with shift d
wraps into cycles only after N/gcd(N, d) laps (its "order").

Node and edge numbering in the expanded graph: base variable b copy i is
b*N + i, base check c copy j is c*N + j, and base edge e copy i is
e*N + i.  Dropping the copy index is integer division by N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import TannerGraph, walk_nodes
from .walks import ACESpectrum, INF

SHIFT_CONVENTION = "var-to-chk"


class ShiftAssignment:
    """Per-edge shifts in Z_N for a base graph with n_edges edges."""

    def __init__(self, N, shifts):
        N = int(N)
        if N < 1:
            raise ValueError(f"lift degree must be >= 1, got {N}")
        arr = np.asarray(shifts, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("shifts must be a flat sequence, one per edge")
        if arr.size and (arr.min() < 0 or arr.max() >= N):
            raise ValueError(f"shifts must lie in [0, {N})")
        self.N = N
        self.shifts = arr

    @classmethod
    def zero(cls, N, n_edges):
        return cls(N, np.zeros(n_edges, dtype=np.int64))

    @classmethod
    def from_dict(cls, N, mapping, n_edges):
        arr = np.zeros(n_edges, dtype=np.int64)
        for e, d in mapping.items():
            if not (0 <= int(e) < n_edges):
                raise ValueError(f"edge id {e} out of range")
            arr[int(e)] = int(d)
        return cls(N, arr)

    @property
    def n_edges(self):
        return self.shifts.size

    def replace(self, edge, d):
        """Copy with one shift changed."""
        arr = self.shifts.copy()
        arr[edge] = d
        return ShiftAssignment(self.N, arr)

    def __eq__(self, other):
        if not isinstance(other, ShiftAssignment):
            return NotImplemented
        return self.N == other.N and np.array_equal(self.shifts, other.shifts)

    def __repr__(self):
        return f"ShiftAssignment(N={self.N}, shifts={self.shifts.tolist()})"

    def to_json(self, base=None):
        """Shift-file dict; includes the matrix view for simple bases."""
        out = {
            "N": self.N,
            "convention": SHIFT_CONVENTION,
            "shifts": [{"edge": int(e), "d": int(d)}
                       for e, d in enumerate(self.shifts)],
        }
        if base is not None:
            mat = shift_matrix(base, self)
            if mat is not None:
                out["matrix"] = mat.tolist()
        return out

    @classmethod
    def from_json(cls, obj, n_edges=None):
        conv = obj.get("convention")
        if conv != SHIFT_CONVENTION:
            raise ValueError(
                f"unsupported shift convention {conv!r}; "
                f"expected {SHIFT_CONVENTION!r}")
        entries = obj["shifts"]
        size = n_edges if n_edges is not None else len(entries)
        if len(entries) != size:
            raise ValueError(
                f"shift file has {len(entries)} edges, base has {size}")
        arr = np.zeros(size, dtype=np.int64)
        seen = np.zeros(size, dtype=bool)
        for item in entries:
            e = int(item["edge"])
            if not (0 <= e < size):
                raise ValueError(f"edge id {e} out of range")
            if seen[e]:
                raise ValueError(f"duplicate shift for edge {e}")
            seen[e] = True
            arr[e] = int(item["d"])
        if not seen.all():
            missing = int(np.flatnonzero(~seen)[0])
            raise ValueError(f"shift file missing edge {missing}")
        return cls(obj["N"], arr)


def save_shifts(assignment, path, base=None):
    with open(path, "w") as fh:
        json.dump(assignment.to_json(base=base), fh, indent=1)
        fh.write("\n")


def load_shifts(path, n_edges=None):
    with open(path) as fh:
        return ShiftAssignment.from_json(json.load(fh), n_edges=n_edges)


def walk_shift(walk, assignment):
    """Alternating-sign shift sum of a closed walk, reduced mod N.

    Even positions traverse variable to check (+d), odd positions the
    reverse (-d); walks start at variable nodes so the parity of the
    position determines the direction.
    """
    edges = np.asarray(tuple(walk), dtype=np.int64)
    if edges.size and edges.max() >= assignment.n_edges:
        raise ValueError("walk uses edge ids outside the assignment's base")
    d = assignment.shifts[edges]
    return int((d[0::2].sum() - d[1::2].sum()) % assignment.N)


def walk_order(d, N):
    """Laps a walk of shift d makes before its lift closes: N/gcd(N,d)."""
    N = int(N)
    d = int(d)
    if not (0 <= d < N):
        raise ValueError(f"shift {d} outside [0, {N})")
    return N // math.gcd(N, d)


@dataclass(frozen=True)
class LiftedCode:
    """A base graph, its shift assignment, and the expanded lift."""

    base: TannerGraph
    assignment: ShiftAssignment
    expanded: TannerGraph

    @property
    def N(self):
        return self.assignment.N


def expand(base, assignment):
    """Expand a base graph under a shift assignment into a LiftedCode."""
    if assignment.n_edges != base.n_edges:
        raise ValueError(
            f"assignment covers {assignment.n_edges} edges, "
            f"base has {base.n_edges}")
    N = assignment.N
    e = np.arange(base.n_edges, dtype=np.int64)
    i = np.arange(N, dtype=np.int64)
    # expanded edge e*N + i joins b^i to c^(i + d_e mod N)
    var = (base.edge_var[:, None] * N + i[None, :]).ravel()
    chk = (base.edge_chk[:, None] * N
           + (i[None, :] + assignment.shifts[:, None]) % N).ravel()
    expanded = TannerGraph(base.n_var * N, base.n_chk * N,
                           zip(var.tolist(), chk.tolist()))
    return LiftedCode(base=base, assignment=assignment, expanded=expanded)


def shift_matrix(base, assignment):
    """Check-by-variable matrix of shifts, -1 where no edge.

    Only defined for simple bases; returns None when parallel edges make
    the per-cell view ambiguous.
    """
    h = base.adjacency_matrix()
    if h.max(initial=0) > 1:
        return None
    mat = np.full((base.n_chk, base.n_var), -1, dtype=np.int64)
    mat[base.edge_chk, base.edge_var] = assignment.shifts
    return mat


def export_qc_matrix(code):
    """Shift matrix of a lifted code (entries in Z_N, -1 for absent).

    Raises ValueError when the base has parallel edges; such codes have
    no single-shift-per-cell description and must be exported in
    expanded form instead.
    """
    mat = shift_matrix(code.base, code.assignment)
    if mat is None:
        raise ValueError("base graph has parallel edges; export the "
                         "expanded graph instead")
    return mat


def qc_matrix_to_graph(mat, N):
    """Expanded Tanner graph described by a shift matrix.

    Independent reconstruction used to cross-check export_qc_matrix:
    each nonnegative entry (c, v) = d becomes the N edges
    {v^i, c^(i+d mod N)}.  Edge order matches expand() for simple bases
    scanned variable-major.
    """
    mat = np.asarray(mat, dtype=np.int64)
    n_chk, n_var = mat.shape
    edges = []
    for v in range(n_var):
        for c in range(n_chk):
            d = mat[c, v]
            if d < 0:
                continue
            for i in range(N):
                edges.append((v * N + i, c * N + (i + d) % N))
    return TannerGraph(n_var * N, n_chk * N, edges)


def predict_cycle_image(cycle, assignment):
    """(count, length, ace) of a base cycle's inverse image in the lift.

    A cycle with shift d and order k = N/gcd(N, d) lifts to N/k cycles,
    each winding k times around the base cycle, so length and ACE both
    scale by k.
    """
    d = walk_shift(cycle.edges, assignment)
    k = walk_order(d, assignment.N)
    return (assignment.N // k, k * len(cycle.edges), k * cycle.ace)


def lifted_image_is_cycle(graph, walk_edges, assignment):
    """Whether a closed walk's lifted inverse-image pieces are cycles.

    The image of a walk with shift d and order k winds k laps and has
    length k*w; it fails to be a cycle exactly when two visits of the
    same base node land on the same copy.  Visit a at partial shift p_a
    on lap r_a collides with visit b on lap r_b iff
    p_a - p_b = (r_b - r_a)*d (mod N), and the lap difference sweeps the
    whole subgroup generated by d, so the test reduces to: no two
    distinct same-node visits may differ by a multiple of d.  Cycles
    have no repeated nodes and always pass.
    """
    seq = walk_nodes(graph, walk_edges)
    N = assignment.N
    d = walk_shift(walk_edges, assignment)
    k = walk_order(d, N)
    subgroup = {(t * d) % N for t in range(k)}
    shifts = assignment.shifts
    partial = 0
    visits = {}
    for pos, e in enumerate(walk_edges):
        visits.setdefault((pos % 2, seq[pos]), []).append(partial)
        if pos % 2 == 0:
            partial = (partial + int(shifts[e])) % N
        else:
            partial = (partial - int(shifts[e])) % N
    for ps in visits.values():
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                if (ps[i] - ps[j]) % N in subgroup:
                    return False
    return True


def predicted_lift_spectrum(graph, assignment, walks, d_max):
    """Exact lift ACE spectrum computed on the base side.

    Every cycle of length <= 2*d_max in the lift is the image of a TBC
    walk W winding k = order(W) laps, with length k*w, ACE k*eta and a
    collision-free image; conversely each such walk contributes N/k
    cycles.  Minimizing k*eta over qualifying walks per image length
    therefore reproduces the expanded graph's spectrum without ever
    expanding, which is what makes shift search affordable.

    `walks` must cover every TBC walk of length <= 2*d_max (e.g. from
    enumerate_tbc_walks(graph, 2*d_max)).  A list enumerated under an
    ACE cap yields a spectrum that is only trustworthy below the cap.
    """
    d_max = int(d_max)
    two_dmax = 2 * d_max
    ranked = []
    for w in walks:
        if w.length > two_dmax:
            continue
        d = walk_shift(w.edges, assignment)
        k = walk_order(d, assignment.N)
        if k * w.length > two_dmax:
            continue
        ranked.append((k * w.ace, k * w.length, w))
    ranked.sort(key=lambda t: t[0])
    vals = [INF] * d_max
    # cheapest candidates first, so each entry runs few collision tests
    for ace, length, w in ranked:
        idx = length // 2 - 1
        if vals[idx] <= ace:
            continue
        if lifted_image_is_cycle(graph, w.edges, assignment):
            vals[idx] = int(ace)
    return ACESpectrum(tuple(vals))


def embed_assignment(assignment, m):
    """Scale an assignment from degree N to degree N*m (shifts times m).

    Walk orders are unchanged (both N and every shift pick up the same
    factor) and the collision structure of every walk image carries
    over, so the lifted ACE spectrum at any fixed depth is preserved
    exactly.  Useful as a warm start when sweeping N over multiples.
    """
    m = int(m)
    if m < 1:
        raise ValueError(f"embedding factor must be >= 1, got {m}")
    return ShiftAssignment(assignment.N * m, assignment.shifts * m)


def trace_walk_copies(code, walk, start_copy=0):
    """Follow a base walk through the expanded graph, edge by edge.

    Starts at copy `start_copy` of the walk's first variable node and at
    each step moves along the unique expanded edge that projects onto
    the walk's base edge (each base edge has exactly one copy at every
    node copy).  Returns the copy index of the variable node reached at
    the end.  Independent of walk_shift: only the expanded incidence
    structure is consulted, so (start_copy + walk_shift) mod N matching
    this is a real check of the shift formula.
    """
    base, exp = code.base, code.expanded
    walk_nodes(base, walk)  # validates adjacency and closure
    N = code.N
    node = int(base.edge_var[walk[0]]) * N + start_copy
    for pos, e in enumerate(walk):
        if pos % 2 == 0:
            incident = exp.var_edges[node]
            ends = exp.edge_chk
        else:
            incident = exp.chk_edges[node]
            ends = exp.edge_var
        matches = incident[incident // N == e]
        if len(matches) != 1:
            raise AssertionError(
                f"expected one copy of base edge {e} at expanded node, "
                f"found {len(matches)}")
        node = int(ends[matches[0]])
    return node % N

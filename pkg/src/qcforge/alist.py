"""Read and write parity-check matrices in alist format.

The format is the plain-text one used by MacKay's sparse code archive:

    n m
    max_var_degree max_chk_degree
    n variable degrees
    m check degrees
    n lines of 1-based check neighbors, one line per variable
    m lines of 1-based variable neighbors, one line per check

Zero entries pad short neighbor lines in some writers; they are accepted
on input and never produced on output.  alist cannot express parallel
edges, so writing a multigraph is an error.
"""

from __future__ import annotations

from .graph import TannerGraph


class AlistFormatError(ValueError):
    """Malformed or internally inconsistent alist text."""


def parse_alist(text):
    """Parse alist text into a TannerGraph.

    Edge ids follow the variable-side neighbor lists: all edges of
    variable 0 first (checks ascending), then variable 1, and so on.
    Both neighbor views must describe the same matrix.
    """
    tokens = text.split()
    pos = 0

    def take(count, what):
        nonlocal pos
        if pos + count > len(tokens):
            raise AlistFormatError(f"truncated alist: expected {what}")
        vals = []
        for t in tokens[pos:pos + count]:
            try:
                vals.append(int(t))
            except ValueError:
                raise AlistFormatError(f"non-integer token {t!r} in {what}")
        pos += count
        return vals

    n, m = take(2, "size header")
    if n <= 0 or m <= 0:
        raise AlistFormatError(f"bad dimensions n={n} m={m}")
    dmax_v, dmax_c = take(2, "max degree header")
    var_deg = take(n, "variable degree list")
    chk_deg = take(m, "check degree list")
    if any(d < 0 or d > dmax_v for d in var_deg):
        raise AlistFormatError("variable degree outside [0, max]")
    if any(d < 0 or d > dmax_c for d in chk_deg):
        raise AlistFormatError("check degree outside [0, max]")
    if sum(var_deg) != sum(chk_deg):
        raise AlistFormatError(
            f"degree sums disagree: {sum(var_deg)} vs {sum(chk_deg)}")

    # Writers either pad every neighbor line to the max degree with
    # zeros or list exactly deg entries.  Decide which from the total
    # token count; mixed files are rejected.
    rest = len(tokens) - pos
    if rest == sum(var_deg) + sum(chk_deg):
        padded = False
    elif rest == n * dmax_v + m * dmax_c:
        padded = True
    else:
        raise AlistFormatError(
            f"{rest} neighbor tokens fit neither the unpadded count "
            f"{sum(var_deg) + sum(chk_deg)} nor the padded count "
            f"{n * dmax_v + m * dmax_c}")

    def neighbor_block(count, degs, limit, n_other, side):
        lists = []
        for i in range(count):
            want = degs[i]
            vals = take(limit if padded else want, f"{side} {i} neighbors")
            nz = [x for x in vals if x != 0]
            if len(nz) != want:
                raise AlistFormatError(
                    f"{side} {i}: {len(nz)} neighbors listed, degree {want}")
            if any(x < 1 or x > n_other for x in nz):
                raise AlistFormatError(
                    f"{side} {i}: neighbor index out of range")
            if len(set(nz)) != len(nz):
                raise AlistFormatError(f"{side} {i}: repeated neighbor")
            lists.append(sorted(x - 1 for x in nz))
        return lists

    var_nbrs = neighbor_block(n, var_deg, dmax_v, m, "variable")
    chk_nbrs = neighbor_block(m, chk_deg, dmax_c, n, "check")
    if pos != len(tokens):
        raise AlistFormatError(f"{len(tokens) - pos} trailing tokens")

    edges = [(v, c) for v in range(n) for c in var_nbrs[v]]
    from_chk = sorted((v, c) for c in range(m) for v in chk_nbrs[c])
    if sorted(edges) != from_chk:
        raise AlistFormatError("variable and check neighbor lists disagree")
    return TannerGraph(n, m, edges)


def format_alist(graph):
    """Render a TannerGraph as unpadded alist text.

    Neighbor lines are ascending and unpadded.  Raises ValueError on
    parallel edges since alist entries are binary.
    """
    var_nbrs = [sorted(graph.edge_chk[ids].tolist())
                for ids in graph.var_edges]
    chk_nbrs = [sorted(graph.edge_var[ids].tolist())
                for ids in graph.chk_edges]
    for v, nbrs in enumerate(var_nbrs):
        if len(set(nbrs)) != len(nbrs):
            raise ValueError(
                f"variable {v} has parallel edges; alist cannot express them")
    lines = [
        f"{graph.n_var} {graph.n_chk}",
        f"{max(graph.var_degrees, default=0)} "
        f"{max(graph.chk_degrees, default=0)}",
        " ".join(str(int(d)) for d in graph.var_degrees),
        " ".join(str(int(d)) for d in graph.chk_degrees),
    ]
    for nbrs in var_nbrs:
        lines.append(" ".join(str(c + 1) for c in nbrs))
    for nbrs in chk_nbrs:
        lines.append(" ".join(str(v + 1) for v in nbrs))
    return "\n".join(lines) + "\n"


def load_alist(path):
    with open(path) as fh:
        return parse_alist(fh.read())


def save_alist(graph, path):
    with open(path, "w") as fh:
        fh.write(format_alist(graph))

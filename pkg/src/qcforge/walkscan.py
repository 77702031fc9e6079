"""Compiled DFS kernel behind TBC walk enumeration.

The recursion in walks.enumerate_tbc_walks is fine for toy graphs but
melts on bases with high-degree variable nodes, where the walk count up
to length 10 runs into the millions.  This kernel walks the same tree
iteratively under numba, with two pruning rules baked in: growth stays
at variable nodes >= the root (each walk is found at its minimum
variable node only) and an optional ACE cap cuts branches that already
weigh too much.

Deduplication happens in-kernel: a closed walk is emitted only when the
current traversal is lexicographically minimal among all traversals of
the same walk that start at the root (every rotation starting at a root
visit, in both directions), so each walk costs exactly one buffer row.
The caller still canonicalizes across non-root rotation starts; the
kernel only guarantees one row per walk, not the canonical tuple.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _tbc_kernel(var_ptr, var_e, var_c, chk_ptr, chk_e, chk_v, var_excess,
                max_len, ace_cap, out_edges, out_len, out_ace):
    """Emit one row per TBC walk of length <= max_len and ACE <= ace_cap.

    Returns (count, status); status 1 means the output buffer filled up
    and the caller should retry with a bigger one.
    """
    n_var = var_ptr.size - 1
    cnt = 0
    node = np.zeros(max_len + 2, np.int64)
    it = np.zeros(max_len + 2, np.int64)
    pe = np.zeros(max_len + 2, np.int64)
    acc = np.zeros(max_len + 2, np.int64)
    varseq = np.zeros(max_len // 2 + 2, np.int64)

    for root in range(n_var):
        if var_excess[root] > ace_cap:
            continue
        node[0] = root
        it[0] = 0
        acc[0] = var_excess[root]
        varseq[0] = root
        level = 0
        while level >= 0:
            u = node[level]
            if level % 2 == 0:
                p = var_ptr[u]
                if it[level] >= var_ptr[u + 1] - p:
                    level -= 1
                    continue
                idx = p + it[level]
                it[level] += 1
                e = var_e[idx]
                if level > 0 and e == pe[level - 1]:
                    continue
                if level + 2 > max_len:
                    continue
                pe[level] = e
                level += 1
                node[level] = var_c[idx]
                it[level] = 0
            else:
                p = chk_ptr[u]
                if it[level] >= chk_ptr[u + 1] - p:
                    level -= 1
                    continue
                idx = p + it[level]
                it[level] += 1
                f = chk_e[idx]
                if f == pe[level - 1]:
                    continue
                v2 = chk_v[idx]
                if v2 < root:
                    continue
                if v2 == root and f != pe[0]:
                    # closed; emit only the minimal root-started form
                    L = level + 1
                    half = L // 2
                    minimal = True
                    for j in range(half):
                        if varseq[j] != root:
                            continue
                        # forward rotation starting at root visit j
                        if j > 0:
                            for t in range(L):
                                s = 2 * j + t
                                if s >= L:
                                    s -= L
                                a = f if s == level else pe[s]
                                b = f if t == level else pe[t]
                                if a != b:
                                    if a < b:
                                        minimal = False
                                    break
                            if not minimal:
                                break
                        # reversed traversal through the same visit
                        for t in range(L):
                            s = 2 * j - 1 - t
                            if s < 0:
                                s += L
                            a = f if s == level else pe[s]
                            b = f if t == level else pe[t]
                            if a != b:
                                if a < b:
                                    minimal = False
                                break
                        if not minimal:
                            break
                    if minimal:
                        if cnt >= out_len.size:
                            return cnt, 1
                        for t in range(level):
                            out_edges[cnt, t] = pe[t]
                        out_edges[cnt, level] = f
                        out_len[cnt] = L
                        out_ace[cnt] = acc[level - 1]
                        cnt += 1
                y = level + 1
                if y + 2 > max_len:
                    continue
                a2 = acc[level - 1] + var_excess[v2]
                if a2 > ace_cap:
                    continue
                pe[level] = f
                level += 1
                node[level] = v2
                it[level] = 0
                acc[level] = a2
                varseq[y // 2] = v2
    return cnt, 0


def scan_tbc_walks(graph, max_len, max_ace=None):
    """Raw (edge tuple, ace) pairs for all TBC walks of the graph.

    One pair per walk, already unique, but in traversal form rooted at
    the walk's minimum variable node rather than canonical form.
    """
    arrays = graph.csr_arrays()
    excess = (graph.var_degrees - 2).astype(np.int64)
    cap = np.int64(2) ** 62 if max_ace is None else np.int64(max_ace)
    size = 1 << 17
    while True:
        out_edges = np.zeros((size, max_len), np.int64)
        out_len = np.zeros(size, np.int64)
        out_ace = np.zeros(size, np.int64)
        cnt, status = _tbc_kernel(*arrays, excess, np.int64(max_len), cap,
                                  out_edges, out_len, out_ace)
        if status == 0:
            break
        size *= 4
    return [(tuple(out_edges[i, :out_len[i]].tolist()), int(out_ace[i]))
            for i in range(cnt)]

"""Pure-Python/numpy implementations of the hot kernels.

Mirrors the call signatures and exact semantics of the compiled extension
(`_speedups`); used when the extension is unavailable or when
COMMVULN_PURE_PYTHON=1. Tie-breaking and float accumulation order must stay
identical to the compiled lane so both produce bit-equal results. The
multi-level `louvain` driver here is the reference the fused compiled
version is tested against.
"""
from __future__ import annotations

from collections import deque
from functools import lru_cache

import numpy as np

BACKEND = "pure"

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def splitmix64(x) -> np.ndarray:
    """Vectorized splitmix64 hash over uint64 input (wrapping arithmetic)."""
    z = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z + np.uint64(0x9E3779B97F4A7C15)) & _MASK64
        z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
        z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
        return z ^ (z >> np.uint64(31))


@lru_cache(maxsize=4096)
def pass_order(seed: int, pass_no: int, n: int) -> np.ndarray:
    """Node permutation for one local-move pass.

    Argsort of per-node splitmix64 keys; splitmix64 is a bijection, so keys
    never collide and any correct sort yields the same permutation.
    """
    with np.errstate(over="ignore"):
        base = splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + np.uint64(pass_no))
        keys = splitmix64(base + np.arange(n, dtype=np.uint64))
    order = np.argsort(keys, kind="stable").astype(np.int64)
    order.setflags(write=False)
    return order


def level_strengths(indptr, weights, self_w):
    csum = np.concatenate([[0.0], np.cumsum(weights)])
    return (csum[indptr[1:]] - csum[indptr[:-1]]) + 2.0 * self_w


def aggregate_csr(indptr, indices, weights, self_w, dense_labels):
    """Coarsen a weighted CSR by community labels.

    Inter-community weights are summed into a meta-edge CSR sorted by
    (src, dst); intra weight plus prior self-weights become the new
    self-weights. Exact for integer-valued weights (always the case for
    detection, which runs on unit base weights).
    """
    n = indptr.shape[0] - 1
    nc = int(dense_labels.max()) + 1 if n else 0
    rows = np.repeat(np.arange(n, dtype=np.int64), indptr[1:] - indptr[:-1])
    lu = dense_labels[rows]
    lv = dense_labels[indices]
    intra = lu == lv
    new_self = np.bincount(dense_labels, weights=self_w, minlength=nc)
    new_self = new_self + 0.5 * np.bincount(lu[intra], weights=weights[intra], minlength=nc)
    inter = ~intra
    key = lu[inter] * nc + lv[inter]
    uniq, inv = np.unique(key, return_inverse=True)
    sums = np.bincount(inv, weights=weights[inter])
    src = uniq // nc
    dst = uniq % nc
    new_indptr = np.zeros(nc + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=nc), out=new_indptr[1:])
    return new_indptr, dst.astype(np.int32), sums.astype(np.float64), new_self


def local_move(indptr, indices, weights, self_w, strengths, two_m, labels, comm_tot, order):
    """One greedy relabeling sweep over `order`.

    Each node is reassigned to the candidate community (a neighbor's
    community or its own) with the largest modularity gain; exact ties go to
    the smallest community id. Mutates `labels` and `comm_tot` in place and
    returns (total modularity gain, number of nodes moved).
    """
    inv_two_m = 1.0 / two_m
    gain = 0.0
    moves = 0
    for v in order:
        v = int(v)
        a = int(labels[v])
        s_v = float(strengths[v])
        lo = int(indptr[v])
        hi = int(indptr[v + 1])
        # edge weight from v into each adjacent community, CSR order
        k_vc: dict[int, float] = {}
        for j in range(lo, hi):
            u = int(indices[j])
            if u == v:
                continue
            c = int(labels[u])
            k_vc[c] = k_vc.get(c, 0.0) + float(weights[j])
        comm_tot[a] -= s_v
        cur_score = k_vc.get(a, 0.0) - s_v * float(comm_tot[a]) * inv_two_m
        best_c = a
        best_score = cur_score
        for c, k in k_vc.items():
            if c == a:
                continue
            score = k - s_v * float(comm_tot[c]) * inv_two_m
            if score > best_score or (score == best_score and c < best_c):
                best_score = score
                best_c = c
        comm_tot[best_c] += s_v
        if best_c != a:
            labels[v] = best_c
            moves += 1
            gain += (best_score - cur_score) * 2.0 * inv_two_m
    return gain, moves


def louvain(indptr, indices, weights, self_w, seed, max_passes, min_gain):
    """Multi-level detection on a CSR; returns dense labels for the base nodes.

    Per level: repeated local-move passes (seeded scan order) until the pass
    gain drops below `min_gain` or the global pass budget is spent, then
    coarsen and recurse. Terminates when no coarsening is possible.
    """
    n0 = indptr.shape[0] - 1
    mapping = np.arange(n0, dtype=np.int64)
    pass_no = 0
    while True:
        n = indptr.shape[0] - 1
        strengths = level_strengths(indptr, weights, self_w)
        two_m = float(strengths.sum())
        if two_m <= 0.0:
            break
        labels = np.arange(n, dtype=np.int64)
        comm_tot = strengths.copy()
        improved = False
        while pass_no < max_passes:
            order = pass_order(int(seed), pass_no, n)
            gain, moves = local_move(
                indptr, indices, weights, self_w, strengths, two_m, labels, comm_tot, order
            )
            pass_no += 1
            if moves:
                improved = True
            if gain < min_gain:
                break
        _, dense = np.unique(labels, return_inverse=True)
        dense = dense.astype(np.int64)
        nc = int(dense.max()) + 1
        mapping = dense[mapping]
        if nc == n or not improved or pass_no >= max_passes:
            break
        indptr, indices, weights, self_w = aggregate_csr(indptr, indices, weights, self_w, dense)
    _, final = np.unique(mapping, return_inverse=True)
    return final.astype(np.int64)


def bfs_distances(indptr, indices, source):
    """Hop distances from `source`; -1 marks unreachable nodes."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        base = np.repeat(starts, counts)
        offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
        nbr = indices[base + offsets]
        nbr = nbr[dist[nbr] < 0]
        if nbr.size == 0:
            break
        frontier = np.unique(nbr).astype(np.int64)
        d += 1
        dist[frontier] = d
    return dist


def bfs_stats(indptr, indices):
    """Per-source BFS aggregates: (sum of distances, reachable count, eccentricity).

    Reachable count includes the source itself; eccentricity is the max
    distance within the source's component (0 for isolated nodes).
    """
    n = indptr.shape[0] - 1
    sum_dist = np.zeros(n, dtype=np.float64)
    reach = np.zeros(n, dtype=np.int64)
    ecc = np.zeros(n, dtype=np.int64)
    for s in range(n):
        dist = bfs_distances(indptr, indices, s)
        mask = dist >= 0
        sum_dist[s] = float(dist[mask].sum())
        reach[s] = int(mask.sum())
        ecc[s] = int(dist[mask].max()) if reach[s] else 0
    return sum_dist, reach, ecc


def brandes_betweenness(indptr, indices, sources=None):
    """Shortest-path betweenness by dependency accumulation.

    Counts each unordered node pair once. When `sources` is given, only
    those sources contribute (sampled estimate, unscaled).
    """
    n = indptr.shape[0] - 1
    bc = np.zeros(n, dtype=np.float64)
    src_iter = range(n) if sources is None else [int(s) for s in sources]
    sigma = np.zeros(n, dtype=np.float64)
    dist = np.empty(n, dtype=np.int64)
    delta = np.zeros(n, dtype=np.float64)
    for s in src_iter:
        order = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma[:] = 0.0
        sigma[s] = 1.0
        dist[:] = -1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for j in range(int(indptr[v]), int(indptr[v + 1])):
                w = int(indices[j])
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta[:] = 0.0
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bc[w] += delta[w]
    if sources is None:
        bc *= 0.5
    return bc


def triangle_counts(indptr, indices):
    """Number of triangles through each node (sorted-adjacency merge)."""
    n = indptr.shape[0] - 1
    acc = np.zeros(n, dtype=np.int64)
    for u in range(n):
        for j in range(int(indptr[u]), int(indptr[u + 1])):
            v = int(indices[j])
            if v <= u:
                continue
            common = np.intersect1d(
                indices[indptr[u]:indptr[u + 1]],
                indices[indptr[v]:indptr[v + 1]],
                assume_unique=True,
            )
            acc[u] += common.size
            acc[v] += common.size
    return acc // 2


def induced_csr(indptr, indices, weights, keep_mask):
    """CSR of the induced subgraph on `keep_mask`, positions re-densified.

    Kept nodes keep their relative order, so the output rows are aligned
    with `np.flatnonzero(keep_mask)`.
    """
    km = keep_mask.view(bool)
    n = km.shape[0]
    new_id = np.cumsum(km, dtype=np.int64) - 1
    deg = indptr[1:] - indptr[:-1]
    rows = np.repeat(np.arange(n, dtype=np.int64), deg)
    emask = km[rows] & km[indices]
    src = new_id[rows[emask]]
    dst = new_id[indices[emask]]
    nk = int(km.sum())
    counts = np.bincount(src, minlength=nk)
    new_indptr = np.zeros(nk + 1, dtype=np.int64)
    np.cumsum(counts, out=new_indptr[1:])
    return new_indptr, dst.astype(np.int32), weights[emask].copy()

# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: local-move sweeps, BFS aggregates, Brandes
betweenness, triangle counts and induced-subgraph extraction.

Semantics (including tie-breaking and float accumulation order) must match
the pure lane in `pure.py`; the lane-equivalence tests compare both
bit-for-bit.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()

BACKEND = "compiled"


cdef inline unsigned long long _sm64(unsigned long long z) noexcept nogil:
    z = z + <unsigned long long>0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * <unsigned long long>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <unsigned long long>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef struct KeyIdx:
    unsigned long long key
    long long idx


cdef struct KeyW:
    unsigned long long key
    double w


cdef int _cmp_keyidx(const void* a, const void* b) noexcept nogil:
    cdef unsigned long long ka = (<const KeyIdx*> a).key
    cdef unsigned long long kb = (<const KeyIdx*> b).key
    if ka < kb:
        return -1
    elif ka > kb:
        return 1
    return 0


cdef int _cmp_keyw(const void* a, const void* b) noexcept nogil:
    cdef unsigned long long ka = (<const KeyW*> a).key
    cdef unsigned long long kb = (<const KeyW*> b).key
    if ka < kb:
        return -1
    elif ka > kb:
        return 1
    return 0


cdef double _local_move_core(const cnp.int64_t[::1] indptr,
                             const cnp.int32_t[::1] indices,
                             const cnp.float64_t[::1] weights,
                             const cnp.float64_t[::1] strengths,
                             double two_m,
                             cnp.int64_t[::1] labels,
                             cnp.float64_t[::1] comm_tot,
                             const cnp.int64_t[::1] order,
                             cnp.float64_t[::1] k_vc,
                             cnp.int64_t[::1] touched,
                             long* moves_out) noexcept nogil:
    """Shared greedy sweep; k_vc must enter zeroed and leaves zeroed."""
    cdef Py_ssize_t n = order.shape[0]
    cdef double inv_two_m = 1.0 / two_m
    cdef double gain = 0.0
    cdef long moves = 0
    cdef Py_ssize_t oi, j, t
    cdef long v, u, a, c, best_c
    cdef long n_touched
    cdef double s_v, cur_score, best_score, score

    for oi in range(n):
        v = order[oi]
        a = labels[v]
        s_v = strengths[v]
        n_touched = 0
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if u == v:
                continue
            c = labels[u]
            if k_vc[c] == 0.0:
                # first touch; positive weights cannot sum back to exactly 0
                touched[n_touched] = c
                n_touched += 1
            k_vc[c] = k_vc[c] + weights[j]
        comm_tot[a] -= s_v
        cur_score = k_vc[a] - s_v * comm_tot[a] * inv_two_m
        best_c = a
        best_score = cur_score
        for t in range(n_touched):
            c = touched[t]
            if c == a:
                continue
            score = k_vc[c] - s_v * comm_tot[c] * inv_two_m
            if score > best_score or (score == best_score and c < best_c):
                best_score = score
                best_c = c
        comm_tot[best_c] += s_v
        if best_c != a:
            labels[v] = best_c
            moves += 1
            gain += (best_score - cur_score) * 2.0 * inv_two_m
        for t in range(n_touched):
            k_vc[touched[t]] = 0.0
    moves_out[0] = moves
    return gain


def local_move(const cnp.int64_t[::1] indptr,
               const cnp.int32_t[::1] indices,
               const cnp.float64_t[::1] weights,
               const cnp.float64_t[::1] self_w,
               const cnp.float64_t[::1] strengths,
               double two_m,
               cnp.int64_t[::1] labels,
               cnp.float64_t[::1] comm_tot,
               const cnp.int64_t[::1] order):
    """One greedy relabeling sweep; mutates labels/comm_tot, returns (gain, moves)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] k_buf = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] touched_buf = np.empty(n, dtype=np.int64)
    cdef cnp.float64_t[::1] k_vc = k_buf
    cdef cnp.int64_t[::1] touched = touched_buf
    cdef long moves = 0
    cdef double gain
    with nogil:
        gain = _local_move_core(indptr, indices, weights, strengths, two_m,
                                labels, comm_tot, order, k_vc, touched, &moves)
    return gain, moves


def louvain(indptr, indices, weights, self_w, seed, max_passes, min_gain):
    """Fused multi-level detection; replicates the pure lane's driver exactly.

    All structural sums here are integer-valued doubles (detection runs on
    unit base weights), so accumulation order cannot change any value; the
    tie-sensitive score arithmetic is shared with `local_move`.
    """
    cdef unsigned long long seed_u = int(seed) & 0xFFFFFFFFFFFFFFFF
    cdef long max_p = int(max_passes)
    cdef double tol = float(min_gain)

    cdef cnp.ndarray cur_indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.ndarray cur_indices = np.ascontiguousarray(indices, dtype=np.int32)
    cdef cnp.ndarray cur_weights = np.ascontiguousarray(weights, dtype=np.float64)
    cdef cnp.ndarray cur_self = np.ascontiguousarray(self_w, dtype=np.float64)

    cdef Py_ssize_t n0 = cur_indptr.shape[0] - 1
    cdef cnp.ndarray mapping_arr = np.arange(n0, dtype=np.int64)
    cdef cnp.int64_t[::1] mapping = mapping_arr

    cdef long pass_no = 0
    cdef Py_ssize_t n, i, j, v
    cdef double two_m, gain
    cdef long moves, nc
    cdef bint improved

    cdef cnp.ndarray strengths_arr, labels_arr, comm_tot_arr, order_arr, dense_arr
    cdef cnp.ndarray k_buf, touched_buf, flag_arr
    cdef cnp.int64_t[::1] labels, order_v, dense, flag, touched
    cdef cnp.float64_t[::1] strengths, comm_tot, k_vc
    cdef const cnp.int64_t[::1] ip
    cdef const cnp.int32_t[::1] ix
    cdef const cnp.float64_t[::1] wt, sw
    cdef KeyIdx* kbuf
    cdef unsigned long long base

    while True:
        n = cur_indptr.shape[0] - 1
        ip = cur_indptr
        ix = cur_indices
        wt = cur_weights
        sw = cur_self
        strengths_arr = np.empty(n, dtype=np.float64)
        strengths = strengths_arr
        two_m = 0.0
        with nogil:
            for v in range(n):
                gain = 0.0
                for j in range(ip[v], ip[v + 1]):
                    gain += wt[j]
                strengths[v] = gain + 2.0 * sw[v]
                two_m += strengths[v]
        if two_m <= 0.0:
            break
        labels_arr = np.arange(n, dtype=np.int64)
        labels = labels_arr
        comm_tot_arr = strengths_arr.copy()
        comm_tot = comm_tot_arr
        k_buf = np.zeros(n, dtype=np.float64)
        k_vc = k_buf
        touched_buf = np.empty(n, dtype=np.int64)
        touched = touched_buf
        order_arr = np.empty(n, dtype=np.int64)
        order_v = order_arr
        improved = False
        kbuf = <KeyIdx*> malloc(n * sizeof(KeyIdx))
        if kbuf == NULL:
            raise MemoryError()
        try:
            while pass_no < max_p:
                base = _sm64(seed_u + <unsigned long long> pass_no)
                with nogil:
                    for i in range(n):
                        kbuf[i].key = _sm64(base + <unsigned long long> i)
                        kbuf[i].idx = i
                    qsort(kbuf, n, sizeof(KeyIdx), _cmp_keyidx)
                    for i in range(n):
                        order_v[i] = kbuf[i].idx
                    gain = _local_move_core(ip, ix, wt, strengths, two_m,
                                            labels, comm_tot, order_v, k_vc, touched, &moves)
                pass_no += 1
                if moves:
                    improved = True
                if gain < tol:
                    break
        finally:
            free(kbuf)
        # densify labels in ascending-old-label order
        flag_arr = np.full(n, -1, dtype=np.int64)
        flag = flag_arr
        dense_arr = np.empty(n, dtype=np.int64)
        dense = dense_arr
        nc = 0
        with nogil:
            for v in range(n):
                flag[labels[v]] = 0
            for v in range(n):
                if flag[v] == 0:
                    flag[v] = nc
                    nc += 1
            for v in range(n):
                dense[v] = flag[labels[v]]
            for i in range(mapping.shape[0]):
                mapping[i] = dense[mapping[i]]
        if nc == <long> n or not improved or pass_no >= max_p:
            break
        cur_indptr, cur_indices, cur_weights, cur_self = _aggregate(
            ip, ix, wt, sw, dense, nc
        )
    # final densify of the base-node mapping
    flag_arr = np.full(n0, -1, dtype=np.int64)
    flag = flag_arr
    cdef cnp.ndarray out_arr = np.empty(n0, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    nc = 0
    with nogil:
        for i in range(n0):
            flag[mapping[i]] = 0
        for i in range(n0):
            if flag[i] == 0:
                flag[i] = nc
                nc += 1
        for i in range(n0):
            out[i] = flag[mapping[i]]
    return out_arr


cdef _aggregate(const cnp.int64_t[::1] indptr,
                const cnp.int32_t[::1] indices,
                const cnp.float64_t[::1] weights,
                const cnp.float64_t[::1] self_w,
                const cnp.int64_t[::1] dense,
                long nc):
    """Coarsen one level; matches the pure lane's aggregate_csr output."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray self_arr = np.zeros(nc, dtype=np.float64)
    cdef cnp.float64_t[::1] new_self = self_arr
    cdef Py_ssize_t v, j
    cdef long lu, lv
    cdef long nnz = 0
    with nogil:
        for v in range(n):
            lu = dense[v]
            new_self[lu] += self_w[v]
            for j in range(indptr[v], indptr[v + 1]):
                lv = dense[indices[j]]
                if lu != lv:
                    nnz += 1
    cdef KeyW* buf = <KeyW*> malloc(max(nnz, 1) * sizeof(KeyW))
    if buf == NULL:
        raise MemoryError()
    cdef long p = 0
    cdef long n_uniq = 0
    cdef unsigned long long prev_key
    cdef cnp.ndarray out_indptr_arr, out_indices_arr, out_weights_arr
    cdef cnp.int64_t[::1] out_indptr
    cdef cnp.int32_t[::1] out_indices
    cdef cnp.float64_t[::1] out_weights
    try:
        with nogil:
            for v in range(n):
                lu = dense[v]
                for j in range(indptr[v], indptr[v + 1]):
                    lv = dense[indices[j]]
                    if lu == lv:
                        # each intra edge appears twice in the CSR
                        new_self[lu] += 0.5 * weights[j]
                    else:
                        buf[p].key = (<unsigned long long> lu) * (<unsigned long long> nc) + <unsigned long long> lv
                        buf[p].w = weights[j]
                        p += 1
            if nnz > 0:
                qsort(buf, nnz, sizeof(KeyW), _cmp_keyw)
                n_uniq = 1
                for j in range(1, nnz):
                    if buf[j].key != buf[j - 1].key:
                        n_uniq += 1
        out_indptr_arr = np.zeros(nc + 1, dtype=np.int64)
        out_indices_arr = np.empty(n_uniq, dtype=np.int32)
        out_weights_arr = np.empty(n_uniq, dtype=np.float64)
        out_indptr = out_indptr_arr
        out_indices = out_indices_arr
        out_weights = out_weights_arr
        with nogil:
            p = -1
            prev_key = 0
            for j in range(nnz):
                if p < 0 or buf[j].key != prev_key:
                    p += 1
                    prev_key = buf[j].key
                    out_indices[p] = <cnp.int32_t> (prev_key % <unsigned long long> nc)
                    out_weights[p] = buf[j].w
                    out_indptr[(prev_key / <unsigned long long> nc) + 1] += 1
                else:
                    out_weights[p] += buf[j].w
            for j in range(nc):
                out_indptr[j + 1] += out_indptr[j]
    finally:
        free(buf)
    return out_indptr_arr, out_indices_arr, out_weights_arr, self_arr


def bfs_distances(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices, long source):
    """Hop distances from `source`; -1 marks unreachable nodes."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dist_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    _bfs_fill(indptr, indices, source, dist, queue)
    return dist_arr


cdef inline long _bfs_fill(const cnp.int64_t[::1] indptr,
                           const cnp.int32_t[::1] indices,
                           long source,
                           cnp.int64_t[::1] dist,
                           cnp.int64_t[::1] queue) nogil:
    """BFS into pre-zeroed dist (-1); returns number of reached nodes."""
    cdef long head = 0, tail = 0
    cdef long v, u
    cdef Py_ssize_t j
    dist[source] = 0
    queue[tail] = source
    tail += 1
    while head < tail:
        v = queue[head]
        head += 1
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue[tail] = u
                tail += 1
    return tail


def bfs_stats(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices):
    """Per-source (sum of distances, reachable count, eccentricity)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sum_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] reach_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ecc_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dist_arr = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.float64_t[::1] sum_dist = sum_arr
    cdef cnp.int64_t[::1] reach = reach_arr
    cdef cnp.int64_t[::1] ecc = ecc_arr
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t s, i
    cdef long cnt
    cdef long total, emax
    with nogil:
        for s in range(n):
            for i in range(n):
                dist[i] = -1
            cnt = _bfs_fill(indptr, indices, s, dist, queue)
            total = 0
            emax = 0
            for i in range(cnt):
                total += dist[queue[i]]
                if dist[queue[i]] > emax:
                    emax = dist[queue[i]]
            sum_dist[s] = <double>total
            reach[s] = cnt
            ecc[s] = emax
    return sum_arr, reach_arr, ecc_arr


def brandes_betweenness(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices, sources=None):
    """Dependency-accumulation betweenness; unordered pairs counted once.

    With explicit `sources` only those contribute and no final halving is
    applied (matches the pure lane's sampled form).
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bc_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] sigma_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] delta_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] dist_arr = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.float64_t[::1] bc = bc_arr
    cdef cnp.float64_t[::1] sigma = sigma_arr
    cdef cnp.float64_t[::1] delta = delta_arr
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] src_arr
    if sources is None:
        src_arr = np.arange(n, dtype=np.int64)
    else:
        src_arr = np.ascontiguousarray(sources, dtype=np.int64)
    cdef const cnp.int64_t[::1] srcs = src_arr
    cdef Py_ssize_t si, i, j
    cdef long s, v, u, w, head, tail
    cdef double coeff
    with nogil:
        for si in range(srcs.shape[0]):
            s = srcs[si]
            for i in range(n):
                dist[i] = -1
                sigma[i] = 0.0
                delta[i] = 0.0
            dist[s] = 0
            sigma[s] = 1.0
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                v = queue[head]
                head += 1
                for j in range(indptr[v], indptr[v + 1]):
                    w = indices[j]
                    if dist[w] < 0:
                        dist[w] = dist[v] + 1
                        queue[tail] = w
                        tail += 1
                    if dist[w] == dist[v] + 1:
                        sigma[w] += sigma[v]
            for i in range(tail - 1, -1, -1):
                w = queue[i]
                coeff = (1.0 + delta[w]) / sigma[w]
                for j in range(indptr[w], indptr[w + 1]):
                    v = indices[j]
                    if dist[v] == dist[w] - 1:
                        delta[v] += sigma[v] * coeff
                if w != s:
                    bc[w] += delta[w]
    if sources is None:
        bc_arr *= 0.5
    return bc_arr


def triangle_counts(const cnp.int64_t[::1] indptr, const cnp.int32_t[::1] indices):
    """Triangles through each node, via sorted-adjacency merge per edge."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] acc_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] acc = acc_arr
    cdef long u, v
    cdef Py_ssize_t j, a, b
    cdef long common
    with nogil:
        for u in range(n):
            for j in range(indptr[u], indptr[u + 1]):
                v = indices[j]
                if v <= u:
                    continue
                common = 0
                a = indptr[u]
                b = indptr[v]
                while a < indptr[u + 1] and b < indptr[v + 1]:
                    if indices[a] < indices[b]:
                        a += 1
                    elif indices[a] > indices[b]:
                        b += 1
                    else:
                        common += 1
                        a += 1
                        b += 1
                acc[u] += common
                acc[v] += common
    acc_arr //= 2
    return acc_arr


def induced_csr(const cnp.int64_t[::1] indptr,
                const cnp.int32_t[::1] indices,
                const cnp.float64_t[::1] weights,
                const cnp.uint8_t[::1] keep_mask):
    """CSR of the induced subgraph on keep_mask, positions re-densified."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] new_id_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] new_id = new_id_arr
    cdef long nk = 0
    cdef Py_ssize_t v, j
    cdef long kept_deg, total
    for v in range(n):
        if keep_mask[v]:
            new_id[v] = nk
            nk += 1
        else:
            new_id[v] = -1
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out_indptr_arr = np.zeros(nk + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] out_indptr = out_indptr_arr
    total = 0
    for v in range(n):
        if not keep_mask[v]:
            continue
        kept_deg = 0
        for j in range(indptr[v], indptr[v + 1]):
            if keep_mask[indices[j]]:
                kept_deg += 1
        total += kept_deg
        out_indptr[new_id[v] + 1] = total
    cdef cnp.ndarray[cnp.int32_t, ndim=1] out_indices_arr = np.empty(total, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_weights_arr = np.empty(total, dtype=np.float64)
    cdef cnp.int32_t[::1] out_indices = out_indices_arr
    cdef cnp.float64_t[::1] out_weights = out_weights_arr
    cdef long pos = 0
    for v in range(n):
        if not keep_mask[v]:
            continue
        for j in range(indptr[v], indptr[v + 1]):
            if keep_mask[indices[j]]:
                out_indices[pos] = <cnp.int32_t>new_id[indices[j]]
                out_weights[pos] = weights[j]
                pos += 1
    return out_indptr_arr, out_indices_arr, out_weights_arr

"""Independent reference implementations used as test oracles.

Everything here is deliberately naive (dicts, explicit loops, dense
matrices) and shares no code with the package's production paths.
"""
from __future__ import annotations

import itertools
import math
from collections import deque

import numpy as np


def adj_sets(g) -> dict[int, set[int]]:
    return {int(u): set(int(x) for x in g.neighbors(int(u))) for u in g.node_ids}


def edge_list(g) -> list[tuple[int, int]]:
    out = []
    for u, nbrs in adj_sets(g).items():
        for v in nbrs:
            if u < v:
                out.append((u, v))
    return sorted(out)


# ---------------------------------------------------------------- partitions

def modularity_double_sum(g, labels_by_id: dict[int, int]) -> float:
    """Pairwise form: (1/2m) sum_vw [A_vw - k_v k_w / 2m] delta(c_v, c_w)."""
    adj = adj_sets(g)
    nodes = sorted(adj)
    deg = {v: len(adj[v]) for v in nodes}
    m = sum(deg.values()) / 2
    total = 0.0
    for v in nodes:
        for w in nodes:
            if labels_by_id[v] != labels_by_id[w]:
                continue
            a_vw = 1.0 if w in adj[v] else 0.0
            total += a_vw - deg[v] * deg[w] / (2 * m)
    return total / (2 * m)


def contingency(x: dict[int, int], y: dict[int, int]) -> dict[tuple[int, int], int]:
    table: dict[tuple[int, int], int] = {}
    for node in x:
        key = (x[node], y[node])
        table[key] = table.get(key, 0) + 1
    return table


def nmi_reference(x: dict[int, int], y: dict[int, int]) -> float:
    n = len(x)
    table = contingency(x, y)
    a: dict[int, int] = {}
    b: dict[int, int] = {}
    for (i, j), c in table.items():
        a[i] = a.get(i, 0) + c
        b[j] = b.get(j, 0) + c
    hx = -sum((v / n) * math.log(v / n) for v in a.values())
    hy = -sum((v / n) * math.log(v / n) for v in b.values())
    if len(table) == len(a) == len(b):
        return 1.0
    if hx == 0.0 and hy == 0.0:
        return 1.0
    if hx == 0.0 or hy == 0.0:
        return 0.0
    mi = sum(
        (c / n) * math.log(c * n / (a[i] * b[j])) for (i, j), c in table.items()
    )
    return 2.0 * mi / (hx + hy)


def ari_reference(x: dict[int, int], y: dict[int, int]) -> float:
    n = len(x)
    table = contingency(x, y)
    a: dict[int, int] = {}
    b: dict[int, int] = {}
    for (i, j), c in table.items():
        a[i] = a.get(i, 0) + c
        b[j] = b.get(j, 0) + c
    index = sum(math.comb(c, 2) for c in table.values())
    sum_a = sum(math.comb(c, 2) for c in a.values())
    sum_b = sum(math.comb(c, 2) for c in b.values())
    pairs = math.comb(n, 2)
    from fractions import Fraction

    num = 2 * pairs * index - 2 * sum_a * sum_b
    den = pairs * (sum_a + sum_b) - 2 * sum_a * sum_b
    if den == 0:
        return 1.0
    return float(Fraction(num, den))


def all_set_partitions(items: list[int]):
    """Every partition of `items` (restricted growth strings)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in all_set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [sub[i] | {first}] + sub[i + 1:]
        yield sub + [{first}]


def best_modularity_partition(g) -> tuple[float, list[set[int]]]:
    """Exhaustive max-modularity partition (tiny graphs only)."""
    nodes = [int(v) for v in g.node_ids]
    best_q = -math.inf
    best = None
    for parts in all_set_partitions(nodes):
        labels = {}
        for c, block in enumerate(parts):
            for v in block:
                labels[v] = c
        q = modularity_double_sum(g, labels)
        if q > best_q:
            best_q = q
            best = parts
    return best_q, [set(b) for b in best]


# ------------------------------------------------------------------- graphs

def bfs_dict(adj: dict[int, set[int]], source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in sorted(adj[v]):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def components_union_find(g) -> list[set[int]]:
    nodes = [int(v) for v in g.node_ids]
    parent = {v: v for v in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edge_list(g):
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups: dict[int, set[int]] = {}
    for v in nodes:
        groups.setdefault(find(v), set()).add(v)
    return sorted(groups.values(), key=min)


def distances_by_matrix_power(g, source: int) -> dict[int, int]:
    """d(s, v) = first power t with (A^t)[s, v] > 0, via boolean squaring-free powers."""
    nodes = [int(v) for v in g.node_ids]
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    a = np.zeros((n, n), dtype=bool)
    for u, v in edge_list(g):
        a[idx[u], idx[v]] = a[idx[v], idx[u]] = True
    reach = np.zeros(n, dtype=bool)
    reach[idx[source]] = True
    dist = {source: 0}
    power = reach.copy()
    for t in range(1, n):
        power = power @ a
        newly = power & ~reach
        if not newly.any():
            break
        for i in np.flatnonzero(newly):
            dist[nodes[i]] = t
        reach |= newly
    return dist


def wiener_reference(g) -> float:
    adj = adj_sets(g)
    total = 0
    for s in adj:
        for v, d in bfs_dict(adj, s).items():
            total += d
    return total / 2


# ------------------------------------------------------------- node metrics

def clustering_reference(g) -> dict[int, float]:
    adj = adj_sets(g)
    out = {}
    for v, nbrs in adj.items():
        d = len(nbrs)
        if d < 2:
            out[v] = 0.0
            continue
        links = sum(1 for a, b in itertools.combinations(sorted(nbrs), 2) if b in adj[a])
        out[v] = 2.0 * links / (d * (d - 1))
    return out


def degree_reference(g) -> dict[int, float]:
    return {v: float(len(nbrs)) for v, nbrs in adj_sets(g).items()}


def betweenness_reference(g) -> dict[int, float]:
    """sigma-ratio definition summed over unordered pairs, via all-pairs BFS counts."""
    adj = adj_sets(g)
    nodes = sorted(adj)
    dist: dict[int, dict[int, int]] = {}
    sigma: dict[int, dict[int, float]] = {}
    for s in nodes:
        d = {s: 0}
        sg = {s: 1.0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in sorted(adj[v]):
                if u not in d:
                    d[u] = d[v] + 1
                    sg[u] = 0.0
                    queue.append(u)
                if d[u] == d[v] + 1:
                    sg[u] += sg[v]
        dist[s] = d
        sigma[s] = sg
    out = {v: 0.0 for v in nodes}
    for s, t in itertools.combinations(nodes, 2):
        if t not in dist[s]:
            continue
        dst = dist[s][t]
        for v in nodes:
            if v in (s, t) or v not in dist[s] or v not in dist[t]:
                continue
            if dist[s][v] + dist[t][v] == dst:
                out[v] += sigma[s][v] * sigma[t][v] / sigma[s][t]
    return out


def closeness_reference(g) -> dict[int, float]:
    adj = adj_sets(g)
    out = {}
    for v in adj:
        d = bfs_dict(adj, v)
        if len(d) <= 1:
            out[v] = 0.0
        else:
            out[v] = (len(d) - 1) / sum(d.values())
    return out


def eccentricity_reference(g) -> dict[int, float]:
    adj = adj_sets(g)
    return {v: float(max(bfs_dict(adj, v).values())) for v in adj}


def coreness_reference(g) -> dict[int, float]:
    adj = {v: set(nbrs) for v, nbrs in adj_sets(g).items()}
    out = {}
    k = 0
    remaining = dict(adj)
    while remaining:
        while True:
            low = [v for v, nbrs in remaining.items() if len(nbrs) <= k]
            if not low:
                break
            for v in low:
                out[v] = float(k)
                for u in remaining[v]:
                    remaining[u].discard(v)
                del remaining[v]
        k += 1
    return out


def eigenvector_reference(g) -> dict[int, float]:
    """Dense principal eigenvector per connected component (numpy.linalg.eigh)."""
    out = {int(v): 0.0 for v in g.node_ids}
    for comp in components_union_find(g):
        members = sorted(comp)
        if len(members) < 2:
            continue
        idx = {v: i for i, v in enumerate(members)}
        a = np.zeros((len(members), len(members)))
        adj = adj_sets(g)
        for v in members:
            for u in adj[v]:
                a[idx[v], idx[u]] = 1.0
        vals, vecs = np.linalg.eigh(a)
        vec = vecs[:, -1]
        if vec.sum() < 0:
            vec = -vec
        vec = np.abs(vec)
        vec = vec / np.linalg.norm(vec)
        for v in members:
            out[v] = float(vec[idx[v]])
    return out


def diversity_reference(g) -> dict[int, float]:
    out = {}
    for p, v in enumerate(g.node_ids):
        v = int(v)
        lo, hi = int(g.indptr[p]), int(g.indptr[p + 1])
        w = [float(x) for x in g.weights[lo:hi]]
        if len(w) < 2:
            out[v] = 0.0
            continue
        total = sum(w)
        h = -sum((x / total) * math.log(x / total) for x in w)
        out[v] = h / math.log(len(w))
    return out


def constraint_reference(g) -> dict[int, float]:
    adj = adj_sets(g)
    w = {}
    for p, u in enumerate(g.node_ids):
        u = int(u)
        lo, hi = int(g.indptr[p]), int(g.indptr[p + 1])
        for off in range(lo, hi):
            v = int(g.node_ids[int(g.indices[off])])
            w[(u, v)] = float(g.weights[off])

    def p_(u, v):
        total = sum(w[(u, z)] for z in adj[u])
        return w.get((u, v), 0.0) / total if total else 0.0

    out = {}
    for u in adj:
        if not adj[u]:
            out[u] = 0.0
            continue
        c = 0.0
        for j in adj[u]:
            indirect = sum(p_(u, q) * p_(q, j) for q in adj[u] if q not in (u, j))
            c += (p_(u, j) + indirect) ** 2
        out[u] = c
    return out


def vitality_reference(g) -> dict[int, float]:
    adj = adj_sets(g)
    base = wiener_reference(g)
    out = {}
    for v in adj:
        sub = {u: nbrs - {v} for u, nbrs in adj.items() if u != v}
        total = 0
        for s in sub:
            d = bfs_dict(sub, s)
            total += sum(d.values())
        out[v] = base - total / 2
    return out


NODE_METRIC_REFERENCES = {
    "clustering_coefficient": clustering_reference,
    "degree": degree_reference,
    "betweenness": betweenness_reference,
    "eigenvector": eigenvector_reference,
    "closeness": closeness_reference,
    "coreness": coreness_reference,
    "diversity": diversity_reference,
    "eccentricity": eccentricity_reference,
    "constraint": constraint_reference,
    "closeness_vitality": vitality_reference,
}


# ------------------------------------------------------------ random graphs

def random_graph(n: int, p: float, seed: int):
    """Seeded Erdos-Renyi edge set over 0..n-1."""
    rng = np.random.default_rng(seed)
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p
    ]
    return edges


def random_labels(n: int, c: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, c, size=n).astype(np.int64)

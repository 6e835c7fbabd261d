"""Node-centric and community-centric structural properties used for ranking.

Ten node metrics feed the greedy attack strategies; three community metrics
drive the hierarchical strategy's community choice. Scores are NaN-free:
degenerate cases (isolated nodes, degree <= 1) map to 0 by convention. Edge
weights only influence `diversity` and `constraint`; everything else treats
the graph as unweighted.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import IO

import numpy as np

from . import _kernels as K
from .graph import Graph, connected_components


class NodeMetricId(str, Enum):
    CLUSTERING_COEFFICIENT = "clustering_coefficient"
    DEGREE = "degree"
    BETWEENNESS = "betweenness"
    EIGENVECTOR = "eigenvector"
    CLOSENESS = "closeness"
    CORENESS = "coreness"
    DIVERSITY = "diversity"
    ECCENTRICITY = "eccentricity"
    CONSTRAINT = "constraint"
    CLOSENESS_VITALITY = "closeness_vitality"


class CommunityMetricId(str, Enum):
    LINK_DENSITY = "link_density"
    CONDUCTANCE = "conductance"
    COMPACTNESS = "compactness"


BETWEENNESS_AUTO_SAMPLE_NODES = 100_000
BETWEENNESS_AUTO_SAMPLE_SOURCES = 256


@dataclass(frozen=True)
class MetricVector:
    """Per-node scores for one metric, plus its vulnerability direction.

    `estimated` marks sampled (rather than exact) scores, currently only
    produced by the large-graph betweenness fallback.
    """

    metric: NodeMetricId
    nodes: np.ndarray
    scores: np.ndarray
    higher_is_more_vulnerable: bool = True
    estimated: bool = False

    def as_dict(self) -> dict[int, float]:
        return {int(n): float(s) for n, s in zip(self.nodes, self.scores)}

    def write_csv(self, stream: IO[str]) -> None:
        stream.write("node_id,score\n")
        for n, s in zip(self.nodes, self.scores):
            stream.write(f"{int(n)},{float(s)!r}\n")


def _clustering(g: Graph) -> np.ndarray:
    tri = K.triangle_counts(g.indptr, g.indices).astype(np.float64)
    deg = g.degrees.astype(np.float64)
    out = np.zeros(g.n, dtype=np.float64)
    big = deg >= 2
    out[big] = 2.0 * tri[big] / (deg[big] * (deg[big] - 1.0))
    return out


def _closeness(g: Graph) -> np.ndarray:
    sum_dist, reach, _ = K.bfs_stats(g.indptr, g.indices)
    out = np.zeros(g.n, dtype=np.float64)
    ok = reach > 1
    out[ok] = (reach[ok] - 1.0) / sum_dist[ok]
    return out


def _eccentricity(g: Graph) -> np.ndarray:
    _, _, ecc = K.bfs_stats(g.indptr, g.indices)
    return ecc.astype(np.float64)


def _eigenvector(g: Graph, max_iter: int = 1000, tol: float = 1e-10) -> np.ndarray:
    """Principal adjacency eigenvector, computed per connected component.

    Power iteration runs on A+I so bipartite components converge; each
    component's sub-vector is L2-normalized. Isolated nodes score 0.
    """
    out = np.zeros(g.n, dtype=np.float64)
    for comp in connected_components(g):
        if comp.shape[0] < 2:
            continue
        pos = g.position_of(comp)
        local = np.full(g.n, -1, dtype=np.int64)
        local[pos] = np.arange(pos.shape[0])
        rows = []
        cols = []
        for i, p in enumerate(pos):
            nbrs = g.indices[g.indptr[p]:g.indptr[p + 1]]
            rows.append(np.full(nbrs.shape[0], i, dtype=np.int64))
            cols.append(local[nbrs])
        row = np.concatenate(rows)
        col = np.concatenate(cols)
        nc = pos.shape[0]
        x = np.full(nc, 1.0 / math.sqrt(nc), dtype=np.float64)
        for _ in range(max_iter):
            y = np.bincount(row, weights=x[col], minlength=nc) + x
            y /= np.linalg.norm(y)
            if float(np.max(np.abs(y - x))) < tol:
                x = y
                break
            x = y
        out[pos] = x
    return out


def _coreness(g: Graph) -> np.ndarray:
    """Iterative degree peeling (bucket queue)."""
    n = g.n
    deg = g.degrees.astype(np.int64).copy()
    core = np.zeros(n, dtype=np.int64)
    order = np.argsort(deg, kind="stable")
    max_deg = int(deg.max()) if n else 0
    bin_start = np.zeros(max_deg + 2, dtype=np.int64)
    np.cumsum(np.bincount(deg, minlength=max_deg + 1), out=bin_start[1:])
    pos_in_order = np.empty(n, dtype=np.int64)
    pos_in_order[order] = np.arange(n)
    bin_ptr = bin_start[:-1].copy()
    cur = deg.copy()
    removed = np.zeros(n, dtype=bool)
    for i in range(n):
        v = int(order[i])
        core[v] = cur[v]
        removed[v] = True
        for j in range(int(g.indptr[v]), int(g.indptr[v + 1])):
            u = int(g.indices[j])
            if removed[u] or cur[u] <= cur[v]:
                continue
            # swap u to the front of its degree bucket, then shrink its degree
            du = int(cur[u])
            pu = int(pos_in_order[u])
            pw = int(bin_ptr[du])
            w = int(order[pw])
            if u != w:
                order[pu], order[pw] = w, u
                pos_in_order[u], pos_in_order[w] = pw, pu
            bin_ptr[du] += 1
            cur[u] -= 1
    return core.astype(np.float64)


def _diversity(g: Graph) -> np.ndarray:
    """Normalized Shannon entropy of incident edge weights; 0 for degree <= 1."""
    deg = g.degrees
    out = np.zeros(g.n, dtype=np.float64)
    for v in range(g.n):
        if deg[v] < 2:
            continue
        w = g.weights[g.indptr[v]:g.indptr[v + 1]]
        total = float(w.sum())
        h = math.log(total) - float(np.sum(w * np.log(w))) / total
        out[v] = h / math.log(deg[v])
    return out


def _constraint(g: Graph) -> np.ndarray:
    """Burt's constraint from normalized tie weights; 0 for isolated nodes."""
    n = g.n
    out = np.zeros(n, dtype=np.float64)
    row_sum = np.zeros(n, dtype=np.float64)
    for v in range(n):
        row_sum[v] = float(g.weights[g.indptr[v]:g.indptr[v + 1]].sum())
    p_direct = np.zeros(n, dtype=np.float64)
    p_indirect = np.zeros(n, dtype=np.float64)
    for u in range(n):
        lo, hi = int(g.indptr[u]), int(g.indptr[u + 1])
        if lo == hi:
            continue
        nbrs = [int(x) for x in g.indices[lo:hi]]
        for idx, j in enumerate(nbrs):
            p_direct[j] = float(g.weights[lo + idx]) / row_sum[u]
        touched = list(nbrs)
        for q in nbrs:
            p_uq = p_direct[q]
            for jj in range(int(g.indptr[q]), int(g.indptr[q + 1])):
                j = int(g.indices[jj])
                if j == u:
                    continue
                if p_direct[j] == 0.0 and p_indirect[j] == 0.0:
                    touched.append(j)
                p_indirect[j] += p_uq * float(g.weights[jj]) / row_sum[q]
        out[u] = sum((p_direct[j] + p_indirect[j]) ** 2 for j in nbrs)
        for j in touched:
            p_direct[j] = 0.0
            p_indirect[j] = 0.0
    return out


def _wiener(indptr: np.ndarray, indices: np.ndarray) -> float:
    sum_dist, _, _ = K.bfs_stats(indptr, indices)
    return float(sum_dist.sum()) / 2.0


def wiener_index(g: Graph) -> float:
    """Sum of pairwise hop distances, per component."""
    return _wiener(g.indptr, g.indices)


def _closeness_vitality(g: Graph) -> np.ndarray:
    base = _wiener(g.indptr, g.indices)
    out = np.zeros(g.n, dtype=np.float64)
    for v in range(g.n):
        keep = np.ones(g.n, dtype=np.uint8)
        keep[v] = 0
        indptr, indices, _ = K.induced_csr(g.indptr, g.indices, g.weights, keep)
        out[v] = base - _wiener(indptr, indices)
    return out


def betweenness_scores(g: Graph, sample_sources: int | None = None, seed: int = 0) -> np.ndarray:
    """Exact Brandes betweenness, or a seeded sampled estimate.

    Sampling picks `sample_sources` distinct sources and rescales by
    n/sample, matching the exact value in expectation.
    """
    if sample_sources is None or sample_sources >= g.n:
        return K.brandes_betweenness(g.indptr, g.indices, None)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(17,)))
    sources = np.sort(rng.choice(g.n, size=int(sample_sources), replace=False)).astype(np.int64)
    bc = K.brandes_betweenness(g.indptr, g.indices, sources)
    return bc * (g.n / float(sample_sources)) * 0.5


_DISPATCH = {
    NodeMetricId.CLUSTERING_COEFFICIENT: _clustering,
    NodeMetricId.DEGREE: lambda g: g.degrees.astype(np.float64),
    NodeMetricId.EIGENVECTOR: _eigenvector,
    NodeMetricId.CLOSENESS: _closeness,
    NodeMetricId.CORENESS: _coreness,
    NodeMetricId.DIVERSITY: _diversity,
    NodeMetricId.ECCENTRICITY: _eccentricity,
    NodeMetricId.CONSTRAINT: _constraint,
    NodeMetricId.CLOSENESS_VITALITY: _closeness_vitality,
}


def node_metric(
    g: Graph,
    metric: NodeMetricId,
    invert: bool = False,
    betweenness_sample: int | None = None,
    seed: int = 0,
) -> MetricVector:
    """Score every node of `g` under one structural metric.

    All ten metrics rank descending by default (higher score = removed
    first); `invert` flips the direction for callers that want the
    opposite reading of a metric.
    """
    metric = NodeMetricId(metric)
    if g.n == 0:
        raise ValueError("empty graph")
    estimated = False
    if metric is NodeMetricId.BETWEENNESS:
        if betweenness_sample is None and g.n > BETWEENNESS_AUTO_SAMPLE_NODES:
            betweenness_sample = BETWEENNESS_AUTO_SAMPLE_SOURCES
            warnings.warn(
                f"betweenness on n={g.n} switches to a seeded {betweenness_sample}-source "
                "estimate; pass betweenness_sample explicitly to control this",
                RuntimeWarning,
                stacklevel=2,
            )
        scores = betweenness_scores(g, betweenness_sample, seed)
        estimated = betweenness_sample is not None and betweenness_sample < g.n
    else:
        scores = _DISPATCH[metric](g)
    if np.any(~np.isfinite(scores)):
        raise AssertionError(f"metric {metric.value} produced non-finite scores")
    return MetricVector(metric, g.node_ids, scores,
                        higher_is_more_vulnerable=not invert, estimated=estimated)


def rank_nodes(mv: MetricVector, k: int) -> list[int]:
    """Top-k node ids by vulnerability direction, ties broken by ascending id."""
    if k > mv.nodes.shape[0]:
        raise ValueError("k exceeds the number of nodes")
    key = -mv.scores if mv.higher_is_more_vulnerable else mv.scores
    order = np.lexsort((mv.nodes, key))
    return [int(x) for x in mv.nodes[order[:k]]]


def community_metric(g_sub: Graph, host: Graph, metric: CommunityMetricId) -> float:
    """Score one community's induced subgraph against its host graph.

    link_density: 2E/(V(V-1)), 0 for a single node. conductance: host edges
    leaving the subgraph over the host-degree sum of its nodes, 0 when that
    sum is 0. compactness: mean hop distance over reachable ordered pairs
    inside the subgraph, 0 when no pairs are reachable.
    """
    metric = CommunityMetricId(metric)
    sub_pos_in_host = host.position_of(g_sub.node_ids)
    for i, p in enumerate(sub_pos_in_host):
        row = g_sub.indices[g_sub.indptr[i]:g_sub.indptr[i + 1]]
        if row.shape[0] == 0:
            continue
        host_row = host.indices[host.indptr[p]:host.indptr[p + 1]]
        nbr_host_pos = np.searchsorted(host.node_ids, g_sub.node_ids[row])
        found = np.searchsorted(host_row, nbr_host_pos)
        if host_row.shape[0] == 0 or np.any(found >= host_row.shape[0]) or np.any(
            host_row[np.minimum(found, host_row.shape[0] - 1)] != nbr_host_pos
        ):
            raise ValueError("g_sub is not a subgraph of host")
    v = g_sub.n
    e = g_sub.m
    if metric is CommunityMetricId.LINK_DENSITY:
        return 0.0 if v <= 1 else 2.0 * e / (v * (v - 1.0))
    if metric is CommunityMetricId.CONDUCTANCE:
        deg_sum = int(host.degrees[sub_pos_in_host].sum())
        if deg_sum == 0:
            return 0.0
        boundary = deg_sum - 2 * e
        return boundary / deg_sum
    sum_dist, reach, _ = K.bfs_stats(g_sub.indptr, g_sub.indices)
    pairs = int((reach - 1).sum())
    return 0.0 if pairs == 0 else float(sum_dist.sum()) / pairs

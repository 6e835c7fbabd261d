"""Value functions comparing community structures before and after perturbation.

Three measures are supported: the modularity difference, normalized mutual
information, and the adjusted Rand index. Each is wrapped into a unified
"damage" score that every attack strategy maximizes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .graph import Graph
from .louvain import Partition, partition_from_labels


class ValueFunctionId(str, Enum):
    MODULARITY_DIFF = "modularity"
    NMI = "nmi"
    ARI = "ari"


@dataclass(frozen=True)
class DamageScore:
    """Raw metric value plus its orientation-normalized damage form.

    modularity difference: damage == raw; NMI/ARI: damage == 1 - raw, so
    maximizing damage always means maximizing structural disruption.
    """

    raw: float
    damage: float


def damage_from_raw(vf: ValueFunctionId, raw: float) -> DamageScore:
    if vf is ValueFunctionId.MODULARITY_DIFF:
        return DamageScore(raw, raw)
    return DamageScore(raw, 1.0 - raw)


@dataclass(frozen=True)
class ContingencyTable:
    """Sparse community-overlap counts between two partitions of one universe."""

    row_ids: np.ndarray
    col_ids: np.ndarray
    counts: np.ndarray
    row_sums: np.ndarray
    col_sums: np.ndarray
    n: int

    @classmethod
    def from_labels(cls, x_labels: np.ndarray, y_labels: np.ndarray) -> "ContingencyTable":
        if x_labels.shape != y_labels.shape:
            raise ValueError("label arrays must align")
        n = int(x_labels.shape[0])
        cy = int(y_labels.max()) + 1 if n else 0
        key = x_labels.astype(np.int64) * cy + y_labels.astype(np.int64)
        uniq, counts = np.unique(key, return_counts=True)
        row_ids = uniq // cy if cy else uniq
        col_ids = uniq % cy if cy else uniq
        cx = int(x_labels.max()) + 1 if n else 0
        row_sums = np.bincount(x_labels, minlength=cx)
        col_sums = np.bincount(y_labels, minlength=cy)
        return cls(row_ids, col_ids, counts, row_sums, col_sums, n)


def _check_universe(x: Partition, y: Partition) -> None:
    if not np.array_equal(x.nodes, y.nodes):
        raise ValueError("partitions are over different node universes")


def modularity(g: Graph, p: Partition) -> float:
    """Partition quality: intra-edge fraction minus the degree-preserving baseline.

    Computed in the per-community aggregate form sum_c [e_c/m - (d_c/2m)^2],
    which equals the pairwise double sum. Unweighted; requires m >= 1.
    """
    if g.m == 0:
        raise ValueError("modularity undefined for a graph with no edges")
    if not np.array_equal(p.nodes, g.node_ids):
        raise ValueError("partition must cover exactly the graph's nodes")
    return _modularity_from_labels(g, p.labels)


def modularity_csr(indptr: np.ndarray, indices: np.ndarray, labels: np.ndarray) -> float:
    """Aggregate-form modularity straight off CSR arrays (unweighted, m >= 1)."""
    n = indptr.shape[0] - 1
    deg = indptr[1:] - indptr[:-1]
    c = int(labels.max()) + 1
    rows = np.repeat(np.arange(n, dtype=np.int64), deg)
    same = labels[rows] == labels[indices]
    e_c = np.bincount(labels[rows][same], minlength=c) / 2.0
    d_c = np.bincount(labels, weights=deg.astype(np.float64), minlength=c)
    m = indices.shape[0] / 2.0
    return float(np.sum(e_c / m - (d_c / (2.0 * m)) ** 2))


def _modularity_from_labels(g: Graph, labels: np.ndarray) -> float:
    return modularity_csr(g.indptr, g.indices, labels)


def _entropy(sums: np.ndarray, n: int) -> float:
    p = sums[sums > 0] / n
    return -math.fsum(p * np.log(p))


def _nmi_from_labels(x_labels: np.ndarray, y_labels: np.ndarray) -> float:
    ct = ContingencyTable.from_labels(x_labels, y_labels)
    if ct.counts.shape[0] == ct.row_sums.shape[0] == ct.col_sums.shape[0]:
        # one cell per row and per column: identical up to relabeling
        return 1.0
    hx = _entropy(ct.row_sums, ct.n)
    hy = _entropy(ct.col_sums, ct.n)
    if hx == 0.0 and hy == 0.0:
        return 1.0
    if hx == 0.0 or hy == 0.0:
        return 0.0
    nij = ct.counts.astype(np.float64)
    ai = ct.row_sums[ct.row_ids].astype(np.float64)
    bj = ct.col_sums[ct.col_ids].astype(np.float64)
    # fsum makes the result independent of cell order, so nmi(x, y) == nmi(y, x)
    mi = math.fsum((nij / ct.n) * np.log(nij * ct.n / (ai * bj)))
    return min(1.0, max(0.0, 2.0 * mi / (hx + hy)))


def _ari_from_labels(x_labels: np.ndarray, y_labels: np.ndarray) -> float:
    ct = ContingencyTable.from_labels(x_labels, y_labels)
    # exact integer arithmetic; the pair-count products overflow int64 at
    # million-node scale, so everything goes through Python ints
    index = sum(math.comb(int(v), 2) for v in ct.counts)
    sum_a = sum(math.comb(int(v), 2) for v in ct.row_sums)
    sum_b = sum(math.comb(int(v), 2) for v in ct.col_sums)
    pairs = math.comb(ct.n, 2)
    num = 2 * pairs * index - 2 * sum_a * sum_b
    den = pairs * (sum_a + sum_b) - 2 * sum_a * sum_b
    if den == 0:
        return 1.0
    return float(Fraction(num, den))


def nmi(x: Partition, y: Partition) -> float:
    """Normalized mutual information 2I/(H(X)+H(Y)) in [0, 1].

    1 for identical partitions; when exactly one side has zero entropy the
    value is 0, and when both do (two single-community partitions) it is 1.
    """
    _check_universe(x, y)
    return _nmi_from_labels(x.labels, y.labels)


def ari(x: Partition, y: Partition) -> float:
    """Adjusted Rand index in [-1, 1], exact integer arithmetic.

    1 for identical partitions; degenerate cases where the expected and
    maximum indices coincide are defined as 1.
    """
    _check_universe(x, y)
    return _ari_from_labels(x.labels, y.labels)


def restrict(p: Partition, keep) -> Partition:
    """Partition filtered to `keep` with community ids re-densified."""
    keep_arr = np.unique(np.asarray(list(keep), dtype=np.int64))
    if keep_arr.shape[0] == 0:
        raise ValueError("keep set must be non-empty")
    pos = np.searchsorted(p.nodes, keep_arr)
    if np.any(pos >= p.n) or np.any(p.nodes[np.minimum(pos, p.n - 1)] != keep_arr):
        raise ValueError("keep set is not a subset of the partition universe")
    return partition_from_labels(keep_arr, p.labels[pos])


def evaluate(vf: ValueFunctionId, g: Graph, x: Partition, g_pert: Graph, y: Partition) -> DamageScore:
    """Score the structural damage of a perturbation.

    modularity difference: Q(g, x) - Q(g_pert, y); NMI/ARI compare x
    restricted to the surviving nodes against y. A perturbed graph with no
    edges left contributes modularity 0 (the natural empty-sum limit).
    """
    vf = ValueFunctionId(vf)
    if not np.array_equal(x.nodes, g.node_ids):
        raise ValueError("x must be a partition of g")
    if not np.array_equal(y.nodes, g_pert.node_ids):
        raise ValueError("y must be a partition of g_pert")
    if not np.all(np.isin(g_pert.node_ids, g.node_ids)):
        raise ValueError("g_pert must be a node-removal of g")
    if vf is ValueFunctionId.MODULARITY_DIFF:
        q_pert = _modularity_from_labels(g_pert, y.labels) if g_pert.m > 0 else 0.0
        raw = modularity(g, x) - q_pert
    else:
        x_res = restrict(x, g_pert.node_ids)
        metric = _nmi_from_labels if vf is ValueFunctionId.NMI else _ari_from_labels
        raw = metric(x_res.labels, y.labels)
    return damage_from_raw(vf, raw)

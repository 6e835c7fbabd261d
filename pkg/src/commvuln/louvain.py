"""Louvain community detection: greedy local moves plus graph coarsening.

All randomness reduces to the node scan order of each local-move pass, which
is the stable argsort of per-node splitmix64 hash keys. That keeps detection
bit-reproducible for a fixed seed across the compiled and pure kernel lanes.
Edge weights of the input graph are ignored (every structural computation
here is unweighted); weighted CSRs only appear internally on coarse levels.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from . import _kernels as K
from ._kernels.pure import aggregate_csr as _aggregate_csr
from ._kernels.pure import level_strengths as _level_strengths
from ._kernels.pure import splitmix64
from .graph import Graph


def derive_seed(master: int, step: int) -> int:
    """Per-step detector seed; step 0 is the master seed itself."""
    if step == 0:
        return int(master)
    key = splitmix64(np.uint64(master & 0xFFFFFFFFFFFFFFFF) ^ splitmix64(np.uint64(step)))
    return int(key)


@dataclass(frozen=True)
class DetectorConfig:
    """Settings for the modularity-optimizing detector."""

    rng_seed: int = 0
    max_passes: int = 100
    min_modularity_gain: float = 1e-7

    def __post_init__(self):
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")
        if self.min_modularity_gain < 0:
            raise ValueError("min_modularity_gain must be >= 0")


@dataclass(frozen=True, eq=False)
class Partition:
    """Disjoint community assignment over a sorted node universe.

    `labels[i]` is the dense community id (0..c-1) of `nodes[i]`. The cached
    per-community aggregates are filled when the partition was built against
    a graph and are None otherwise (e.g. after `restrict`).
    """

    nodes: np.ndarray
    labels: np.ndarray
    num_communities: int
    community_sizes: np.ndarray
    internal_edge_counts: np.ndarray | None = None
    total_degrees: np.ndarray | None = None

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.labels.setflags(write=False)
        self.community_sizes.setflags(write=False)

    @property
    def n(self) -> int:
        return self.nodes.shape[0]

    def label_of(self, node_id: int) -> int:
        pos = int(np.searchsorted(self.nodes, node_id))
        if pos >= self.n or int(self.nodes[pos]) != int(node_id):
            raise ValueError(f"node {node_id} not in partition universe")
        return int(self.labels[pos])

    def members(self, community: int) -> np.ndarray:
        return self.nodes[self.labels == community]

    def communities(self) -> list[np.ndarray]:
        return [self.members(c) for c in range(self.num_communities)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.nodes, other.nodes) and np.array_equal(self.labels, other.labels)

    def __repr__(self) -> str:
        return f"Partition(n={self.n}, communities={self.num_communities})"


def partition_from_labels(nodes: np.ndarray, labels: np.ndarray, g: Graph | None = None) -> Partition:
    """Normalize labels to dense 0..c-1 and cache aggregates when `g` is given."""
    nodes = np.asarray(nodes, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if nodes.shape != labels.shape:
        raise ValueError("nodes and labels must align")
    _, dense = np.unique(labels, return_inverse=True)
    dense = dense.astype(np.int64)
    c = int(dense.max()) + 1 if dense.size else 0
    sizes = np.bincount(dense, minlength=c)
    internal = None
    degs = None
    if g is not None:
        if not np.array_equal(nodes, g.node_ids):
            raise ValueError("partition universe must equal graph nodes")
        rows = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
        lu = dense[rows]
        lv = dense[g.indices]
        same = lu == lv
        internal = np.bincount(lu[same], minlength=c) // 2
        degs = np.bincount(dense, weights=g.degrees.astype(np.float64), minlength=c).astype(np.int64)
    return Partition(nodes, dense, c, sizes, internal, degs)


def singleton_partition(g: Graph) -> Partition:
    return partition_from_labels(g.node_ids, np.arange(g.n, dtype=np.int64), g)


@dataclass(frozen=True)
class CoarseGraph:
    """One-node-per-community coarsening with self-weights (intra mass)."""

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    self_weights: np.ndarray

    @property
    def n(self) -> int:
        return self.self_weights.shape[0]


def _louvain_labels(indptr, indices, weights, self_w, cfg: DetectorConfig) -> np.ndarray:
    """Full multi-level detection on a CSR; returns dense labels for the base nodes."""
    return K.louvain(
        indptr, indices, weights, self_w,
        int(cfg.rng_seed), int(cfg.max_passes), float(cfg.min_modularity_gain),
    )


def detect_communities(g: Graph, cfg: DetectorConfig | None = None) -> Partition:
    """Louvain partition of `g`, deterministic for a fixed cfg.rng_seed.

    Isolated nodes end up as singleton communities; the result's modularity
    is never below the all-singletons baseline.
    """
    cfg = cfg or DetectorConfig()
    if g.n == 0:
        raise ValueError("empty graph")
    weights = np.ones(g.indices.shape[0], dtype=np.float64)
    self_w = np.zeros(g.n, dtype=np.float64)
    labels = _louvain_labels(g.indptr, g.indices, weights, self_w, cfg)
    return partition_from_labels(g.node_ids, labels, g)


def local_move_pass(
    g: Graph, labels: np.ndarray, cfg: DetectorConfig | None = None, order: np.ndarray | None = None
) -> tuple[np.ndarray, float]:
    """One greedy relabeling sweep over `g` (ascending node order by default).

    Returns the new labels and the exact modularity gain of the sweep;
    the gain is non-negative and zero at a fixed point.
    """
    cfg = cfg or DetectorConfig()
    labels = np.asarray(labels, dtype=np.int64).copy()
    if labels.shape[0] != g.n:
        raise ValueError("labels must cover the graph")
    weights = np.ones(g.indices.shape[0], dtype=np.float64)
    self_w = np.zeros(g.n, dtype=np.float64)
    strengths = _level_strengths(g.indptr, weights, self_w)
    two_m = float(strengths.sum())
    if two_m <= 0.0:
        return labels, 0.0
    comm_tot = np.zeros(g.n, dtype=np.float64)
    np.add.at(comm_tot, labels, strengths)
    if order is None:
        order = np.arange(g.n, dtype=np.int64)
    gain, _ = K.local_move(
        g.indptr, g.indices, weights, self_w, strengths, two_m, labels, comm_tot, order
    )
    return labels, float(gain)


def aggregate_graph(g: Graph, labels: np.ndarray) -> CoarseGraph:
    """Coarsen `g` to one meta-node per community.

    Inter-community edge weights are summed; intra-community mass (edge
    count here, since base graphs are unweighted) becomes the meta-node
    self-weight used by subsequent modularity arithmetic.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape[0] != g.n:
        raise ValueError("labels must cover the graph")
    _, dense = np.unique(labels, return_inverse=True)
    dense = dense.astype(np.int64)
    weights = np.ones(g.indices.shape[0], dtype=np.float64)
    self_w = np.zeros(g.n, dtype=np.float64)
    indptr, indices, wts, self_weights = _aggregate_csr(g.indptr, g.indices, weights, self_w, dense)
    return CoarseGraph(indptr, indices, wts, self_weights)


def coarse_modularity(cg: CoarseGraph, labels: np.ndarray) -> float:
    """Weighted modularity of a coarse graph (self-weights included)."""
    labels = np.asarray(labels, dtype=np.int64)
    strengths = _level_strengths(cg.indptr, cg.weights, cg.self_weights)
    two_m = float(strengths.sum())
    if two_m <= 0:
        raise ValueError("modularity undefined for empty coarse graph")
    c = int(labels.max()) + 1
    rows = np.repeat(np.arange(cg.n, dtype=np.int64), cg.indptr[1:] - cg.indptr[:-1])
    same = labels[rows] == labels[cg.indices]
    intra = np.bincount(labels[rows][same], weights=cg.weights[same], minlength=c)
    intra = intra + 2.0 * np.bincount(labels, weights=cg.self_weights, minlength=c)
    tot = np.bincount(labels, weights=strengths, minlength=c)
    return float(np.sum(intra / two_m - (tot / two_m) ** 2))


def write_partition(p: Partition, stream: IO[str]) -> None:
    """Serialize as `node_id community_id` lines sorted by node id."""
    for nid, lab in zip(p.nodes, p.labels):
        stream.write(f"{int(nid)} {int(lab)}\n")


def read_partition(source: str | IO[str], g: Graph) -> Partition:
    """Read `label community_id` lines into a Partition over `g`'s universe.

    Node tokens are matched against the graph's original file labels when
    present, otherwise parsed as external ids.
    """
    if isinstance(source, str):
        stream: IO[str] = open(source, "r", encoding="utf-8")
        opened = True
    else:
        stream, opened = source, False
    try:
        mapping: dict[int, int] = {}
        label_lookup = (
            {lab: i for i, lab in enumerate(g.labels)} if g.labels is not None else None
        )
        for line_no, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) < 2:
                raise ValueError(f"line {line_no}: expected `label community_id`")
            if label_lookup is not None and tokens[0] in label_lookup:
                nid = label_lookup[tokens[0]]
            else:
                nid = int(tokens[0])
            mapping[nid] = int(tokens[1])
    finally:
        if opened:
            stream.close()
    missing = [int(x) for x in g.node_ids if int(x) not in mapping]
    if missing:
        raise ValueError(f"partition file missing nodes: {missing[:5]}")
    labels = np.asarray([mapping[int(x)] for x in g.node_ids], dtype=np.int64)
    return partition_from_labels(g.node_ids, labels, g)

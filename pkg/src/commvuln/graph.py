"""Immutable undirected graph snapshot and basic traversal operations.

Graphs are stored in canonical CSR form over dense positions 0..n-1; each
graph also carries `node_ids`, the sorted external identities of its nodes.
For a freshly loaded graph `node_ids` is 0..n-1; subgraphs keep the original
ids so partitions before and after a perturbation share a node universe.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from . import _kernels as K


class EdgeListParseError(ValueError):
    """Raised for malformed edge-list input; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class LoadReport:
    """What the loader dropped while canonicalizing."""

    duplicates: int = 0
    self_loops: int = 0


def as_node_set(ids: Iterable[int]) -> np.ndarray:
    """Sorted, deduplicated int64 array of node ids."""
    arr = np.unique(np.asarray(list(ids), dtype=np.int64))
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph; immutable after construction.

    indptr/indices/weights form a CSR with neighbor lists sorted ascending,
    every edge stored twice, no self-loops and no duplicates. `node_ids[p]`
    is the external identity of position p. `labels` maps external ids back
    to the raw tokens of the source file (root graphs only).
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    node_ids: np.ndarray
    labels: tuple[str, ...] | None = None
    load_report: LoadReport | None = field(default=None, compare=False)

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.weights, self.node_ids):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.node_ids.shape[0]

    @property
    def m(self) -> int:
        return self.indices.shape[0] // 2

    @property
    def degrees(self) -> np.ndarray:
        return self.indptr[1:] - self.indptr[:-1]

    @property
    def is_weighted(self) -> bool:
        return bool(np.any(self.weights != 1.0))

    def position_of(self, node_ids) -> np.ndarray:
        """Positions of external ids (which must all be present)."""
        ids = np.asarray(node_ids, dtype=np.int64)
        pos = np.searchsorted(self.node_ids, ids)
        bad = (pos >= self.n) | (self.node_ids[np.minimum(pos, self.n - 1)] != ids)
        if np.any(bad):
            missing = ids[bad][:5].tolist()
            raise ValueError(f"node ids not in graph: {missing}")
        return pos

    def has_node(self, node_id: int) -> bool:
        pos = int(np.searchsorted(self.node_ids, node_id))
        return pos < self.n and int(self.node_ids[pos]) == int(node_id)

    def neighbors(self, node_id: int) -> np.ndarray:
        """External ids adjacent to `node_id`."""
        p = int(self.position_of([node_id])[0])
        return self.node_ids[self.indices[self.indptr[p]:self.indptr[p + 1]]]

    def has_edge(self, u: int, v: int) -> bool:
        pu = int(self.position_of([u])[0])
        pv = int(self.position_of([v])[0])
        row = self.indices[self.indptr[pu]:self.indptr[pu + 1]]
        j = int(np.searchsorted(row, pv))
        return j < row.shape[0] and int(row[j]) == pv

    def edge_array(self) -> np.ndarray:
        """All edges as an (m, 2) array of positions with u < v, row-major order."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        fwd = rows < self.indices
        return np.column_stack([rows[fwd], self.indices[fwd].astype(np.int64)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            np.array_equal(self.node_ids, other.node_ids)
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def _build_csr(n: int, edges: np.ndarray, weights: np.ndarray):
    """Canonical CSR from undirected position-pair edges (u != v, deduplicated)."""
    if edges.shape[0]:
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        wts = np.concatenate([weights, weights])
        order = np.lexsort((dst, src))
        src, dst, wts = src[order], dst[order], wts[order]
    else:
        src = np.empty(0, dtype=np.int64)
        dst = np.empty(0, dtype=np.int64)
        wts = np.empty(0, dtype=np.float64)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst.astype(np.int32), wts.astype(np.float64)


def from_edges(
    node_ids: Iterable[int] | int,
    edges: Iterable[tuple[int, int]],
    weights: Iterable[float] | None = None,
    labels: tuple[str, ...] | None = None,
    load_report: LoadReport | None = None,
) -> Graph:
    """Build a Graph from external-id edges.

    `node_ids` is either the node count (universe 0..n-1) or the explicit
    node universe. Duplicate edges and self-loops are rejected here; use
    `load_edge_list` for tolerant ingestion.
    """
    if isinstance(node_ids, (int, np.integer)):
        ids = np.arange(int(node_ids), dtype=np.int64)
    else:
        ids = as_node_set(node_ids)
    if ids.shape[0] == 0:
        raise ValueError("empty graph")
    edge_arr = np.asarray([(int(u), int(v)) for u, v in edges], dtype=np.int64).reshape(-1, 2)
    w = (
        np.ones(edge_arr.shape[0], dtype=np.float64)
        if weights is None
        else np.asarray(list(weights), dtype=np.float64)
    )
    if w.shape[0] != edge_arr.shape[0]:
        raise ValueError("weights length does not match edges")
    n = ids.shape[0]
    if edge_arr.shape[0]:
        pos = np.searchsorted(ids, edge_arr)
        if np.any(ids[np.minimum(pos, n - 1)] != edge_arr) or np.any(pos >= n):
            raise ValueError("edge endpoint outside node universe")
        if np.any(pos[:, 0] == pos[:, 1]):
            raise ValueError("self-loop in edge list")
        lo = np.minimum(pos[:, 0], pos[:, 1])
        hi = np.maximum(pos[:, 0], pos[:, 1])
        key = lo * n + hi
        if np.unique(key).shape[0] != key.shape[0]:
            raise ValueError("duplicate edge in edge list")
        pairs = np.column_stack([lo, hi])
    else:
        pairs = np.empty((0, 2), dtype=np.int64)
    indptr, indices, wts = _build_csr(n, pairs, w)
    return Graph(indptr, indices, wts, ids, labels=labels, load_report=load_report)


def load_edge_list(
    source: str | IO[str],
    comment_prefix: str = "#",
    separator: str | None = None,
    relabel: bool = True,
) -> Graph:
    """Parse a whitespace/`separator`-delimited edge list into a canonical Graph.

    One edge per line: two node labels plus an optional positive weight
    (extra trailing tokens are ignored). Lines starting with
    `comment_prefix` and blank lines are skipped. With `relabel` (default),
    arbitrary labels map to dense ids in first-seen order and the original
    tokens are kept on `Graph.labels`; without it, tokens must already be
    non-negative integers and are used directly (gaps become isolated
    nodes). Duplicate edges and self-loops are dropped and counted in
    `Graph.load_report`.
    """
    if isinstance(source, str):
        stream: IO[str] = open(source, "r", encoding="utf-8")
        opened = True
    else:
        stream, opened = source, False
    try:
        label_to_id: dict[str, int] = {}
        labels: list[str] = []
        edges: list[tuple[int, int]] = []
        weights: list[float] = []
        seen: set[tuple[int, int]] = set()
        duplicates = 0
        self_loops = 0
        max_id = -1
        for line_no, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line or line.startswith(comment_prefix):
                continue
            tokens = line.split(separator)
            if len(tokens) < 2:
                raise EdgeListParseError(f"expected at least 2 tokens, got {len(tokens)}", line_no)
            if relabel:
                uv = []
                for tok in tokens[:2]:
                    if tok not in label_to_id:
                        label_to_id[tok] = len(labels)
                        labels.append(tok)
                    uv.append(label_to_id[tok])
                u, v = uv
            else:
                try:
                    u, v = int(tokens[0]), int(tokens[1])
                except ValueError:
                    raise EdgeListParseError(f"non-integer node id {tokens[:2]!r}", line_no) from None
                if u < 0 or v < 0:
                    raise EdgeListParseError("negative node id", line_no)
                max_id = max(max_id, u, v)
            w = 1.0
            if len(tokens) >= 3:
                try:
                    w = float(tokens[2])
                except ValueError:
                    raise EdgeListParseError(f"non-numeric weight {tokens[2]!r}", line_no) from None
                if not w > 0:
                    raise EdgeListParseError(f"non-positive weight {w}", line_no)
            if u == v:
                self_loops += 1
                continue
            key = (u, v) if u < v else (v, u)
            if key in seen:
                duplicates += 1
                continue
            seen.add(key)
            edges.append(key)
            weights.append(w)
    finally:
        if opened:
            stream.close()
    n = len(labels) if relabel else max_id + 1
    if n <= 0:
        raise EdgeListParseError("empty graph: no nodes found")
    return from_edges(
        n,
        edges,
        weights,
        labels=tuple(labels) if relabel else None,
        load_report=LoadReport(duplicates=duplicates, self_loops=self_loops),
    )


def remove_nodes(g: Graph, s: Iterable[int]) -> Graph:
    """Induced subgraph on V minus `s`; survivors keep their external ids."""
    s_arr = as_node_set(s)
    pos = g.position_of(s_arr)
    if s_arr.shape[0] >= g.n:
        raise ValueError("cannot remove every node")
    keep_mask = np.ones(g.n, dtype=np.uint8)
    keep_mask[pos] = 0
    indptr, indices, weights = K.induced_csr(g.indptr, g.indices, g.weights, keep_mask)
    return Graph(indptr, indices, weights, g.node_ids[keep_mask.view(bool)], labels=g.labels)


def induced_subgraph(g: Graph, keep: Iterable[int]) -> Graph:
    """Induced subgraph on `keep`; same identity-preserving contract as remove_nodes."""
    keep_arr = as_node_set(keep)
    if keep_arr.shape[0] == 0:
        raise ValueError("keep set must be non-empty")
    pos = g.position_of(keep_arr)
    keep_mask = np.zeros(g.n, dtype=np.uint8)
    keep_mask[pos] = 1
    indptr, indices, weights = K.induced_csr(g.indptr, g.indices, g.weights, keep_mask)
    return Graph(indptr, indices, weights, keep_arr, labels=g.labels)


def shortest_path_lengths(g: Graph, source: int) -> dict[int, int]:
    """Unweighted hop distances from `source`; unreachable nodes are absent."""
    p = int(g.position_of([source])[0])
    dist = K.bfs_distances(g.indptr, g.indices, p)
    reach = dist >= 0
    return {int(nid): int(d) for nid, d in zip(g.node_ids[reach], dist[reach])}


def connected_components(g: Graph) -> list[np.ndarray]:
    """Connected components as sorted id arrays, ordered by smallest member."""
    comp = np.full(g.n, -1, dtype=np.int64)
    out: list[np.ndarray] = []
    for p in range(g.n):
        if comp[p] >= 0:
            continue
        dist = K.bfs_distances(g.indptr, g.indices, p)
        members = dist >= 0
        comp[members] = len(out)
        out.append(g.node_ids[members])
    return out

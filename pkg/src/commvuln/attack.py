"""Search strategies for the most damaging k-node removal set.

Three strategies: full subset enumeration, one-shot ranking by a node
metric, and a hierarchical greedy loop that first picks a community by a
community metric and then a node inside it by a node metric. All ties break
toward smaller ids so results are bit-reproducible.
"""
from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from typing import IO, Callable, Sequence

import numpy as np

from . import _kernels as K
from .compare import (
    DamageScore,
    ValueFunctionId,
    _ari_from_labels,
    _nmi_from_labels,
    damage_from_raw,
    evaluate,
    modularity,
    modularity_csr,
)
from .graph import Graph, induced_subgraph, remove_nodes
from .louvain import DetectorConfig, Partition, _louvain_labels, derive_seed, detect_communities
from .metrics import CommunityMetricId, NodeMetricId, community_metric, node_metric, rank_nodes

# a community detector maps (graph, config) to a Partition; the shipped
# implementation is Louvain, but every strategy accepts a replacement
Detector = Callable[[Graph, DetectorConfig], Partition]


class EnumerationCapExceeded(RuntimeError):
    """C(n, k) is above the configured cap; use a greedy strategy instead."""


@dataclass(frozen=True)
class AttackSpec:
    """What to attack and how to score it.

    `budget` is an absolute count (int) or a fraction of |V| (float in
    (0, 1)). `batch_size` is the number of nodes the hierarchical strategy
    removes between detector refreshes; 1 reproduces the per-removal
    refresh semantics exactly.
    """

    budget: int | float
    value_function: ValueFunctionId = ValueFunctionId.MODULARITY_DIFF
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    node_metric: NodeMetricId | None = None
    community_metric: CommunityMetricId | None = None
    batch_size: int = 1
    invert_node_metric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "value_function", ValueFunctionId(self.value_function))
        if self.node_metric is not None:
            object.__setattr__(self, "node_metric", NodeMetricId(self.node_metric))
        if self.community_metric is not None:
            object.__setattr__(self, "community_metric", CommunityMetricId(self.community_metric))
        if isinstance(self.budget, float) and not 0.0 < self.budget < 1.0:
            raise ValueError("fractional budget must lie in (0, 1)")
        if isinstance(self.budget, int) and self.budget < 1:
            raise ValueError("absolute budget must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True)
class AttackResult:
    """Selected nodes (in removal order), their damage score, and a step trace."""

    algorithm: str
    value_function: ValueFunctionId
    node_metric: NodeMetricId | None
    community_metric: CommunityMetricId | None
    k: int
    selected: tuple[int, ...]
    score: DamageScore
    trace: tuple[dict, ...]
    seed: int
    batch_size: int
    wall_time: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "value_function": self.value_function.value,
            "node_metric": self.node_metric.value if self.node_metric else None,
            "community_metric": self.community_metric.value if self.community_metric else None,
            "k": self.k,
            "selected": list(self.selected),
            "raw": self.score.raw,
            "damage": self.score.damage,
            "trace": list(self.trace),
            "seed": self.seed,
            "batch_size": self.batch_size,
        }

    def write_json(self, stream: IO[str]) -> None:
        json.dump(self.to_json_dict(), stream, indent=2)
        stream.write("\n")


def resolve_budget(g: Graph, spec: AttackSpec) -> int:
    """Absolute budgets pass through; fractions become ceil(f*n), clamped to [1, n-1]."""
    if g.n < 2:
        raise ValueError("graph too small to attack")
    if isinstance(spec.budget, float):
        return max(1, min(math.ceil(spec.budget * g.n), g.n - 1))
    k = int(spec.budget)
    if not 1 <= k <= g.n - 1:
        raise ValueError(f"budget {k} out of range [1, {g.n - 1}]")
    return k


def worker_count() -> int:
    env = os.environ.get("COMMVULN_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def unrank_combination(n: int, k: int, rank: int) -> list[int]:
    """The subset at lexicographic position `rank` among all k-subsets of 0..n-1."""
    out = []
    x = 0
    r = rank
    for i in range(k):
        while True:
            cnt = math.comb(n - 1 - x, k - i - 1)
            if r < cnt:
                break
            r -= cnt
            x += 1
        out.append(x)
        x += 1
    return out


def _advance_combination(c: list[int], n: int) -> bool:
    k = len(c)
    i = k - 1
    while i >= 0 and c[i] == n - k + i:
        i -= 1
    if i < 0:
        return False
    c[i] += 1
    for j in range(i + 1, k):
        c[j] = c[j - 1] + 1
    return True


def _eval_subset_ctx(ctx: dict, positions: Sequence[int]) -> tuple[float, float]:
    """(raw, damage) for removing `positions`, sharing the detector's exact path."""
    mask = ctx["ones"].copy()
    mask[list(positions)] = 0
    indptr, indices, weights = K.induced_csr(ctx["indptr"], ctx["indices"], ctx["weights"], mask)
    y = _louvain_labels(indptr, indices, np.ones(indices.shape[0]), np.zeros(indptr.shape[0] - 1), ctx["cfg"])
    vf = ctx["vf"]
    if vf is ValueFunctionId.MODULARITY_DIFF:
        q_pert = modularity_csr(indptr, indices, y) if indices.shape[0] else 0.0
        raw = ctx["q_base"] - q_pert
    else:
        keep = mask.view(bool)
        _, x_res = np.unique(ctx["x_labels"][keep], return_inverse=True)
        metric = _nmi_from_labels if vf is ValueFunctionId.NMI else _ari_from_labels
        raw = metric(x_res.astype(np.int64), y)
    score = damage_from_raw(vf, raw)
    return score.raw, score.damage


_WORKER_CTX: dict = {}


def _init_worker(ctx: dict) -> None:
    _WORKER_CTX.update(ctx)


def _generic_scan(g: Graph, spec: AttackSpec, x, total: int, detector: Detector):
    """Subset scan through the public evaluation path (custom detectors)."""
    k = resolve_budget(g, spec)
    best: tuple[int, ...] | None = None
    best_raw = math.nan
    best_damage = -math.inf
    comb = list(range(k))
    for _ in range(total):
        subset = tuple(int(g.node_ids[p]) for p in comb)
        g_pert = remove_nodes(g, subset)
        y = detector(g_pert, spec.detector)
        s = evaluate(spec.value_function, g, x, g_pert, y)
        tup = tuple(comb)
        if s.damage > best_damage or (s.damage == best_damage and (best is None or tup < best)):
            best_damage = s.damage
            best_raw = s.raw
            best = tup
        if not _advance_combination(comb, g.n):
            break
    assert best is not None
    return best_raw, best_damage, best


def _scan_range(args: tuple[int, int]) -> tuple[float, float, tuple[int, ...]]:
    start, count = args
    ctx = _WORKER_CTX
    n = ctx["n"]
    k = ctx["k"]
    comb = unrank_combination(n, k, start)
    best_damage = -math.inf
    best_raw = math.nan
    best: tuple[int, ...] | None = None
    for _ in range(count):
        raw, damage = _eval_subset_ctx(ctx, comb)
        tup = tuple(comb)
        if damage > best_damage or (damage == best_damage and (best is None or tup < best)):
            best_damage = damage
            best_raw = raw
            best = tup
        if not _advance_combination(comb, n):
            break
    assert best is not None
    return best_raw, best_damage, best


def exhaustive_attack(
    g: Graph,
    spec: AttackSpec,
    enumeration_cap: int = 10**9,
    detector: Detector = detect_communities,
) -> AttackResult:
    """Evaluate every k-subset and return the one maximizing damage.

    Ties go to the lexicographically smallest subset. Refuses to start when
    C(n, k) exceeds `enumeration_cap`. Enumeration parallelizes over
    contiguous rank ranges (capped by COMMVULN_THREADS) with a
    deterministic reduction, so parallel and serial runs agree bit-for-bit.
    A custom `detector` switches the scan to the generic (slower)
    evaluation path.
    """
    t0 = time.perf_counter()
    k = resolve_budget(g, spec)
    total = math.comb(g.n, k)
    if total > enumeration_cap:
        raise EnumerationCapExceeded(
            f"C({g.n},{k}) = {total} exceeds the cap of {enumeration_cap}; "
            "use the netgreedy or commgreedy strategy for this size"
        )
    x = detector(g, spec.detector)
    if detector is not detect_communities:
        best_raw, best_damage, best = _generic_scan(g, spec, x, total, detector)
    else:
        ctx = {
            "indptr": g.indptr,
            "indices": g.indices,
            "weights": g.weights,
            "ones": np.ones(g.n, dtype=np.uint8),
            "cfg": spec.detector,
            "vf": spec.value_function,
            "x_labels": x.labels,
            "q_base": modularity(g, x) if spec.value_function is ValueFunctionId.MODULARITY_DIFF else None,
            "n": g.n,
            "k": k,
        }
        workers = min(worker_count(), max(1, total // 2048))
        if workers <= 1:
            _init_worker(ctx)
            best_raw, best_damage, best = _scan_range((0, total))
            _WORKER_CTX.clear()
        else:
            import multiprocessing as mp

            chunk = math.ceil(total / (workers * 8))
            ranges = [(s, min(chunk, total - s)) for s in range(0, total, chunk)]
            mp_ctx = mp.get_context("fork")
            with mp_ctx.Pool(workers, initializer=_init_worker, initargs=(ctx,)) as pool:
                results = pool.map(_scan_range, ranges)
            best_raw, best_damage, best = max(
                results, key=lambda r: (r[1], tuple(-x for x in r[2]))
            )
    selected = tuple(int(g.node_ids[p]) for p in best)
    g_pert = remove_nodes(g, selected)
    y = detector(g_pert, spec.detector)
    score = evaluate(spec.value_function, g, x, g_pert, y)
    trace = ({"subsets_evaluated": total, "fast_path_damage": best_damage, "fast_path_raw": best_raw},)
    return AttackResult(
        algorithm="exhaustive",
        value_function=spec.value_function,
        node_metric=None,
        community_metric=None,
        k=k,
        selected=selected,
        score=score,
        trace=trace,
        seed=spec.detector.rng_seed,
        batch_size=spec.batch_size,
        wall_time=time.perf_counter() - t0,
    )


def network_greedy_attack(
    g: Graph,
    spec: AttackSpec,
    rerank: bool = False,
    detector: Detector = detect_communities,
) -> AttackResult:
    """Rank all nodes once by the node metric and remove the top k.

    With `rerank`, the metric is recomputed on the shrinking graph and
    nodes are removed one at a time (adaptive variant, off by default).
    """
    t0 = time.perf_counter()
    if spec.node_metric is None:
        raise ValueError("network_greedy_attack requires spec.node_metric")
    k = resolve_budget(g, spec)
    x = detector(g, spec.detector)
    trace = []
    if rerank:
        cur = g
        selected: list[int] = []
        while len(selected) < k:
            mv = node_metric(cur, spec.node_metric, invert=spec.invert_node_metric,
                             seed=spec.detector.rng_seed)
            node = rank_nodes(mv, 1)[0]
            trace.append({"step": len(selected), "node": node,
                          "metric_score": float(mv.scores[np.searchsorted(mv.nodes, node)])})
            selected.append(node)
            cur = remove_nodes(cur, [node])
        g_pert = cur
    else:
        mv = node_metric(g, spec.node_metric, invert=spec.invert_node_metric,
                         seed=spec.detector.rng_seed)
        selected = rank_nodes(mv, k)
        for i, node in enumerate(selected):
            trace.append({"step": i, "node": node,
                          "metric_score": float(mv.scores[np.searchsorted(mv.nodes, node)])})
        g_pert = remove_nodes(g, selected)
    y = detector(g_pert, spec.detector)
    score = evaluate(spec.value_function, g, x, g_pert, y)
    return AttackResult(
        algorithm="netgreedy",
        value_function=spec.value_function,
        node_metric=spec.node_metric,
        community_metric=None,
        k=k,
        selected=tuple(selected),
        score=score,
        trace=tuple(trace),
        seed=spec.detector.rng_seed,
        batch_size=spec.batch_size,
        wall_time=time.perf_counter() - t0,
    )


def community_greedy_attack(
    g: Graph, spec: AttackSpec, detector: Detector = detect_communities
) -> AttackResult:
    """Hierarchical greedy: pick the best community, then the best node in it.

    The reference structure X is detected once on the original graph. Each
    cycle re-detects communities on the current graph (seed re-derived from
    (master seed, refresh index)), scores every community's induced
    subgraph by the community metric (ties: smallest community id), ranks
    that community's nodes by the node metric on its induced subgraph
    (ties: smallest id), and removes up to `batch_size` of them before the
    next refresh. If the chosen community has fewer nodes than the batch,
    the refresh happens early and the trace records it.
    """
    t0 = time.perf_counter()
    if spec.node_metric is None or spec.community_metric is None:
        raise ValueError("community_greedy_attack requires node_metric and community_metric")
    k = resolve_budget(g, spec)
    master = spec.detector.rng_seed
    x = detector(g, spec.detector)
    cur = g
    cur_y = x
    selected: list[int] = []
    trace: list[dict] = []
    refresh_idx = 0
    while len(selected) < k:
        comm_scores = []
        for c in range(cur_y.num_communities):
            sub = induced_subgraph(cur, cur_y.members(c))
            comm_scores.append(community_metric(sub, cur, spec.community_metric))
        best_c = 0
        for c in range(1, cur_y.num_communities):
            if comm_scores[c] > comm_scores[best_c]:
                best_c = c
        members = cur_y.members(best_c)
        sub = induced_subgraph(cur, members)
        mv = node_metric(sub, spec.node_metric, invert=spec.invert_node_metric, seed=master)
        take = min(spec.batch_size, k - len(selected), members.shape[0])
        batch = rank_nodes(mv, take)
        early = take < min(spec.batch_size, k - len(selected))
        for node in batch:
            trace.append({
                "step": len(selected),
                "refresh": refresh_idx,
                "community": int(best_c),
                "community_score": float(comm_scores[best_c]),
                "node": int(node),
                "node_score": float(mv.scores[np.searchsorted(mv.nodes, node)]),
                "communities": int(cur_y.num_communities),
                "early_refresh": bool(early),
            })
            selected.append(int(node))
        cur = remove_nodes(cur, batch)
        refresh_idx += 1
        cfg = DetectorConfig(
            rng_seed=derive_seed(master, refresh_idx),
            max_passes=spec.detector.max_passes,
            min_modularity_gain=spec.detector.min_modularity_gain,
        )
        cur_y = detector(cur, cfg)
    score = evaluate(spec.value_function, g, x, cur, cur_y)
    return AttackResult(
        algorithm="commgreedy",
        value_function=spec.value_function,
        node_metric=spec.node_metric,
        community_metric=spec.community_metric,
        k=k,
        selected=tuple(selected),
        score=score,
        trace=tuple(trace),
        seed=master,
        batch_size=spec.batch_size,
        wall_time=time.perf_counter() - t0,
    )


ALGORITHMS = {
    "exhaustive": exhaustive_attack,
    "netgreedy": network_greedy_attack,
    "commgreedy": community_greedy_attack,
}


def run_attack(algorithm: str, g: Graph, spec: AttackSpec, **kwargs) -> AttackResult:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {sorted(ALGORITHMS)}")
    return ALGORITHMS[algorithm](g, spec, **kwargs)

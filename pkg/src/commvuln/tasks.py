"""Extrinsic validation tasks: community-aware link prediction and diffusion.

Both tasks measure how much a node-removal attack degrades performance
relative to the intact network. Original and perturbed evaluations share the
same task seed so the deltas are paired.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .attack import AttackResult
from .graph import Graph, from_edges, remove_nodes
from .louvain import DetectorConfig, Partition, detect_communities

WIC_EPSILON = 0.001

SCORERS = ("within_inter_cluster", "modified_common_neighbors", "modified_resource_allocation")


@dataclass(frozen=True)
class LinkPredConfig:
    scorer: str = "within_inter_cluster"
    test_fraction: float = 0.2
    negative_ratio: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.scorer not in SCORERS:
            raise ValueError(f"unknown scorer {self.scorer!r}; expected one of {SCORERS}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError("test_fraction must lie in (0, 1)")
        if self.negative_ratio <= 0:
            raise ValueError("negative_ratio must be > 0")


@dataclass(frozen=True)
class DiffusionConfig:
    p_in: float = 0.7
    p_out: float = 0.3
    seed_fraction: float = 0.01
    runs: int = 200
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_out <= self.p_in <= 1.0:
            raise ValueError("need 0 <= p_out <= p_in <= 1")
        if not 0.0 < self.seed_fraction <= 1.0:
            raise ValueError("seed_fraction must lie in (0, 1]")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass(frozen=True)
class TaskReport:
    """Task performance on the original vs. the perturbed network."""

    task: str
    metric_original: float
    metric_perturbed: float
    delta: float
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {"task": self.task}
        out.update(self.details.get("config", {}))
        out.update(
            {
                "metric_original": self.metric_original,
                "metric_perturbed": self.metric_perturbed,
                "delta": self.delta,
                "seeds": self.details.get("seeds", {}),
            }
        )
        return out

    def write_json(self, stream: IO[str]) -> None:
        json.dump(self.to_json_dict(), stream, indent=2)
        stream.write("\n")


def split_edges(g: Graph, cfg: LinkPredConfig) -> tuple[Graph, list[tuple[int, int]]]:
    """Hold out a seeded random test_fraction of edges.

    Returns the training graph (remaining edges over the full node set) and
    the held-out positive edges as sorted external-id pairs. At least one
    edge is held out and at least one must remain for training.
    """
    m = g.m
    edges = g.edge_array()
    pairs = [(int(g.node_ids[u]), int(g.node_ids[v])) for u, v in edges]
    n_test = max(1, round(cfg.test_fraction * m))
    if m - n_test < 1:
        raise ValueError("split leaves an empty training set")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(cfg.rng_seed), spawn_key=(1,)))
    test_idx = np.sort(rng.choice(m, size=n_test, replace=False))
    test_mask = np.zeros(m, dtype=bool)
    test_mask[test_idx] = True
    test_edges = [pairs[i] for i in range(m) if test_mask[i]]
    train_edges = [pairs[i] for i in range(m) if not test_mask[i]]
    train_graph = from_edges(g.node_ids, train_edges, labels=g.labels)
    return train_graph, test_edges


def _common_neighbors(train: Graph, u: int, v: int) -> np.ndarray:
    pu = int(train.position_of([u])[0])
    pv = int(train.position_of([v])[0])
    row_u = train.indices[train.indptr[pu]:train.indptr[pu + 1]]
    row_v = train.indices[train.indptr[pv]:train.indptr[pv + 1]]
    common = np.intersect1d(row_u, row_v, assume_unique=True)
    return train.node_ids[common]


def score_pair(train: Graph, partition: Partition, u: int, v: int, scorer: str) -> float:
    """Community-aware similarity of a candidate non-edge (u, v).

    within_inter_cluster: same-community common neighbors over the rest
    (plus epsilon), 0 when u and v live in different communities.
    modified_common_neighbors: |CN| plus the count sharing u and v's
    community. modified_resource_allocation: sum of 1/deg over CN plus the
    same sum over the shared-community subset.
    """
    cn = _common_neighbors(train, u, v)
    cu = partition.label_of(u)
    cv = partition.label_of(v)
    same_comm = cu == cv
    if cn.shape[0] == 0 and scorer != "within_inter_cluster":
        return 0.0
    cn_labels = np.asarray([partition.label_of(int(z)) for z in cn], dtype=np.int64)
    within = cn[(cn_labels == cu) & same_comm] if cn.shape[0] else cn
    if scorer == "within_inter_cluster":
        if not same_comm:
            return 0.0
        n_within = int(within.shape[0])
        n_inter = int(cn.shape[0]) - n_within
        return n_within / (n_inter + WIC_EPSILON)
    if scorer == "modified_common_neighbors":
        return float(cn.shape[0] + within.shape[0])
    deg = {int(z): int(train.degrees[int(train.position_of([int(z)])[0])]) for z in cn}
    base = sum(1.0 / deg[int(z)] for z in cn)
    bonus = sum(1.0 / deg[int(z)] for z in within)
    return base + bonus


def _sample_non_edges(g: Graph, count: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Distinct non-edges of g, seeded; falls back to full enumeration on tiny graphs."""
    n = g.n
    total_pairs = n * (n - 1) // 2
    free = total_pairs - g.m
    count = min(count, free)
    if count <= 0:
        return []
    out: set[tuple[int, int]] = set()
    attempts = 0
    cap = 50 * count + 1000
    while len(out) < count and attempts < cap:
        a, b = rng.integers(0, n, size=2)
        attempts += 1
        if a == b:
            continue
        pa, pb = (int(a), int(b)) if a < b else (int(b), int(a))
        pair = (int(g.node_ids[pa]), int(g.node_ids[pb]))
        if pair in out:
            continue
        row = g.indices[g.indptr[pa]:g.indptr[pa + 1]]
        j = int(np.searchsorted(row, pb))
        if j < row.shape[0] and int(row[j]) == pb:
            continue
        out.add(pair)
    if len(out) < count:
        # dense fallback: enumerate every non-edge and take a seeded choice
        all_non = []
        for pa in range(n):
            row = set(int(x) for x in g.indices[g.indptr[pa]:g.indptr[pa + 1]])
            for pb in range(pa + 1, n):
                if pb not in row:
                    all_non.append((int(g.node_ids[pa]), int(g.node_ids[pb])))
        remaining = [p for p in all_non if p not in out]
        need = count - len(out)
        idx = rng.choice(len(remaining), size=need, replace=False)
        out.update(remaining[i] for i in idx)
    return sorted(out)


def link_prediction_f1(
    g: Graph,
    partition: Partition,
    cfg: LinkPredConfig,
    test_edges: list[tuple[int, int]] | None = None,
) -> float:
    """Top-|positives| link prediction F1 under a community-aware scorer.

    Candidates are the held-out positives plus seeded sampled non-edges
    (negative_ratio times as many); the |positives| highest-scoring
    candidates are predicted positive (ties: smaller (u, v) pair first).
    Under this protocol precision = recall = F1. Passing `test_edges`
    reuses an existing holdout (pairs outside g are dropped), which keeps
    original/perturbed comparisons paired.
    """
    if test_edges is None:
        train, positives = split_edges(g, cfg)
    else:
        positives = [
            (u, v) for u, v in test_edges if g.has_node(u) and g.has_node(v) and g.has_edge(u, v)
        ]
        if not positives:
            return 0.0
        pos_set = set(positives)
        edges = g.edge_array()
        keep = [
            (int(g.node_ids[u]), int(g.node_ids[v]))
            for u, v in edges
            if (int(g.node_ids[u]), int(g.node_ids[v])) not in pos_set
        ]
        if not keep:
            raise ValueError("split leaves an empty training set")
        train = from_edges(g.node_ids, keep, labels=g.labels)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(cfg.rng_seed), spawn_key=(2,)))
    n_neg = max(1, round(cfg.negative_ratio * len(positives)))
    negatives = _sample_non_edges(g, n_neg, rng)
    candidates = sorted(set(positives) | set(negatives))
    scored = [
        (-score_pair(train, partition, u, v, cfg.scorer), u, v) for u, v in candidates
    ]
    scored.sort()
    predicted = {(u, v) for _, u, v in scored[: len(positives)]}
    tp = len(predicted & set(positives))
    return tp / len(positives)


def independent_cascade(
    g: Graph,
    partition: Partition,
    cfg: DiffusionConfig,
    return_details: bool = False,
):
    """Mean final active fraction of seeded independent-cascade runs.

    Each run activates a random seed set (seed_fraction of nodes, at least
    one), then every newly active node gets one chance to activate each
    inactive neighbor with p_in (same community) or p_out (different).
    Run r uses an independent RNG stream derived from (rng_seed, r).
    """
    if not np.array_equal(partition.nodes, g.node_ids):
        raise ValueError("partition must cover the graph")
    n = g.n
    n_seed = max(1, round(cfg.seed_fraction * n))
    labels = partition.labels
    fractions = np.empty(cfg.runs, dtype=np.float64)
    details = []
    for r in range(cfg.runs):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=int(cfg.rng_seed), spawn_key=(3, r))
        )
        seeds = np.sort(rng.choice(n, size=n_seed, replace=False))
        active = np.zeros(n, dtype=bool)
        active[seeds] = True
        frontier = seeds
        parents = {int(g.node_ids[s]): None for s in seeds} if return_details else None
        while frontier.size:
            starts = g.indptr[frontier]
            counts = g.indptr[frontier + 1] - starts
            total = int(counts.sum())
            if total == 0:
                break
            src = np.repeat(frontier, counts)
            offs = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
            dst = g.indices[g.indptr[src] + offs].astype(np.int64)
            attempt = ~active[dst]
            src, dst = src[attempt], dst[attempt]
            if src.shape[0] == 0:
                break
            p = np.where(labels[src] == labels[dst], cfg.p_in, cfg.p_out)
            hits = rng.random(src.shape[0]) < p
            if return_details:
                for s_, d_ in zip(src[hits], dst[hits]):
                    nid = int(g.node_ids[d_])
                    if nid not in parents:
                        parents[nid] = int(g.node_ids[s_])
            newly = np.unique(dst[hits])
            if newly.shape[0] == 0:
                break
            active[newly] = True
            frontier = newly
        fractions[r] = active.sum() / n
        if return_details:
            details.append(
                {
                    "seeds": [int(g.node_ids[s]) for s in seeds],
                    "active": [int(x) for x in g.node_ids[active]],
                    "parents": parents,
                }
            )
    mean = float(fractions.mean())
    if return_details:
        return mean, details
    return mean


def run_task(
    g: Graph,
    attack: AttackResult,
    task_cfg: LinkPredConfig | DiffusionConfig,
    detector_cfg: DetectorConfig | None = None,
) -> TaskReport:
    """Evaluate one task on the original and attacked network with paired seeds.

    Link prediction reuses the original holdout's surviving test edges on
    the perturbed graph; diffusion reseeds per run from the same master
    seed on whatever nodes survive.
    """
    detector_cfg = detector_cfg or DetectorConfig()
    x = detect_communities(g, detector_cfg)
    g_pert = remove_nodes(g, attack.selected)
    y = detect_communities(g_pert, detector_cfg)
    if isinstance(task_cfg, LinkPredConfig):
        _, test_edges = split_edges(g, task_cfg)
        orig = link_prediction_f1(g, x, task_cfg, test_edges=test_edges)
        pert = link_prediction_f1(g_pert, y, task_cfg, test_edges=test_edges)
        task = "linkpred"
        config = {
            "scorer": task_cfg.scorer,
            "test_fraction": task_cfg.test_fraction,
            "negative_ratio": task_cfg.negative_ratio,
        }
    else:
        orig = independent_cascade(g, x, task_cfg)
        pert = independent_cascade(g_pert, y, task_cfg)
        task = "diffusion"
        config = {
            "p_in": task_cfg.p_in,
            "p_out": task_cfg.p_out,
            "runs": task_cfg.runs,
            "seed_fraction": task_cfg.seed_fraction,
        }
    return TaskReport(
        task=task,
        metric_original=orig,
        metric_perturbed=pert,
        delta=orig - pert,
        details={
            "config": config,
            "seeds": {"task": task_cfg.rng_seed, "detector": detector_cfg.rng_seed},
            "attack": {"algorithm": attack.algorithm, "selected": list(attack.selected)},
        },
    )

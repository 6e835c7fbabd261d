"""Config-driven experiment pipeline: dataset registry, sweeps, result emission.

Bundled small fixtures live in `commvuln/datasets`; the large datasets are
never shipped and must be supplied as user files, which are checked against
their published node/edge counts with a warning on mismatch.
"""
from __future__ import annotations

import io
import json
import time
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .attack import AttackSpec, run_attack, worker_count
from .compare import ValueFunctionId
from .graph import Graph, from_edges, load_edge_list
from .louvain import DetectorConfig, Partition, read_partition
from .metrics import CommunityMetricId, NodeMetricId

EXPECTED_COUNTS = {
    "karate": (34, 78),
    "football": (115, 613),
    "railway": (301, 1224),
    "coauthorship": (103667, 352183),
    "amazon": (334863, 925872),
    "livejournal": (3997962, 34681189),
}

BUNDLED = ("karate", "football", "railway")
USER_SUPPLIED = ("coauthorship", "amazon", "livejournal")


def _two_triangles() -> tuple[Graph, Partition]:
    from .louvain import partition_from_labels

    g = from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])
    p = partition_from_labels(g.node_ids, np.array([0, 0, 0, 1, 1, 1]), g)
    return g, p


def _k5() -> tuple[Graph, None]:
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    return from_edges(5, edges), None


def _star5() -> tuple[Graph, None]:
    return from_edges(5, [(0, i) for i in range(1, 5)]), None


SYNTHETIC = {"two_triangles": _two_triangles, "k5": _k5, "star5": _star5}


def fixture(name: str, path: str | None = None) -> tuple[Graph, Partition | None]:
    """Load a registered dataset: (graph, ground-truth partition or None).

    Bundled: karate, football, railway (with ground-truth communities) and
    the tiny synthetic graphs two_triangles, k5, star5. The large datasets
    (coauthorship, amazon, livejournal) need `path`; their node/edge counts
    are checked against the published figures and mismatches only warn.
    """
    if name in SYNTHETIC:
        return SYNTHETIC[name]()
    if name in BUNDLED:
        pkg = resources.files("commvuln.datasets")
        g = load_edge_list(io.StringIO(pkg.joinpath(f"{name}.edges").read_text()), relabel=False)
        gt = read_partition(io.StringIO(pkg.joinpath(f"{name}.communities").read_text()), g)
        _check_counts(name, g)
        return g, gt
    if name in USER_SUPPLIED:
        if path is None:
            raise ValueError(
                f"dataset {name!r} is not bundled; pass the path to a local edge-list file"
            )
        g = load_edge_list(path)
        _check_counts(name, g)
        return g, None
    raise ValueError(f"unknown fixture {name!r}; known: "
                     f"{sorted(SYNTHETIC) + list(BUNDLED) + list(USER_SUPPLIED)}")


def resolve_dataset(name_or_path: str, path: str | None = None) -> Graph:
    """Registry name or an edge-list file path, for config-driven runs."""
    try:
        return fixture(name_or_path, path)[0]
    except ValueError:
        if Path(name_or_path).exists():
            return load_edge_list(name_or_path)
        raise


def _check_counts(name: str, g: Graph) -> None:
    exp = EXPECTED_COUNTS.get(name)
    if exp and (g.n, g.m) != exp:
        warnings.warn(
            f"{name}: loaded n={g.n}, m={g.m} but expected n={exp[0]}, m={exp[1]}; "
            "this looks like a different variant of the dataset",
            RuntimeWarning,
            stacklevel=2,
        )


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    algorithm: str
    value_function: str
    node_metric: str
    community_metric: str
    budget: int | float
    seed: int
    raw: float
    damage: float
    wall_time_ms: int

    FIELDS = (
        "dataset", "algorithm", "value_function", "node_metric", "community_metric",
        "budget", "seed", "raw", "damage", "wall_time_ms",
    )

    def as_csv(self) -> str:
        return ",".join([
            self.dataset, self.algorithm, self.value_function,
            self.node_metric, self.community_metric,
            str(self.budget), str(self.seed),
            f"{self.raw:.6f}", f"{self.damage:.6f}", str(self.wall_time_ms),
        ])

    def as_json_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "algorithm": self.algorithm,
            "value_function": self.value_function,
            "node_metric": self.node_metric,
            "community_metric": self.community_metric,
            "budget": self.budget,
            "seed": self.seed,
            "raw": round(self.raw, 6),
            "damage": round(self.damage, 6),
            "wall_time_ms": self.wall_time_ms,
        }


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: dataset x algorithm x budgets x seeds x metric combos."""

    dataset: str
    algorithm: str
    value_function: ValueFunctionId = ValueFunctionId.MODULARITY_DIFF
    budgets: tuple[int | float, ...] = (5,)
    seeds: tuple[int, ...] = (0,)
    node_metric: NodeMetricId | None = None
    community_metric: CommunityMetricId | None = None
    batch_size: int = 1
    dataset_path: str | None = None
    record_timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "value_function", ValueFunctionId(self.value_function))
        if self.node_metric is not None:
            object.__setattr__(self, "node_metric", NodeMetricId(self.node_metric))
        if self.community_metric is not None:
            object.__setattr__(self, "community_metric", CommunityMetricId(self.community_metric))
        if not self.budgets:
            raise ValueError("need at least one budget")
        if not self.seeds:
            raise ValueError("need at least one seed")


def _metric_combos(cfg: ExperimentConfig) -> list[tuple[NodeMetricId | None, CommunityMetricId | None]]:
    if cfg.algorithm == "exhaustive":
        return [(None, None)]
    node_opts = [cfg.node_metric] if cfg.node_metric else list(NodeMetricId)
    if cfg.algorithm == "netgreedy":
        return [(nm, None) for nm in node_opts]
    comm_opts = [cfg.community_metric] if cfg.community_metric else list(CommunityMetricId)
    return [(nm, cm) for nm in node_opts for cm in comm_opts]


_SWEEP_CTX: dict = {}


def _init_sweep(graph, cfg: ExperimentConfig) -> None:
    _SWEEP_CTX["graph"] = graph
    _SWEEP_CTX["cfg"] = cfg


def _run_cell(cell) -> ResultRow:
    budget, seed, nm, cm = cell
    g = _SWEEP_CTX["graph"]
    cfg: ExperimentConfig = _SWEEP_CTX["cfg"]
    spec = AttackSpec(
        budget=budget,
        value_function=cfg.value_function,
        detector=DetectorConfig(rng_seed=seed),
        node_metric=nm,
        community_metric=cm,
        batch_size=cfg.batch_size,
    )
    t0 = time.perf_counter()
    res = run_attack(cfg.algorithm, g, spec)
    ms = int(round((time.perf_counter() - t0) * 1000)) if cfg.record_timing else 0
    return ResultRow(
        dataset=cfg.dataset,
        algorithm=cfg.algorithm,
        value_function=cfg.value_function.value,
        node_metric=nm.value if nm else "",
        community_metric=cm.value if cm else "",
        budget=budget,
        seed=seed,
        raw=res.score.raw,
        damage=res.score.damage,
        wall_time_ms=ms,
    )


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Execute the sweep cross-product deterministically.

    Independent cells run in a worker pool (COMMVULN_THREADS caps it;
    exhaustive sweeps stay serial so the scan can use the pool itself) and
    the output is a deterministic sorted merge by (budget, seed, node
    metric, community metric). Timing is only recorded with
    `record_timing`; otherwise wall_time_ms is 0 so repeated runs emit
    byte-identical files.
    """
    g = resolve_dataset(cfg.dataset, cfg.dataset_path)
    cells = [
        (budget, seed, nm, cm)
        for budget in cfg.budgets
        for seed in cfg.seeds
        for nm, cm in _metric_combos(cfg)
    ]
    workers = min(worker_count(), len(cells))
    if workers > 1 and cfg.algorithm != "exhaustive":
        import multiprocessing as mp

        mp_ctx = mp.get_context("fork")
        with mp_ctx.Pool(workers, initializer=_init_sweep, initargs=(g, cfg)) as pool:
            rows = pool.map(_run_cell, cells)
    else:
        _init_sweep(g, cfg)
        rows = [_run_cell(cell) for cell in cells]
        _SWEEP_CTX.clear()
    rows.sort(key=lambda r: (r.budget, r.seed, r.node_metric, r.community_metric))
    return rows


def emit(rows: list[ResultRow], path: str | Path, fmt: str = "csv") -> None:
    """Write rows as CSV (fixed header) or a JSON array; floats use 6 decimals."""
    path = Path(path)
    if fmt == "csv":
        lines = [",".join(ResultRow.FIELDS)]
        lines.extend(r.as_csv() for r in rows)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif fmt == "json":
        path.write_text(
            json.dumps([r.as_json_dict() for r in rows], indent=2) + "\n", encoding="utf-8"
        )
    else:
        raise ValueError(f"unknown format {fmt!r}; expected csv or json")


def parse_rows_json(text: str) -> list[ResultRow]:
    """Inverse of the JSON emission (used by round-trip checks)."""
    out = []
    for obj in json.loads(text):
        out.append(ResultRow(**obj))
    return out

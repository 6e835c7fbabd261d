"""Command-line interface.

Subcommands: `attack` (run one strategy and write the result), `task`
(extrinsic link-prediction / diffusion evaluation around an attack),
`metrics` (export per-node scores), and `sweep` (budget x seed grids to
CSV/JSON). Exit codes: 0 success, 2 configuration error, 3 infeasible
(enumeration cap exceeded).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from ._kernels import BACKEND
from .attack import AttackSpec, EnumerationCapExceeded, run_attack
from .compare import ValueFunctionId
from .experiment import ExperimentConfig, emit, fixture, run_experiment
from .graph import EdgeListParseError, load_edge_list
from .louvain import DetectorConfig
from .metrics import CommunityMetricId, NodeMetricId, node_metric
from .tasks import DiffusionConfig, LinkPredConfig, run_task

VALUE_FUNCTIONS = [v.value for v in ValueFunctionId]
NODE_METRICS = [m.value for m in NodeMetricId]
COMMUNITY_METRICS = [m.value for m in CommunityMetricId]


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="path to an edge-list file (# comments, optional weights)")
    src.add_argument("--fixture", help="bundled dataset name (karate, football, railway, ...)")
    p.add_argument("--graph-path", help="edge-list path for user-supplied registry datasets")


def _load_graph(args):
    if args.fixture:
        g, _ = fixture(args.fixture, getattr(args, "graph_path", None))
        return g, args.fixture
    g = load_edge_list(args.graph)
    return g, Path(args.graph).stem


def _add_attack_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", required=True, choices=["exhaustive", "netgreedy", "commgreedy"])
    p.add_argument("--value-fn", default="modularity", choices=VALUE_FUNCTIONS)
    budget = p.add_mutually_exclusive_group(required=True)
    budget.add_argument("--k", type=int, help="absolute removal budget")
    budget.add_argument("--percent", type=float, help="fractional budget, e.g. 0.05")
    p.add_argument("--node-metric", choices=NODE_METRICS)
    p.add_argument("--community-metric", choices=COMMUNITY_METRICS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch", type=int, default=1, help="removals per detector refresh (commgreedy)")
    p.add_argument("--invert-node-metric", action="store_true",
                   help="rank the node metric ascending instead of descending")
    p.add_argument("--rerank", action="store_true",
                   help="netgreedy only: recompute the ranking after every removal")
    p.add_argument("--cap", type=int, default=10**9, help="exhaustive enumeration cap")


def _spec_from_args(args) -> AttackSpec:
    budget = args.k if args.k is not None else args.percent
    return AttackSpec(
        budget=budget,
        value_function=ValueFunctionId(args.value_fn),
        detector=DetectorConfig(rng_seed=args.seed),
        node_metric=NodeMetricId(args.node_metric) if args.node_metric else None,
        community_metric=CommunityMetricId(args.community_metric) if args.community_metric else None,
        batch_size=args.batch,
        invert_node_metric=args.invert_node_metric,
    )


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_attack(args) -> int:
    g, dataset = _load_graph(args)
    spec = _spec_from_args(args)
    kwargs = {}
    if args.algo == "exhaustive":
        kwargs["enumeration_cap"] = args.cap
    elif args.algo == "netgreedy":
        kwargs["rerank"] = args.rerank
    result = run_attack(args.algo, g, spec, **kwargs)
    if args.format == "csv":
        from .experiment import ResultRow

        row = ResultRow(
            dataset=dataset,
            algorithm=result.algorithm,
            value_function=result.value_function.value,
            node_metric=result.node_metric.value if result.node_metric else "",
            community_metric=result.community_metric.value if result.community_metric else "",
            budget=result.k,
            seed=result.seed,
            raw=result.score.raw,
            damage=result.score.damage,
            wall_time_ms=0,
        )
        _write_or_print(",".join(ResultRow.FIELDS) + "\n" + row.as_csv() + "\n", args.out)
        return 0
    import json

    _write_or_print(json.dumps(result.to_json_dict(), indent=2) + "\n", args.out)
    return 0


def cmd_task(args) -> int:
    g, _ = _load_graph(args)
    spec = _spec_from_args(args)
    kwargs = {"enumeration_cap": args.cap} if args.algo == "exhaustive" else {}
    attack = run_attack(args.algo, g, spec, **kwargs)
    if args.task == "linkpred":
        cfg = LinkPredConfig(
            scorer=args.scorer,
            test_fraction=args.test_fraction,
            negative_ratio=args.negative_ratio,
            rng_seed=args.task_seed,
        )
    else:
        cfg = DiffusionConfig(
            p_in=args.p_in,
            p_out=args.p_out,
            seed_fraction=args.seed_fraction,
            runs=args.runs,
            rng_seed=args.task_seed,
        )
    report = run_task(g, attack, cfg, DetectorConfig(rng_seed=args.seed))
    import json

    _write_or_print(json.dumps(report.to_json_dict(), indent=2) + "\n", args.out)
    return 0


def cmd_metrics(args) -> int:
    g, _ = _load_graph(args)
    mv = node_metric(
        g,
        NodeMetricId(args.metric),
        invert=args.invert_node_metric,
        betweenness_sample=args.betweenness_sample,
        seed=args.seed,
    )
    import io

    buf = io.StringIO()
    mv.write_csv(buf)
    _write_or_print(buf.getvalue(), args.out)
    return 0


def cmd_sweep(args) -> int:
    budgets = []
    for tok in args.budgets.split(","):
        tok = tok.strip()
        budgets.append(float(tok) if "." in tok else int(tok))
    seeds = tuple(int(s) for s in args.seeds.split(","))
    cfg = ExperimentConfig(
        dataset=args.fixture if args.fixture else args.graph,
        algorithm=args.algo,
        value_function=ValueFunctionId(args.value_fn),
        budgets=tuple(budgets),
        seeds=seeds,
        node_metric=NodeMetricId(args.node_metric) if args.node_metric else None,
        community_metric=CommunityMetricId(args.community_metric) if args.community_metric else None,
        batch_size=args.batch,
        dataset_path=getattr(args, "graph_path", None),
        record_timing=args.timing,
    )
    rows = run_experiment(cfg)
    emit(rows, args.out, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commvuln",
        description="Identify the nodes whose removal most damages a network's community structure",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} (kernels: {BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p_attack = sub.add_parser("attack", help="run one attack strategy")
    _add_graph_args(p_attack)
    _add_attack_args(p_attack)
    p_attack.add_argument("--out", help="output path (default: stdout)")
    p_attack.add_argument("--format", choices=["json", "csv"], default="json",
                          help="csv emits one sweep-style result row")
    p_attack.set_defaults(func=cmd_attack)

    p_task = sub.add_parser("task", help="extrinsic task evaluation around an attack")
    p_task.add_argument("--task", required=True, choices=["linkpred", "diffusion"])
    _add_graph_args(p_task)
    _add_attack_args(p_task)
    p_task.add_argument("--task-seed", type=int, default=0)
    p_task.add_argument("--scorer", default="within_inter_cluster",
                        choices=["within_inter_cluster", "modified_common_neighbors",
                                 "modified_resource_allocation"])
    p_task.add_argument("--test-fraction", type=float, default=0.2)
    p_task.add_argument("--negative-ratio", type=float, default=1.0)
    p_task.add_argument("--p-in", type=float, default=0.7)
    p_task.add_argument("--p-out", type=float, default=0.3)
    p_task.add_argument("--seed-fraction", type=float, default=0.01)
    p_task.add_argument("--runs", type=int, default=200)
    p_task.add_argument("--out", help="output path (default: stdout)")
    p_task.set_defaults(func=cmd_task)

    p_metrics = sub.add_parser("metrics", help="export per-node metric scores as CSV")
    _add_graph_args(p_metrics)
    p_metrics.add_argument("--metric", required=True, choices=NODE_METRICS)
    p_metrics.add_argument("--seed", type=int, default=0)
    p_metrics.add_argument("--invert-node-metric", action="store_true")
    p_metrics.add_argument("--betweenness-sample", type=int,
                           help="estimate betweenness from this many seeded sources")
    p_metrics.add_argument("--out", help="output path (default: stdout)")
    p_metrics.set_defaults(func=cmd_metrics)

    p_sweep = sub.add_parser("sweep", help="budget x seed sweep to CSV/JSON")
    _add_graph_args(p_sweep)
    p_sweep.add_argument("--algo", required=True, choices=["exhaustive", "netgreedy", "commgreedy"])
    p_sweep.add_argument("--value-fn", default="modularity", choices=VALUE_FUNCTIONS)
    p_sweep.add_argument("--budgets", required=True, help="comma-separated, ints or fractions")
    p_sweep.add_argument("--seeds", required=True, help="comma-separated seeds")
    p_sweep.add_argument("--node-metric", choices=NODE_METRICS)
    p_sweep.add_argument("--community-metric", choices=COMMUNITY_METRICS)
    p_sweep.add_argument("--batch", type=int, default=1)
    p_sweep.add_argument("--timing", action="store_true",
                         help="record wall times (makes output non-reproducible)")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, EdgeListParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

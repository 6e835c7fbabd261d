"""Community-structure vulnerability analysis.

Find the k nodes of an undirected network whose removal most damages its
community structure, under three value functions (modularity difference,
NMI, ARI) and three search strategies (exhaustive, network greedy,
hierarchical community greedy), with an extrinsic task harness (link
prediction, independent-cascade diffusion).

Hot kernels run in a compiled extension when available; set
COMMVULN_PURE_PYTHON=1 to force the pure-Python fallback.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND, HAVE_SPEEDUPS
from .attack import (
    ALGORITHMS,
    AttackResult,
    AttackSpec,
    Detector,
    EnumerationCapExceeded,
    community_greedy_attack,
    exhaustive_attack,
    network_greedy_attack,
    resolve_budget,
    run_attack,
)
from .compare import (
    ContingencyTable,
    DamageScore,
    ValueFunctionId,
    ari,
    evaluate,
    modularity,
    nmi,
    restrict,
)
from .experiment import ExperimentConfig, ResultRow, emit, fixture, run_experiment
from .graph import (
    EdgeListParseError,
    Graph,
    connected_components,
    from_edges,
    induced_subgraph,
    load_edge_list,
    remove_nodes,
    shortest_path_lengths,
)
from .louvain import (
    DetectorConfig,
    Partition,
    aggregate_graph,
    detect_communities,
    local_move_pass,
    partition_from_labels,
    read_partition,
    write_partition,
)
from .metrics import (
    CommunityMetricId,
    MetricVector,
    NodeMetricId,
    community_metric,
    node_metric,
    rank_nodes,
    wiener_index,
)
from .tasks import (
    DiffusionConfig,
    LinkPredConfig,
    TaskReport,
    independent_cascade,
    link_prediction_f1,
    run_task,
    score_pair,
    split_edges,
)

__all__ = [
    "ALGORITHMS",
    "AttackResult",
    "AttackSpec",
    "BACKEND",
    "CommunityMetricId",
    "ContingencyTable",
    "DamageScore",
    "Detector",
    "DetectorConfig",
    "DiffusionConfig",
    "EdgeListParseError",
    "EnumerationCapExceeded",
    "ExperimentConfig",
    "Graph",
    "HAVE_SPEEDUPS",
    "LinkPredConfig",
    "MetricVector",
    "NodeMetricId",
    "Partition",
    "ResultRow",
    "TaskReport",
    "ValueFunctionId",
    "aggregate_graph",
    "ari",
    "community_greedy_attack",
    "community_metric",
    "connected_components",
    "detect_communities",
    "emit",
    "evaluate",
    "exhaustive_attack",
    "fixture",
    "from_edges",
    "independent_cascade",
    "induced_subgraph",
    "link_prediction_f1",
    "load_edge_list",
    "local_move_pass",
    "modularity",
    "network_greedy_attack",
    "nmi",
    "node_metric",
    "partition_from_labels",
    "rank_nodes",
    "read_partition",
    "remove_nodes",
    "resolve_budget",
    "restrict",
    "run_attack",
    "run_experiment",
    "run_task",
    "score_pair",
    "shortest_path_lengths",
    "split_edges",
    "wiener_index",
    "write_partition",
]

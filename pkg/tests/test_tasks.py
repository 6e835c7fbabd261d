"""Link prediction and independent-cascade diffusion."""
from __future__ import annotations

import numpy as np
import pytest

from commvuln import (
    AttackResult,
    AttackSpec,
    CommunityMetricId,
    DamageScore,
    DetectorConfig,
    DiffusionConfig,
    LinkPredConfig,
    NodeMetricId,
    ValueFunctionId,
    community_greedy_attack,
    detect_communities,
    fixture,
    from_edges,
    independent_cascade,
    link_prediction_f1,
    partition_from_labels,
    run_task,
    score_pair,
    split_edges,
)

import oracles


def null_attack(vf=ValueFunctionId.MODULARITY_DIFF) -> AttackResult:
    return AttackResult(
        algorithm="none",
        value_function=vf,
        node_metric=None,
        community_metric=None,
        k=0,
        selected=(),
        score=DamageScore(0.0, 0.0),
        trace=(),
        seed=0,
        batch_size=1,
    )


class TestSplitEdges:
    def test_karate_counts(self):
        g, _ = fixture("karate")
        train, test = split_edges(g, LinkPredConfig(test_fraction=0.2, rng_seed=7))
        assert len(test) == 16
        assert train.m == 62
        assert train.n == g.n

    def test_minimum_one_edge_held_out(self):
        g, _ = fixture("karate")
        train, test = split_edges(g, LinkPredConfig(test_fraction=0.001, rng_seed=1))
        assert len(test) == 1
        assert train.m == g.m - 1

    def test_same_seed_same_split(self):
        g, _ = fixture("football")
        a = split_edges(g, LinkPredConfig(rng_seed=13))
        b = split_edges(g, LinkPredConfig(rng_seed=13))
        assert a[1] == b[1]
        assert a[0] == b[0]

    def test_held_out_edges_disjoint_from_train(self):
        g, _ = fixture("karate")
        train, test = split_edges(g, LinkPredConfig(rng_seed=3))
        train_edges = set(oracles.edge_list(train))
        assert not train_edges & set(test)
        assert train_edges | set(test) == set(oracles.edge_list(g))

    def test_tiny_graph_rejected(self):
        g = from_edges(2, [(0, 1)])
        with pytest.raises(ValueError):
            split_edges(g, LinkPredConfig(test_fraction=0.9))


class TestScorePair:
    def setup_method(self):
        # two communities {0,1,2,3} and {4,5}; z=1 is a hub
        self.g = from_edges(6, [(0, 1), (1, 2), (1, 3), (1, 4), (4, 5), (3, 5)])
        self.p = partition_from_labels(np.arange(6), np.array([0, 0, 0, 0, 1, 1]))

    def test_no_common_neighbors_scores_zero(self):
        for scorer in ("within_inter_cluster", "modified_common_neighbors",
                       "modified_resource_allocation"):
            assert score_pair(self.g, self.p, 0, 5, scorer) == 0.0

    def test_single_within_common_neighbor(self):
        # candidates 0 and 2 share only z=1 (same community, degree 4)
        assert score_pair(self.g, self.p, 0, 2, "within_inter_cluster") == pytest.approx(1000.0)
        assert score_pair(self.g, self.p, 0, 2, "modified_common_neighbors") == 2.0
        assert score_pair(self.g, self.p, 0, 2, "modified_resource_allocation") == pytest.approx(0.5)

    def test_cross_community_wic_zero(self):
        # 3 and 4 are in different communities but share neighbors 1 and 5
        assert score_pair(self.g, self.p, 3, 4, "within_inter_cluster") == 0.0
        assert score_pair(self.g, self.p, 3, 4, "modified_common_neighbors") == 2.0


class TestLinkPredictionF1:
    def test_perfect_scorer_reaches_one(self):
        # strongly clustered graph: WIC separates intra-community test edges
        g, gt = fixture("two_triangles")
        big = from_edges(
            10,
            [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4),
             (5, 6), (5, 7), (5, 8), (5, 9), (6, 7), (6, 8), (6, 9), (7, 8), (7, 9), (8, 9),
             (0, 5)],
        )
        p = partition_from_labels(np.arange(10), np.array([0] * 5 + [1] * 5))
        f1 = link_prediction_f1(big, p, LinkPredConfig(test_fraction=0.2, rng_seed=5))
        assert f1 == 1.0

    def test_random_partition_near_half(self):
        g, _ = fixture("karate")
        rng = np.random.default_rng(0)
        scores = []
        for seed in range(60):
            labels = rng.integers(0, 8, size=g.n)
            p = partition_from_labels(g.node_ids, labels)
            scores.append(
                link_prediction_f1(g, p, LinkPredConfig(scorer="within_inter_cluster",
                                                        rng_seed=seed))
            )
        assert 0.3 <= float(np.mean(scores)) <= 0.7

    def test_precision_equals_recall_by_protocol(self):
        g, _ = fixture("football")
        p = detect_communities(g)
        f1 = link_prediction_f1(g, p, LinkPredConfig(rng_seed=2))
        _, test = split_edges(g, LinkPredConfig(rng_seed=2))
        assert f1 == pytest.approx(round(f1 * len(test)) / len(test))
        assert 0.0 <= f1 <= 1.0

    def test_deterministic(self):
        g, _ = fixture("karate")
        p = detect_communities(g)
        cfg = LinkPredConfig(rng_seed=11)
        assert link_prediction_f1(g, p, cfg) == link_prediction_f1(g, p, cfg)


class TestIndependentCascade:
    def test_zero_probability_keeps_only_seeds(self):
        g, _ = fixture("karate")
        p = detect_communities(g)
        cfg = DiffusionConfig(p_in=0.0, p_out=0.0, seed_fraction=0.1, runs=20, rng_seed=4)
        frac = independent_cascade(g, p, cfg)
        assert frac == pytest.approx(round(0.1 * 34) / 34)

    def test_probability_one_floods_components(self):
        g = from_edges(6, [(0, 1), (1, 2), (3, 4)])  # node 5 isolated
        p = partition_from_labels(np.arange(6), np.zeros(6, dtype=np.int64))
        cfg = DiffusionConfig(p_in=1.0, p_out=1.0, seed_fraction=0.17, runs=40, rng_seed=2)
        frac, details = independent_cascade(g, p, cfg, return_details=True)
        for run in details:
            comps = {frozenset({0, 1, 2}), frozenset({3, 4}), frozenset({5})}
            active = set(run["active"])
            for comp in comps:
                if comp & set(run["seeds"]):
                    assert comp <= active

    def test_single_edge_closed_form(self):
        g = from_edges(2, [(0, 1)])
        p = partition_from_labels(np.arange(2), np.zeros(2, dtype=np.int64))
        cfg = DiffusionConfig(p_in=0.7, p_out=0.3, seed_fraction=0.5, runs=20000, rng_seed=9)
        frac = independent_cascade(g, p, cfg)
        assert frac == pytest.approx(0.85, abs=0.02)

    def test_active_set_has_activation_parents(self):
        g, _ = fixture("karate")
        p = detect_communities(g)
        cfg = DiffusionConfig(runs=30, seed_fraction=0.05, rng_seed=6)
        _, details = independent_cascade(g, p, cfg, return_details=True)
        adj = oracles.adj_sets(g)
        for run in details:
            seeds = set(run["seeds"])
            for node in run["active"]:
                if node in seeds:
                    continue
                parent = run["parents"][node]
                assert parent is not None and parent in adj[node]
                assert parent in run["active"]

    def test_monotone_in_probabilities(self):
        g, _ = fixture("railway")
        p = detect_communities(g)
        means = []
        for prob in (0.1, 0.5, 0.9):
            cfg = DiffusionConfig(p_in=prob, p_out=prob, seed_fraction=0.01, runs=200, rng_seed=3)
            means.append(independent_cascade(g, p, cfg))
        assert means[0] < means[1] < means[2]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            DiffusionConfig(p_in=0.2, p_out=0.5)
        with pytest.raises(ValueError):
            DiffusionConfig(runs=0)


class TestRunTask:
    def test_empty_attack_zero_delta(self):
        g, _ = fixture("karate")
        for cfg in (LinkPredConfig(rng_seed=5), DiffusionConfig(runs=50, rng_seed=5)):
            report = run_task(g, null_attack(), cfg, DetectorConfig(rng_seed=0))
            assert report.metric_original == report.metric_perturbed
            assert report.delta == 0.0

    def test_delta_is_difference(self):
        g, _ = fixture("railway")
        attack = community_greedy_attack(
            g,
            AttackSpec(
                budget=10,
                value_function=ValueFunctionId.MODULARITY_DIFF,
                detector=DetectorConfig(rng_seed=1),
                node_metric=NodeMetricId.EIGENVECTOR,
                community_metric=CommunityMetricId.LINK_DENSITY,
            ),
        )
        report = run_task(g, attack, DiffusionConfig(runs=50, rng_seed=2), DetectorConfig(rng_seed=1))
        assert report.delta == report.metric_original - report.metric_perturbed
        assert report.task == "diffusion"

    def test_reports_are_reproducible(self):
        g, _ = fixture("karate")
        cfg = LinkPredConfig(rng_seed=8)
        a = run_task(g, null_attack(), cfg, DetectorConfig(rng_seed=2))
        b = run_task(g, null_attack(), cfg, DetectorConfig(rng_seed=2))
        assert a.to_json_dict() == b.to_json_dict()


class TestProtocolCalibration:
    def test_truly_random_scores_give_half_f1(self, monkeypatch):
        # with a score-free ranking, predicting top-|positives| from balanced
        # candidates recovers half the positives in expectation
        from commvuln import tasks as tasks_mod

        g, _ = fixture("karate")
        p = detect_communities(g)
        state = {"rng": None}

        def random_scorer(train, partition, u, v, scorer):
            return float(state["rng"].random())

        monkeypatch.setattr(tasks_mod, "score_pair", random_scorer)
        scores = []
        for seed in range(100):
            state["rng"] = np.random.default_rng(seed)
            scores.append(link_prediction_f1(g, p, LinkPredConfig(rng_seed=seed)))
        assert 0.4 <= float(np.mean(scores)) <= 0.6

"""Graph construction, ingestion, removal and traversal."""
from __future__ import annotations

import io
import itertools

import numpy as np
import pytest

from commvuln import (
    EdgeListParseError,
    connected_components,
    fixture,
    from_edges,
    induced_subgraph,
    load_edge_list,
    remove_nodes,
    shortest_path_lengths,
)

import oracles


def load_text(text: str, **kwargs):
    return load_edge_list(io.StringIO(text), **kwargs)


class TestLoadEdgeList:
    def test_triangle(self):
        g = load_text("0 1\n1 2\n2 0\n")
        assert (g.n, g.m) == (3, 3)

    def test_karate_counts(self):
        g, _ = fixture("karate")
        assert (g.n, g.m) == (34, 78)

    def test_duplicates_and_self_loops_dropped(self):
        g = load_text("0 1\n0 1\n3 3\n", relabel=False)
        assert (g.n, g.m) == (4, 1)
        assert g.load_report.duplicates == 1
        assert g.load_report.self_loops == 1

    def test_dedup_counts_with_relabeling(self):
        g = load_text("0 1\n0 1\n3 3\n")
        # first-seen relabeling maps tokens {0,1,3} to ids {0,1,2}
        assert (g.n, g.m) == (3, 1)
        assert g.load_report.duplicates == 1
        assert g.load_report.self_loops == 1

    def test_reversed_duplicate_dropped(self):
        g = load_text("0 1\n1 0\n")
        assert g.m == 1
        assert g.load_report.duplicates == 1

    def test_comments_and_blank_lines(self):
        g = load_text("# a comment\n\n0 1\n# another\n1 2\n")
        assert (g.n, g.m) == (3, 2)

    def test_weights_third_column(self):
        g = load_text("0 1 2.5\n1 2 1.0\n")
        assert g.is_weighted
        assert float(g.weights.max()) == 2.5

    def test_malformed_line_reports_number(self):
        with pytest.raises(EdgeListParseError) as exc:
            load_text("0 1\nbroken\n")
        assert "line 2" in str(exc.value)

    def test_non_positive_weight_rejected(self):
        with pytest.raises(EdgeListParseError):
            load_text("0 1 0\n")

    def test_empty_input_rejected(self):
        with pytest.raises(EdgeListParseError):
            load_text("# nothing\n")

    def test_relabel_first_seen_order(self):
        g = load_text("b a\nc b\n")
        assert g.labels == ("b", "a", "c")
        assert sorted(int(x) for x in g.neighbors(0)) == [1, 2]

    def test_no_relabel_keeps_gaps_as_isolated(self):
        g = load_text("0 5\n", relabel=False)
        assert g.n == 6
        assert g.m == 1

    def test_degree_sum_and_symmetry_on_fixtures(self):
        for name in ("karate", "football", "railway", "two_triangles"):
            g, _ = fixture(name)
            assert int(g.degrees.sum()) == 2 * g.m
            adj = oracles.adj_sets(g)
            for u, nbrs in adj.items():
                for v in nbrs:
                    assert u in adj[v]
                assert u not in nbrs

    def test_load_twice_is_identical(self):
        text = "0 1\n1 2\n2 3\n3 0\n"
        assert load_text(text) == load_text(text)


class TestRemoveAndInduce:
    def test_triangle_minus_one(self):
        g = load_text("0 1\n1 2\n2 0\n")
        h = remove_nodes(g, [2])
        assert (h.n, h.m) == (2, 1)
        assert list(h.node_ids) == [0, 1]

    def test_star_center_removed(self):
        g, _ = fixture("star5")
        h = remove_nodes(g, [0])
        assert (h.n, h.m) == (4, 0)

    def test_karate_removal_matches_direct_scan(self):
        g, _ = fixture("karate")
        removed = {0, 1, 3, 5, 6}
        h = remove_nodes(g, sorted(removed))
        assert h.n == 29
        survivors = set(int(x) for x in h.node_ids)
        expected_m = sum(
            1 for u, v in oracles.edge_list(g) if u in survivors and v in survivors
        )
        assert h.m == expected_m

    def test_remove_all_rejected(self):
        g = load_text("0 1\n")
        with pytest.raises(ValueError):
            remove_nodes(g, [0, 1])

    def test_induced_triangle_edge(self):
        g = load_text("0 1\n1 2\n2 0\n")
        h = induced_subgraph(g, [0, 1])
        assert (h.n, h.m) == (2, 1)

    def test_induced_full_is_identity(self):
        g, _ = fixture("karate")
        assert induced_subgraph(g, [int(x) for x in g.node_ids]) == g

    def test_induced_one_triangle_of_two(self):
        g, _ = fixture("two_triangles")
        h = induced_subgraph(g, [0, 1, 2])
        expected_m = sum(1 for u, v in oracles.edge_list(g) if u < 3 and v < 3)
        assert (h.n, h.m) == (3, expected_m) == (3, 3)

    def test_remove_equals_complement_induce(self):
        g, _ = fixture("karate")
        rng = np.random.default_rng(5)
        for _ in range(10):
            s = sorted(int(x) for x in rng.choice(34, size=6, replace=False))
            keep = sorted(set(range(34)) - set(s))
            assert remove_nodes(g, s) == induced_subgraph(g, keep)

    def test_identity_preserving_ids(self):
        g, _ = fixture("karate")
        h = remove_nodes(g, [0, 33])
        assert 0 not in h.node_ids and 33 not in h.node_ids
        assert set(int(x) for x in h.node_ids) < set(range(34))


class TestTraversal:
    def test_path_distances(self):
        g = load_text("0 1\n1 2\n")
        assert shortest_path_lengths(g, 0) == {0: 0, 1: 1, 2: 2}

    def test_unreachable_omitted(self):
        g = load_text("0 1\n2 3\n")
        assert shortest_path_lengths(g, 0) == {0: 0, 1: 1}

    def test_karate_matches_matrix_power_oracle(self):
        g, _ = fixture("karate")
        assert shortest_path_lengths(g, 0) == oracles.distances_by_matrix_power(g, 0)

    def test_triangle_inequality_sampled(self):
        g, _ = fixture("railway")
        rng = np.random.default_rng(11)
        dist = {int(s): shortest_path_lengths(g, int(s)) for s in rng.choice(301, 8, replace=False)}
        sources = list(dist)
        for u, v in itertools.combinations(sources, 2):
            for w in sources:
                if v in dist[u] and v in dist[w] and w in dist[u]:
                    assert dist[u][v] <= dist[u][w] + dist[w][v]

    def test_components_triangle(self):
        g = load_text("0 1\n1 2\n2 0\n")
        comps = connected_components(g)
        assert len(comps) == 1 and len(comps[0]) == 3

    def test_components_with_isolated(self):
        g = load_text("0 1\n1 2\n2 0\n3 4\n", relabel=False)
        g = remove_nodes(g, [4])
        comps = connected_components(g)
        assert sorted(len(c) for c in comps) == [1, 3]

    def test_components_match_union_find(self):
        edges = oracles.random_graph(20, 0.05, seed=3)
        g = from_edges(20, edges)
        ours = [set(int(x) for x in c) for c in connected_components(g)]
        assert ours == oracles.components_union_find(g)

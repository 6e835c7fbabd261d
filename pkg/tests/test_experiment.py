"""Experiment pipeline, emission formats, fixture registry, CLI surface."""
from __future__ import annotations

import json
import subprocess
import sys

import pytest

from commvuln import (
    AttackSpec,
    DetectorConfig,
    ExperimentConfig,
    ValueFunctionId,
    emit,
    fixture,
    run_attack,
    run_experiment,
)
from commvuln.experiment import ResultRow, parse_rows_json


def run_cli(*args, timeout=600):
    return subprocess.run(
        [sys.executable, "-m", "commvuln.cli", *args],
        capture_output=True,
        text=True,
        timeout=timeout,
    )


class TestFixtures:
    def test_table_counts(self):
        for name, (n, m, c) in {
            "karate": (34, 78, 2),
            "football": (115, 613, 12),
            "railway": (301, 1224, 21),
        }.items():
            g, gt = fixture(name)
            assert (g.n, g.m) == (n, m)
            assert gt.num_communities == c

    def test_unknown_fixture(self):
        with pytest.raises(ValueError):
            fixture("nope")

    def test_user_supplied_requires_path(self):
        with pytest.raises(ValueError):
            fixture("coauthorship")

    def test_user_supplied_count_mismatch_warns(self, tmp_path):
        p = tmp_path / "tiny.edges"
        p.write_text("0 1\n1 2\n")
        with pytest.warns(RuntimeWarning, match="different variant"):
            g, gt = fixture("coauthorship", str(p))
        assert g.n == 3 and gt is None


class TestRunExperiment:
    def test_netgreedy_sweep_row_count(self):
        cfg = ExperimentConfig(
            dataset="karate",
            algorithm="netgreedy",
            budgets=tuple(range(1, 6)),
            seeds=(0,),
        )
        rows = run_experiment(cfg)
        assert len(rows) == 50  # 5 budgets x 10 node metrics
        assert [r.budget for r in rows] == sorted(r.budget for r in rows)

    def test_rows_reproduce_attack_scores(self):
        cfg = ExperimentConfig(
            dataset="two_triangles",
            algorithm="commgreedy",
            value_function=ValueFunctionId.NMI,
            budgets=(2,),
            seeds=(3, 4),
            node_metric="degree",
            community_metric="link_density",
        )
        rows = run_experiment(cfg)
        assert len(rows) == 2
        g, _ = fixture("two_triangles")
        for row in rows:
            spec = AttackSpec(
                budget=row.budget,
                value_function=ValueFunctionId(row.value_function),
                detector=DetectorConfig(rng_seed=row.seed),
                node_metric=row.node_metric,
                community_metric=row.community_metric,
            )
            res = run_attack(row.algorithm, g, spec)
            assert res.score.raw == row.raw
            assert res.score.damage == row.damage

    def test_exhaustive_single_row(self):
        cfg = ExperimentConfig(
            dataset="two_triangles", algorithm="exhaustive", budgets=(1,), seeds=(0,)
        )
        rows = run_experiment(cfg)
        assert len(rows) == 1
        assert rows[0].node_metric == "" and rows[0].community_metric == ""


class TestEmit:
    def test_header_only_csv(self, tmp_path):
        out = tmp_path / "rows.csv"
        emit([], out, "csv")
        assert out.read_text().strip() == ",".join(ResultRow.FIELDS)

    def test_one_row_csv(self, tmp_path):
        row = ResultRow("karate", "netgreedy", "nmi", "degree", "", 5, 0, 0.5, 0.5, 0)
        out = tmp_path / "rows.csv"
        emit([row], out, "csv")
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert lines[1] == "karate,netgreedy,nmi,degree,,5,0,0.500000,0.500000,0"

    def test_json_round_trip(self, tmp_path):
        rows = [
            ResultRow("karate", "netgreedy", "ari", "degree", "", 2, 7, 0.123456, 0.876544, 0),
            ResultRow("karate", "netgreedy", "ari", "coreness", "", 2, 7, -0.25, 1.25, 0),
        ]
        out = tmp_path / "rows.json"
        emit(rows, out, "json")
        assert parse_rows_json(out.read_text()) == rows


class TestCli:
    def test_attack_json_and_determinism(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = [
            "attack", "--fixture", "karate", "--algo", "netgreedy", "--value-fn", "nmi",
            "--k", "5", "--node-metric", "degree", "--seed", "3",
        ]
        r1 = run_cli(*args, "--out", str(a))
        r2 = run_cli(*args, "--out", str(b))
        assert r1.returncode == 0 and r2.returncode == 0
        assert a.read_bytes() == b.read_bytes()
        payload = json.loads(a.read_text())
        assert payload["algorithm"] == "netgreedy"
        assert len(payload["selected"]) == 5
        assert set(payload) == {
            "algorithm", "value_function", "node_metric", "community_metric", "k",
            "selected", "raw", "damage", "trace", "seed", "batch_size",
        }

    def test_task_diffusion(self, tmp_path):
        out = tmp_path / "t.json"
        r = run_cli(
            "task", "--task", "diffusion", "--fixture", "two_triangles",
            "--algo", "commgreedy", "--value-fn", "modularity", "--k", "1",
            "--node-metric", "degree", "--community-metric", "link_density",
            "--runs", "20", "--seed-fraction", "0.2", "--out", str(out),
        )
        assert r.returncode == 0, r.stderr
        payload = json.loads(out.read_text())
        assert payload["task"] == "diffusion"
        assert payload["delta"] == pytest.approx(
            payload["metric_original"] - payload["metric_perturbed"]
        )

    def test_metrics_csv(self, tmp_path):
        out = tmp_path / "m.csv"
        r = run_cli("metrics", "--fixture", "star5", "--metric", "degree", "--out", str(out))
        assert r.returncode == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "node_id,score"
        assert lines[1].startswith("0,4.0")

    def test_sweep_csv_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = [
            "sweep", "--fixture", "two_triangles", "--algo", "netgreedy",
            "--budgets", "1,2", "--seeds", "0,1", "--node-metric", "degree",
            "--format", "csv",
        ]
        assert run_cli(*args, "--out", str(a)).returncode == 0
        assert run_cli(*args, "--out", str(b)).returncode == 0
        assert a.read_bytes() == b.read_bytes()

    def test_exit_code_config_error(self):
        r = run_cli("attack", "--fixture", "nope", "--algo", "netgreedy", "--k", "2",
                    "--node-metric", "degree")
        assert r.returncode == 2
        assert "error" in r.stderr

    def test_exit_code_infeasible(self):
        r = run_cli(
            "attack", "--fixture", "karate", "--algo", "exhaustive", "--k", "5",
            "--cap", "100",
        )
        assert r.returncode == 3
        assert "cap" in r.stderr

    def test_graph_file_input(self, tmp_path):
        p = tmp_path / "g.edges"
        p.write_text("# demo\na b\nb c\nc a\n")
        r = run_cli("attack", "--graph", str(p), "--algo", "exhaustive", "--k", "1")
        assert r.returncode == 0
        assert json.loads(r.stdout)["k"] == 1

    def test_version_reports_backend(self):
        r = run_cli("--version")
        assert r.returncode == 0
        assert "kernels:" in r.stdout


class TestCliCsvFormat:
    def test_attack_csv_row(self, tmp_path):
        out = tmp_path / "row.csv"
        r = run_cli(
            "attack", "--fixture", "two_triangles", "--algo", "netgreedy",
            "--value-fn", "ari", "--k", "2", "--node-metric", "degree",
            "--format", "csv", "--out", str(out),
        )
        assert r.returncode == 0, r.stderr
        lines = out.read_text().splitlines()
        assert lines[0].startswith("dataset,algorithm,")
        assert lines[1].startswith("two_triangles,netgreedy,ari,degree,")

import json
import os
import subprocess
import sys

import pytest

from dpplab import DEFAULT_SEED
from dpplab.cli import dispatch


def run_cli(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err or out
    return json.loads(out)


def run_proc(*argv, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "dpplab.cli", *argv],
        capture_output=True,
        env=env,
    )


class TestEnvelope:
    def test_distance_pmf_example(self, capsys):
        doc = run_json(capsys, "ust", "exact", "--n", "4", "--stat", "distance")
        assert doc["command"] == "ust exact"
        assert doc["seed"] == DEFAULT_SEED
        assert doc["results"]["n"] == 4
        assert doc["results"]["statistic"] == "distance_pmf"
        assert doc["results"]["values"] == [0.5, 0.375, 0.125]
        assert doc["timing_ms"] is None
        assert doc["params"]["n"] == 4

    def test_timing_flag(self, capsys):
        doc = run_json(
            capsys, "ust", "exact", "--n", "4", "--stat", "distance", "--timing"
        )
        assert isinstance(doc["timing_ms"], float)

    def test_seed_recorded(self, capsys):
        doc = run_json(
            capsys, "ust", "exact", "--n", "3", "--stat", "distance", "--seed", "42"
        )
        assert doc["seed"] == 42


class TestExitCodes:
    def test_success_is_zero(self, capsys):
        code, _, _ = run_cli(capsys, "ust", "exact", "--n", "3", "--stat", "distance")
        assert code == 0

    def test_failed_check_is_one(self, capsys):
        code, out, _ = run_cli(
            capsys,
            "dominate",
            "exact",
            "--elements", '["a","b","c"]',
            "--pairs", '[["a","b"],["a","c"]]',
            "--p1", '{"a": 0.33333333333333333, "b": 0.33333333333333333, "c": 0.33333333333333334}',
            "--p2", '{"a": 0.11111111111111111, "b": 0.16666666666666666, "c": 0.72222222222222223}',
        )
        assert code == 1
        doc = json.loads(out)
        assert doc["results"]["verdict"] is False
        assert doc["results"]["margin"] == pytest.approx(-1 / 6, abs=1e-9)
        assert doc["results"]["witness"] == ["b"]

    def test_usage_error_is_two(self, capsys):
        code, _, err = run_cli(capsys, "ust", "exact", "--n", "4", "--stat", "girth")
        assert code == 2
        assert err

    def test_unknown_flag_is_two(self, capsys):
        code, _, _ = run_cli(capsys, "ust", "exact", "--n", "4", "--frobnicate")
        assert code == 2

    def test_precondition_error_is_two(self, capsys):
        # non-orthonormal rows cannot form a projection frame
        code, _, err = run_cli(
            capsys, "dpp", "law", "--rows", "[[1.0, 1.0], [0.0, 1.0]]"
        )
        assert code == 2
        assert "precondition" in err

    def test_csv_unavailable_for_dominate(self, capsys):
        code, _, _ = run_cli(
            capsys,
            "dominate", "lyons",
            "--ground", "3", "--rank", "1", "--trials", "1",
            "--format", "csv",
        )
        assert code == 2


class TestDpp:
    def test_admissible(self, capsys):
        doc = run_json(
            capsys, "dpp", "admissible", "--matrix", "[[0.5, 0.2], [0.2, 0.4]]"
        )
        assert doc["results"]["admissible"] is True

    def test_inadmissible_exits_one(self, capsys):
        code, out, _ = run_cli(
            capsys, "dpp", "admissible", "--matrix", "[[1.5, 0.0], [0.0, 0.4]]"
        )
        assert code == 1
        assert json.loads(out)["results"]["admissible"] is False

    def test_mixed_probability(self, capsys):
        doc = run_json(
            capsys,
            "dpp", "prob",
            "--matrix", "[[0.5, 0.2], [0.2, 0.4]]",
            "--inside", "1,2",
        )
        assert doc["results"]["probability"] == pytest.approx(0.16)
        doc = run_json(
            capsys,
            "dpp", "prob",
            "--matrix", "[[0.5, 0.2], [0.2, 0.4]]",
            "--inside", "1",
            "--outside", "2",
        )
        assert doc["results"]["probability"] == pytest.approx(0.34)

    def test_law_json_and_csv(self, capsys):
        rows = "[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]"
        doc = run_json(capsys, "dpp", "law", "--rows", rows)
        assert doc["results"]["size"] == 2
        code, out, _ = run_cli(
            capsys, "dpp", "law", "--rows", rows, "--format", "csv"
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "subset,probability"
        assert any(line.startswith("1-2,") for line in lines[1:])

    def test_sample_replicas(self, capsys):
        doc = run_json(
            capsys,
            "dpp", "sample",
            "--rows", "[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]",
            "--num", "3",
            "--replicas", "2",
        )
        assert doc["results"]["rank"] == 2
        assert len(doc["results"]["draws"]) == 6
        for draw in doc["results"]["draws"]:
            assert len(draw) == 2


class TestUst:
    def test_exact_subset(self, capsys):
        doc = run_json(
            capsys, "ust", "exact", "--n", "5", "--stat", "subset",
            "--inside", "1-2",
        )
        assert doc["results"]["values"] == [0.4]

    def test_exact_degree(self, capsys):
        doc = run_json(capsys, "ust", "exact", "--n", "5", "--stat", "degree", "--k", "1")
        assert doc["results"]["values"] == [1.6]

    def test_exact_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "ust", "exact", "--n", "4", "--stat", "distance",
            "--format", "csv",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "index,value"
        assert lines[1] == "0,0.5"

    def test_sample_edges_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "ust", "sample", "--n", "4", "--num", "2",
            "--stat", "edges", "--format", "csv", "--seed", "1",
        )
        assert code == 0
        blocks = out.strip().split("\n\n")
        assert len(blocks) == 2
        for block in blocks:
            rows = block.splitlines()
            assert len(rows) == 3
            for row in rows:
                u, v = row.split()
                assert 1 <= int(u) <= 4 and 1 <= int(v) <= 4

    def test_verify_uniform(self, capsys):
        doc = run_json(
            capsys, "ust", "verify", "--n", "4", "--stat", "uniform",
            "--num", "8000",
        )
        assert doc["results"]["verdict"] is True
        assert doc["results"]["value"] < doc["results"]["critical"]
        assert doc["results"]["df"] == 15

    def test_verify_distance(self, capsys):
        doc = run_json(
            capsys, "ust", "verify", "--n", "5", "--stat", "distance",
            "--num", "4000",
        )
        assert doc["results"]["verdict"] is True


class TestEnsembleAndLpp:
    def test_ensemble_sample_csv_with_sidecar(self, capsys, tmp_path):
        out_path = tmp_path / "draws.csv"
        code, _, _ = run_cli(
            capsys,
            "ensemble", "sample",
            "--kind", "wishart", "--m", "2", "--n", "3",
            "--num", "4", "--format", "csv", "--out", str(out_path),
            "--seed", "9",
        )
        assert code == 0
        rows = out_path.read_text().strip().splitlines()
        assert len(rows) == 4
        for row in rows:
            vals = [float(x) for x in row.split(",")]
            assert len(vals) == 2 and vals[0] <= vals[1]
        sidecar = json.loads((tmp_path / "draws.csv.json").read_text())
        assert sidecar["seed"] == 9
        assert sidecar["N"] == 4
        assert sidecar["spec"]["kind"] == "wishart"

    def test_ensemble_density(self, capsys):
        doc = run_json(
            capsys,
            "ensemble", "density",
            "--kind", "wishart", "--m", "1", "--n", "3",
            "--at", "2.0",
        )
        assert doc["results"]["log_normalizer"] == pytest.approx(0.6931471805599453)

    def test_ensemble_kernel(self, capsys):
        doc = run_json(
            capsys,
            "ensemble", "kernel",
            "--kind", "meixner", "--m", "2", "--n", "2", "--q", "0.5",
            "--cutoff", "20",
        )
        assert len(doc["results"]["rows"]) == 2
        assert doc["results"]["spec"]["q"] == 0.5

    def test_lpp_sample(self, capsys):
        doc = run_json(
            capsys,
            "lpp", "sample", "--kind", "constant", "--value", "1.0",
            "--m", "3", "--n", "3", "--num", "2",
        )
        assert doc["results"]["values"] == [5.0, 5.0]

    def test_lpp_bridge(self, capsys):
        doc = run_json(
            capsys,
            "lpp", "bridge", "--kind", "exponential",
            "--m", "2", "--n", "2", "--num", "3000",
        )
        assert doc["results"]["verdict"] is True
        assert doc["results"]["statistic"] < doc["results"]["critical"]
        assert doc["results"]["shift"] == 0.0


class TestDominate:
    def test_lyons_trials(self, capsys):
        doc = run_json(
            capsys,
            "dominate", "lyons", "--ground", "4", "--rank", "1", "--trials", "20",
        )
        assert doc["results"]["verdict"] is True
        assert doc["results"]["min_flow_margin"] >= -1e-10

    def test_vandermonde(self, capsys):
        doc = run_json(
            capsys,
            "dominate", "vandermonde",
            "--weight", "geometric", "--q", "0.5",
            "--factor", "linear", "--rank", "1", "--cutoff", "10",
        )
        assert doc["results"]["verdict"] is True

    def test_ratio(self, capsys):
        doc = run_json(
            capsys,
            "dominate", "ratio",
            "--weights", "[1.0, 1.0, 1.0]",
            "--f", "[0.1, 0.3, 0.6]",
            "--g", "[0.6, 0.3, 0.1]",
        )
        assert doc["results"]["verdict"] is True

    def test_empirical_sources(self, capsys):
        doc = run_json(
            capsys,
            "dominate", "empirical",
            "--left", "wishart:2,4",
            "--right", "wishart:3,3",
            "--num", "4000", "--delta", "0.01",
        )
        assert doc["results"]["verdict"] == "dominates"
        assert doc["results"]["margin"] > 0

    def test_identities(self, capsys):
        doc = run_json(capsys, "dominate", "identities", "--which", "discrete")
        assert doc["results"]["verdict"] is True

    def test_flow_coupling(self, capsys):
        doc = run_json(
            capsys,
            "dominate", "flow",
            "--elements", '["a","b"]',
            "--pairs", '[["a","b"]]',
            "--p1", '{"a": 1.0}',
            "--p2", '{"b": 1.0}',
        )
        assert doc["results"]["verdict"] is True
        assert doc["results"]["margin"] == pytest.approx(0.0, abs=1e-9)
        assert doc["results"]["method"] == "flow"


class TestConfigAndSeeds:
    def test_config_file_supplies_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# defaults\nn = 4\nstat = distance\n")
        doc = run_json(capsys, "ust", "exact", "--config", str(cfg))
        assert doc["results"]["values"] == [0.5, 0.375, 0.125]

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n = 4\nstat = distance\n")
        doc = run_json(capsys, "ust", "exact", "--n", "3", "--config", str(cfg))
        assert doc["results"]["n"] == 3

    def test_unknown_config_key(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("banana = 7\n")
        code, _, _ = run_cli(capsys, "ust", "exact", "--n", "4", "--stat",
                             "distance", "--config", str(cfg))
        assert code == 2

    def test_out_writes_file_not_stdout(self, capsys, tmp_path):
        target = tmp_path / "o.json"
        code, out, _ = run_cli(
            capsys, "ust", "exact", "--n", "4", "--stat", "distance",
            "--out", str(target),
        )
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["results"]["n"] == 4


class TestDeterminismAcrossProcesses:
    def test_byte_identical_reruns(self):
        argv = ["ust", "sample", "--n", "6", "--num", "5", "--stat",
                "degree", "--seed", "42"]
        a = run_proc(*argv)
        b = run_proc(*argv)
        assert a.returncode == 0
        assert a.stdout == b.stdout

    def test_env_seed_fallback(self):
        argv = ["dpp", "sample", "--rows", "[[1.0, 0.0], [0.0, 1.0]]", "--num", "2"]
        with_env = run_proc(*argv, env_extra={"DPPLAB_SEED": "123"})
        explicit = run_proc(*argv, "--seed", "123")
        assert with_env.returncode == explicit.returncode == 0
        assert json.loads(with_env.stdout)["seed"] == 123
        assert with_env.stdout == explicit.stdout

    def test_replica_merge_is_jobs_independent(self):
        base = ["ust", "sample", "--n", "5", "--num", "200", "--stat", "leaves",
                "--replicas", "4", "--seed", "7"]
        serial = run_proc(*base, "--jobs", "1")
        parallel = run_proc(*base, "--jobs", "4")
        assert serial.returncode == 0
        assert serial.stdout == parallel.stdout

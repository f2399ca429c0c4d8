import json
import logging

import numpy as np
import pytest
import yaml

import agg_amg
from amg.mmio import read_matrix_market, read_vector
from amg.problems import generate_poisson
from models.problem import ProblemSpec


def generate(tmp_path, name="A.mtx", rhs="b.mtx", *extra):
    matrix, vector = tmp_path / name, tmp_path / rhs
    argv = ["generate", "--kind", "poisson2d", "--nx", "8", "--output", str(matrix),
            "--rhs-output", str(vector), *extra]
    assert agg_amg.main(argv) == 0
    return matrix, vector


def solve(tmp_path, *argv, report="report.json"):
    path = tmp_path / report
    code = agg_amg.main(["solve", *argv, "--report", str(path)])
    with open(path) as f:
        data = json.load(f) if path.suffix == ".json" else yaml.safe_load(f)
    return code, data


class TestGenerate:
    def test_writes_the_poisson_system(self, tmp_path):
        matrix, vector = generate(tmp_path)
        A, b = generate_poisson(ProblemSpec(kind="poisson2d", nx=8, ny=8))
        read = read_matrix_market(matrix)
        np.testing.assert_array_equal(read.to_dense(), A.to_dense())
        np.testing.assert_array_equal(read_vector(vector), b)

    def test_is_reproducible(self, tmp_path):
        first, _ = generate(tmp_path, "A1.mtx", "b1.mtx", "--random-rhs", "--seed", "7")
        second, _ = generate(tmp_path, "A2.mtx", "b2.mtx", "--random-rhs", "--seed", "7")
        assert first.read_bytes() == second.read_bytes()
        assert (tmp_path / "b1.mtx").read_bytes() == (tmp_path / "b2.mtx").read_bytes()

    def test_prints_a_summary(self, tmp_path, capsys):
        generate(tmp_path)
        assert "64 unknowns" in capsys.readouterr().out

    def test_nz_is_rejected_in_2d(self, tmp_path):
        argv = ["generate", "--kind", "poisson2d", "--nx", "4", "--nz", "3", "--output", str(tmp_path / "A.mtx")]
        assert agg_amg.main(argv) == 3


class TestSolve:
    def test_generated_problem_converges(self, tmp_path, capsys):
        manifest = tmp_path / "run.yaml"
        code, report = solve(tmp_path, "--kind", "poisson2d", "--nx", "64", "--manifest", str(manifest))
        assert code == 0
        assert report["converged"]
        assert report["relative_residual"] <= 1e-6
        assert len(report["hierarchy"]["levels"]) >= 2
        assert report["manifest"]["config"]["alpha"] == 0.25
        recorded = yaml.safe_load(manifest.read_text())
        assert recorded["seed"] == 0
        assert recorded["config"]["tol"] == 1e-6
        assert recorded["config"]["cycle"] == "hybrid"
        assert recorded["inputs"] == {}
        out = capsys.readouterr().out
        assert "operator complexity" in out
        assert "converged in" in out

    def test_matrix_files_with_yaml_report(self, tmp_path):
        matrix, vector = generate(tmp_path)
        code, report = solve(tmp_path, "--matrix", str(matrix), "--rhs", str(vector), "--solver", "pcg",
                             "--cycle", "v", report="report.yaml")
        assert code == 0
        assert report["method"] == "pcg"
        assert report["converged"]
        assert set(report["manifest"]["inputs"]) == {"matrix", "rhs"}

    def test_hybrid_without_k_levels_matches_vcycle(self, tmp_path):
        common = ["--kind", "poisson2d", "--nx", "48"]
        _, v = solve(tmp_path, *common, "--cycle", "v", report="v.json")
        _, hybrid = solve(tmp_path, *common, "--cycle", "hybrid", "--klevels", "0", report="h.json")
        assert v["residual_history"] == hybrid["residual_history"]

    def test_not_converged_exit_code(self, tmp_path):
        code, report = solve(tmp_path, "--kind", "poisson2d", "--nx", "40", "--tol", "1e-30", "--max-iters", "2")
        assert code == 2
        assert not report["converged"]
        assert report["iterations"] == 2

    def test_unknown_flag_is_an_input_error(self):
        with pytest.raises(SystemExit) as err:
            agg_amg.main(["solve", "--bogus"])
        assert err.value.code == 3

    def test_missing_matrix_file(self, tmp_path, caplog):
        with caplog.at_level(logging.ERROR):
            assert agg_amg.main(["solve", "--matrix", str(tmp_path / "none.mtx")]) == 3
        assert "none.mtx" in caplog.text

    def test_no_system_given(self):
        assert agg_amg.main(["solve"]) == 3

    def test_invalid_option_value(self):
        assert agg_amg.main(["solve", "--kind", "poisson2d", "--nx", "8", "--alpha", "1.5"]) == 3

    def test_manifest_replay_reproduces_the_run(self, tmp_path):
        manifest = tmp_path / "run.yaml"
        _, first = solve(tmp_path, "--kind", "poisson2d", "--nx", "32", "--epsilon", "0.1", "--seed", "5",
                         "--cycle", "k", "--manifest", str(manifest), report="first.json")
        _, replay = solve(tmp_path, "--from-manifest", str(manifest), report="replay.json")
        assert replay["residual_history"] == first["residual_history"]
        assert replay["manifest"]["config"] == first["manifest"]["config"]
        assert replay["manifest"]["seed"] == 5

    def test_manifest_replay_warns_about_changed_inputs(self, tmp_path, caplog):
        matrix, vector = generate(tmp_path)
        manifest = tmp_path / "run.yaml"
        solve(tmp_path, "--matrix", str(matrix), "--rhs", str(vector), "--manifest", str(manifest))
        generate(tmp_path, "A.mtx", "b.mtx", "--epsilon", "0.5")
        with caplog.at_level(logging.WARNING, logger="tools.solve"):
            code, _ = solve(tmp_path, "--from-manifest", str(manifest), report="replay.json")
        assert code == 0
        assert "changed since the manifest was written" in caplog.text


class TestBench:
    def test_rows_and_summary(self, tmp_path, capsys):
        output = tmp_path / "bench.json"
        argv = ["bench", "--sizes", "32,40", "--cycles", "v,hybrid", "--refresh", "--output", str(output)]
        assert agg_amg.main(argv) == 0
        result = json.loads(output.read_text())
        assert [(r["cycle"], r["size"]) for r in result["rows"]] == [("v", 32), ("v", 40),
                                                                     ("hybrid", 32), ("hybrid", 40)]
        assert all(r["converged"] for r in result["rows"])
        assert [g["cycle"] for g in result["grid_independence"]] == ["v", "hybrid"]
        assert all(g["ratio"] >= 1.0 for g in result["grid_independence"])
        assert result["refresh"]["size"] == 40
        assert result["refresh"]["speedup"] > 0
        assert "galerkin refresh" in capsys.readouterr().out

    def test_failing_configuration_becomes_an_error_row(self, tmp_path):
        output = tmp_path / "bench.yaml"
        assert agg_amg.main(["bench", "--sizes", "8", "--alpha", "1.5", "--output", str(output)]) == 0
        (row,) = yaml.safe_load(output.read_text())["rows"]
        assert "alpha" in row["error"]
        assert yaml.safe_load(output.read_text())["grid_independence"][0]["ratio"] is None

    def test_empty_sizes_are_rejected(self):
        assert agg_amg.main(["bench", "--sizes", ","]) == 3

    def test_single_configuration_matches_solve(self, tmp_path):
        output = tmp_path / "bench.json"
        assert agg_amg.main(["bench", "--sizes", "32", "--cycles", "k", "--output", str(output)]) == 0
        (row,) = json.loads(output.read_text())["rows"]
        _, report = solve(tmp_path, "--kind", "poisson2d", "--nx", "32", "--epsilon", "1.0", "--cycle", "k")
        assert row["iterations"] == report["iterations"]
        assert row["relative_residual"] == report["relative_residual"]
        assert row["levels"] == len(report["hierarchy"]["levels"])

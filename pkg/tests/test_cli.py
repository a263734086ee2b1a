import csv
import json

import numpy as np
import pytest

from sparse_rank1 import DenseTensor, write_sten
from sparse_rank1.cli import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, main

from conftest import random_tensor


@pytest.fixture
def tensor_file(rng, tmp_path):
    t = random_tensor(rng, (4, 4, 4))
    path = tmp_path / "t.sten"
    write_sten(t, path)
    return path, t


class TestApprox:
    def test_runs_and_reports(self, tensor_file, tmp_path, capsys):
        path, t = tensor_file
        out = tmp_path / "res.json"
        code = main([
            "approx", "--alg", "C", "--input", str(path),
            "--budget", "2,2,2", "--out", str(out),
        ])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["algorithm"] == "C"
        assert payload["value"] > 0
        assert all(s <= 2 for s in payload["support_sizes"])

    def test_missing_file_exit_2(self, tmp_path):
        code = main([
            "approx", "--alg", "A", "--input", str(tmp_path / "nope.sten"),
            "--budget", "1,1,1",
        ])
        assert code == EXIT_INPUT

    def test_bad_budget_exit_2(self, tensor_file):
        path, _ = tensor_file
        code = main(["approx", "--alg", "A", "--input", str(path), "--budget", "9,1,1"])
        assert code == EXIT_INPUT

    def test_zero_tensor_exit_3(self, tmp_path):
        path = tmp_path / "zero.sten"
        write_sten(DenseTensor(np.zeros(8), (2, 2, 2)), path)
        code = main(["approx", "--alg", "D", "--input", str(path), "--budget", "1,1,1"])
        assert code == EXIT_NUMERICAL


class TestGenAndRefine:
    def test_gen_then_refine(self, tmp_path):
        tensor = tmp_path / "gen.sten"
        assert main([
            "gen", "--kind", "sparse-cp", "--shape", "5,5,5",
            "--sr", "0.6", "--seed", "4", "--out", str(tensor),
        ]) == EXIT_OK
        out = tmp_path / "refined.json"
        code = main([
            "refine", "--model", "l0", "--init", "D", "--input", str(tensor),
            "--budget", "2,2,2", "--out", str(out),
        ])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["value"] > 0
        assert payload["sweeps"] >= 1

    def test_gen_deterministic(self, tmp_path):
        a, b = tmp_path / "a.sten", tmp_path / "b.sten"
        for out in (a, b):
            main(["gen", "--kind", "sparse-cp", "--shape", "4,4,4",
                  "--seed", "9", "--out", str(out)])
        assert a.read_text() == b.read_text()

    def test_refine_l1(self, tmp_path):
        tensor = tmp_path / "gen.sten"
        main(["gen", "--kind", "sparse-cp", "--shape", "4,4,4",
              "--seed", "2", "--out", str(tensor)])
        out = tmp_path / "l1.json"
        code = main([
            "refine", "--model", "l1", "--init", "C", "--rho", "0.1",
            "--input", str(tensor), "--budget", "2,2,2", "--out", str(out),
        ])
        assert code == EXIT_OK
        assert "penalized_objective" in json.loads(out.read_text())


class TestOracle:
    def test_tiny_instance(self, tmp_path, rng):
        t = random_tensor(rng, (3, 3, 3))
        path = tmp_path / "t.sten"
        write_sten(t, path)
        out = tmp_path / "oracle.json"
        code = main([
            "oracle", "--input", str(path), "--budget", "1,1,1",
            "--restarts", "2", "--out", str(out),
        ])
        assert code == EXIT_OK
        payload = json.loads(out.read_text())
        assert payload["value"] == pytest.approx(np.abs(t.data).max())

    def test_guard_exit_2(self, tmp_path, rng):
        t = random_tensor(rng, (12, 12, 12))
        path = tmp_path / "big.sten"
        write_sten(t, path)
        code = main(["oracle", "--input", str(path), "--budget", "6,6,6"])
        assert code == EXIT_INPUT


class TestCluster:
    def test_stacked_input(self, tmp_path):
        stacked = tmp_path / "samples.sten"
        labels = tmp_path / "truth.csv"
        main(["gen", "--kind", "cluster", "--n", "8", "--sigma", "0.1",
              "--seed", "0", "--out", str(stacked), "--labels-out", str(labels)])
        out = tmp_path / "assign.csv"
        code = main([
            "cluster", "--input", str(stacked), "--ranks", "4",
            "--budgets", "7,7", "--k-candidates", "3,4,5",
            "--init", "D", "--seed", "1", "--out", str(out),
        ])
        assert code == EXIT_OK
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 8
        assert rows[0]["sample_index"] == "1"
        assert all(int(r["label"]) >= 1 for r in rows)

    def test_directory_input(self, tmp_path, rng):
        d = tmp_path / "samples"
        d.mkdir()
        for i in range(4):
            write_sten(random_tensor(rng, (3, 3)), d / f"s{i:02d}.sten")
        out = tmp_path / "assign.csv"
        code = main([
            "cluster", "--dir", str(d), "--ranks", "2", "--budgets", "2,2",
            "--k", "2", "--seed", "0", "--out", str(out),
        ])
        assert code == EXIT_OK
        with open(out) as fh:
            assert len(list(csv.DictReader(fh))) == 4

    def test_empty_dir_exit_2(self, tmp_path):
        d = tmp_path / "empty"
        d.mkdir()
        assert main(["cluster", "--dir", str(d)]) == EXIT_INPUT


class TestBench:
    def test_spec_to_csv(self, tmp_path):
        spec = tmp_path / "exp.spec"
        spec.write_text("kind = rank1-sweep\ndims = 5\ninstances = 1\nseed = 3\n")
        out = tmp_path / "r.csv"
        code = main(["bench", "--spec", str(spec), "--out", str(out)])
        assert code == EXIT_OK
        assert out.read_text().startswith("# kind=rank1-sweep")

    def test_bad_spec_exit_2(self, tmp_path):
        spec = tmp_path / "exp.spec"
        spec.write_text("kind = nonsense\n")
        assert main(["bench", "--spec", str(spec)]) == EXIT_INPUT

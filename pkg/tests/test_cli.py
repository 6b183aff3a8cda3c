"""Subcommand behavior, exit codes, and byte-level determinism."""

import json
import math

import numpy as np
import pytest

from distsim import (
    DiscreteDist,
    GaussianMulti,
    GaussianUni,
    SampleMatrix,
    TruncGaussianMulti,
    to_json,
)
from distsim.cli import main


def write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def gauss_files(tmp_path):
    a = write(tmp_path / "a.json", to_json(GaussianUni(0.0, 1.0)))
    b = write(tmp_path / "b.json", to_json(GaussianUni(1.0, 1.0)))
    return a, b


class TestDistance:
    def test_identical_distance_zero(self, gauss_files, capsys):
        a, _ = gauss_files
        assert main(["distance", a, a]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["distance"] == 0.0

    def test_unit_shift(self, gauss_files, capsys):
        a, b = gauss_files
        assert main(["distance", a, b]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["distance"] == pytest.approx(0.125)
        assert out["coefficient"] == pytest.approx(math.exp(-0.125))

    def test_discrete_disjoint_prints_inf(self, tmp_path, capsys):
        a = write(tmp_path / "p.json", to_json(DiscreteDist([1.0, 0.0])))
        b = write(tmp_path / "q.json", to_json(DiscreteDist([0.0, 1.0])))
        assert main(["distance", a, b]) == 0
        assert json.loads(capsys.readouterr().out)["distance"] == "inf"

    def test_mixed_types_rejected(self, tmp_path, gauss_files, capsys):
        a, _ = gauss_files
        d = write(tmp_path / "d.json", to_json(DiscreteDist([0.5, 0.5])))
        assert main(["distance", a, d]) == 1
        assert "error" in capsys.readouterr().err

    def test_truncated_mvn_strict_requires_seed(self, tmp_path, capsys):
        t = TruncGaussianMulti([0.0, 0.0], np.eye(2), [-1, -1], [1, 1])
        a = write(tmp_path / "t.json", to_json(t))
        assert main(["--strict", "distance", a, a]) == 1
        assert main(["--strict", "distance", a, a, "--seed", "3"]) == 0

    def test_missing_file(self, capsys):
        assert main(["distance", "/nonexistent.json", "/nonexistent.json"]) == 1


class TestJl:
    def test_min_dim(self, capsys):
        assert main(["jl", "min-dim", "--n", "566", "--eps", "0.5"]) == 0
        assert capsys.readouterr().out.strip() == "305"

    def test_project_and_distortion(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        data = SampleMatrix(rng.standard_normal((30, 200)))
        src = tmp_path / "src.csv"
        data.to_csv(src)
        out = tmp_path / "proj.csv"
        assert main(["jl", "project", "--input", str(src), "--k", "40",
                     "--seed", "1", "--output", str(out)]) == 0
        assert main(["jl", "distortion", "--original", str(src),
                     "--projected", str(out), "--eps", "0.9",
                     "--output", str(tmp_path / "rep.json")]) == 0
        capsys.readouterr()
        rep = json.loads((tmp_path / "rep.json").read_text())
        assert rep["pairs"] == 30 * 29 // 2
        assert 0.0 <= rep["fraction_within"] <= 1.0

    def test_project_byte_identical_reruns(self, tmp_path):
        rng = np.random.default_rng(1)
        data = SampleMatrix(rng.standard_normal((10, 50)))
        src = tmp_path / "src.csv"
        data.to_csv(src)
        out1, out2 = tmp_path / "p1.csv", tmp_path / "p2.csv"
        for out in (out1, out2):
            assert main(["jl", "project", "--input", str(src), "--k", "8",
                         "--seed", "7", "--output", str(out)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestApprox:
    def test_moment_match(self, capsys):
        assert main(["approx", "moment-match", "--moments", "1,0,1,0,3,0",
                     "--nodes", "3"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["nodes"] == pytest.approx([-math.sqrt(3), 0.0, math.sqrt(3)],
                                             abs=1e-8)

    def test_invalid_moments_exit_one(self, capsys):
        assert main(["approx", "moment-match", "--moments", "1,1,0.5,0,1,0",
                     "--nodes", "3"]) == 1

    def test_nln_density_dump(self, tmp_path):
        out = tmp_path / "grid.csv"
        assert main(["approx", "nln-density", "--k", "1,1", "--mu-y", "0,0",
                     "--sigma-y", "0,0", "--points", "512",
                     "--output", str(out)]) == 0
        grid = np.loadtxt(out, delimiter=",", skiprows=1)
        assert grid.shape == (512, 2)
        # two unit normals convolve to N(0, 2)
        want = np.exp(-grid[:, 0] ** 2 / 4) / math.sqrt(4 * math.pi)
        assert np.max(np.abs(grid[:, 1] - want)) < 1e-4


class TestVerify:
    @pytest.mark.parametrize("battery", ["stein", "bridge", "pricing"])
    def test_batteries_pass(self, battery, capsys):
        assert main(["verify", battery, "--seed", "5"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["all_pass"] is True
        assert all(case["pass"] for case in out["cases"])

    def test_strict_requires_seed(self, capsys):
        assert main(["--strict", "verify", "stein"]) == 1


class TestCompare:
    @pytest.fixture
    def group_csvs(self, tmp_path):
        rng = np.random.default_rng(3)
        cov = 0.5 * np.eye(5) + 0.5
        paths = []
        for name, scale in (("aus", 1.0), ("sgp", 1.0), ("hkg", 2.0)):
            data = rng.multivariate_normal(np.zeros(5), scale * cov, size=80)
            path = tmp_path / f"{name}.csv"
            SampleMatrix(data).to_csv(path)
            paths.append(str(path))
        return paths

    def test_compare_writes_outputs(self, group_csvs, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["compare", *group_csvs, "--method", "jl", "--k", "3",
                     "--fit", "mvn", "--iterations", "2", "--seed", "4",
                     "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["labels"] == ["aus", "sgp", "hkg"]
        assert len(summary["iterations"]) == 2
        assert (out / "matrix_iter0.csv").exists()
        assert (out / "matrix_iter1.csv").exists()

    def test_compare_byte_identical_reruns(self, group_csvs, tmp_path):
        outs = []
        for tag in ("r1", "r2"):
            out = tmp_path / tag
            assert main(["compare", *group_csvs, "--method", "jl", "--k", "3",
                         "--fit", "mvn", "--iterations", "2", "--seed", "4",
                         "--out", str(out)]) == 0
            outs.append(out)
        for name in ("summary.json", "matrix_iter0.csv", "matrix_iter1.csv"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_config_file_with_cli_override(self, group_csvs, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"method": "jl", "k": 2, "fit": "mvn",
                                   "iterations": 1, "seed": 1}))
        assert main(["compare", *group_csvs, "--config", str(cfg),
                     "--iterations", "3"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["iterations"]) == 3
        assert out["config"]["k"] == 2

    def test_pca_path(self, group_csvs, capsys):
        assert main(["compare", *group_csvs, "--method", "pca",
                     "--sig-digits", "2", "--fit", "mvn", "--seed", "2"]) == 0
        out = json.loads(capsys.readouterr().out)
        mat = out["iterations"][0]["matrix"]
        assert len(mat) == 3 and len(mat[0]) == 3

    def test_names_mismatch_rejected(self, group_csvs, capsys):
        assert main(["compare", *group_csvs, "--method", "jl", "--k", "2",
                     "--names", "a,b", "--seed", "0"]) == 1

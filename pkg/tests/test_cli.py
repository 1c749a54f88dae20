"""End-to-end tests of the command-line pipelines."""

import json

import pytest

from mixnet.cli import main


def read_manifest(out_dir):
    with open(out_dir / "manifest.json") as fh:
        return json.load(fh)


def run(argv):
    return main([str(a) for a in argv])


class TestSimulate:
    def test_writes_log_and_manifest(self, tmp_path, capsys):
        code = run(["simulate", "complete:4", "--m", 2, "--m-hat", 1,
                    "--alpha", 0.5, "--steps", 50, "--rng-seed", 3,
                    "--out", tmp_path])
        assert code == 0
        assert "rng seed: 3" in capsys.readouterr().out
        lines = (tmp_path / "samplelog.csv").read_text().strip().splitlines()
        assert lines[0] == "step,k,e_prev,n_prev"
        assert len(lines) == 1 + 50 * 2
        manifest = read_manifest(tmp_path)
        assert manifest["subcommand"] == "simulate"
        assert manifest["params"]["nodes"] == 54
        assert manifest["params"]["edges"] == 12 + 50 * 3

    def test_export_graph(self, tmp_path):
        run(["simulate", "complete:4", "--m", 1, "--steps", 10,
             "--export-graph", "--out", tmp_path])
        lines = (tmp_path / "graph.edgelist").read_text().strip().splitlines()
        assert len(lines) == 12 + 10

    def test_invalid_alpha_exits_1(self, tmp_path, capsys):
        code = run(["simulate", "complete:4", "--alpha", 1.5, "--out", tmp_path])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_missing_seed_file_exits_2(self, tmp_path, capsys):
        code = run(["simulate", tmp_path / "nope.edgelist", "--out", tmp_path])
        assert code == 2


class TestEstimate:
    @pytest.fixture
    def sim_dir(self, tmp_path):
        out = tmp_path / "sim"
        run(["simulate", "complete:4", "--m", 3, "--m-hat", 2, "--alpha", 0.6,
             "--steps", 400, "--rng-seed", 1, "--out", out])
        return out

    def test_both_methods(self, sim_dir, tmp_path, capsys):
        out = tmp_path / "est"
        code = run(["estimate", sim_dir / "samplelog.csv", "--out", out])
        assert code == 0
        result = json.loads((out / "estimate.json").read_text())
        assert 0.0 < result["mle"]["alpha_hat"] < 1.0
        assert result["em"]["converged"]
        assert abs(result["mle"]["alpha_hat"] - result["em"]["alpha_hat"]) < 0.05
        assert (out / "em_trace.csv").exists()
        printed = json.loads(capsys.readouterr().out)
        assert printed == result

    def test_mle_only(self, sim_dir, tmp_path):
        out = tmp_path / "est"
        run(["estimate", sim_dir / "samplelog.csv", "--method", "mle", "--out", out])
        result = json.loads((out / "estimate.json").read_text())
        assert "em" not in result
        assert not (out / "em_trace.csv").exists()

    def test_prefix_trace(self, sim_dir, tmp_path):
        out = tmp_path / "est"
        run(["estimate", sim_dir / "samplelog.csv", "--method", "mle",
             "--trace", "--stride", 100, "--out", out])
        lines = (out / "trace.csv").read_text().strip().splitlines()
        assert lines[0] == "t,alpha_hat"
        assert len(lines) == 1 + 4  # t = 100, 200, 300, 400

    def test_missing_log_exits_2(self, tmp_path):
        assert run(["estimate", tmp_path / "nope.csv", "--out", tmp_path]) == 2


class TestDist:
    def test_theory_only(self, tmp_path):
        code = run(["dist", "--m", 5, "--m-hat", 3, "--alpha", 0.6,
                    "--k-max", 30, "--out", tmp_path])
        assert code == 0
        lines = (tmp_path / "theory.csv").read_text().strip().splitlines()
        assert lines[0] == "k,pmf,ccdf"
        assert len(lines) == 1 + 28  # k = 3 .. 30
        k, pmf, ccdf = lines[1].split(",")
        assert k == "3"
        assert float(pmf) == pytest.approx(8.0 / 33.0, rel=1e-12)
        assert float(ccdf) == 1.0
        assert not (tmp_path / "empirical.csv").exists()

    def test_ensemble(self, tmp_path):
        code = run(["dist", "--m", 2, "--m-hat", 1, "--alpha", 0.5,
                    "--k-max", 20, "--ensemble", 3, "--steps", 200,
                    "--seed-spec", "complete:3", "--out", tmp_path])
        assert code == 0
        lines = (tmp_path / "empirical.csv").read_text().strip().splitlines()
        assert lines[0] == "k,ccdf_empirical"
        assert len(lines) == 1 + 21
        assert float(lines[1].split(",")[1]) == 1.0

    def test_k_max_below_support_exits_1(self, tmp_path):
        assert run(["dist", "--m", 5, "--m-hat", 3, "--alpha", 0.6,
                    "--k-max", 2, "--out", tmp_path]) == 1


class TestCite:
    @pytest.fixture
    def dataset(self, tmp_path):
        edges = tmp_path / "edges.txt"
        edges.write_text("A Z\nB A\nC A\nC B\nD C\nD A\nE A\nE B\nE C\n")
        dates = tmp_path / "dates.txt"
        dates.write_text(
            "A\t2000-01-01\nB\t2000-02-01\nC\t2000-03-01\n"
            "D\t2000-04-01\nE\t2000-05-01\n"
        )
        return edges, dates

    def test_pipeline(self, dataset, tmp_path, capsys):
        edges, dates = dataset
        out = tmp_path / "cite"
        code = run(["cite", edges, dates, "--cutoff", "2000-01-31",
                    "--m", 2, "--m-hat", 0, "--out", out])
        assert code == 0
        replay = json.loads((out / "replay_manifest.json").read_text())
        assert replay["seed_nodes"] == 2
        assert replay["arrivals"] == 4
        estimates = json.loads((out / "estimates.json").read_text())
        assert "alpha_hat" in estimates["mle"]
        assert "alpha_hat" in estimates["em"]
        assert estimates["mean_citations_per_arrival"] == pytest.approx(8 / 4)
        ccdf_lines = (out / "ccdf.csv").read_text().strip().splitlines()
        assert ccdf_lines[0] == "k,ccdf_empirical,ccdf_theory_mle,ccdf_theory_em"
        printed = json.loads(capsys.readouterr().out)
        assert printed["final_nodes"] == replay["final_nodes"]

    def test_missing_dataset_exits_2(self, tmp_path):
        assert run(["cite", tmp_path / "no-e.txt", tmp_path / "no-d.txt",
                    "--cutoff", "2000-01-01", "--out", tmp_path]) == 2


class TestConfig:
    def test_config_sets_defaults(self, tmp_path):
        cfg = tmp_path / "mixnet.cfg"
        cfg.write_text("alpha=0.8\nsteps=20\n")
        out = tmp_path / "out"
        run(["--config", cfg, "simulate", "complete:4", "--out", out])
        manifest = read_manifest(out)
        assert manifest["params"]["alpha"] == 0.8
        assert manifest["params"]["steps"] == 20

    def test_explicit_flag_wins(self, tmp_path):
        cfg = tmp_path / "mixnet.cfg"
        cfg.write_text("alpha=0.8\n")
        out = tmp_path / "out"
        run(["--config", cfg, "simulate", "complete:4", "--alpha", 0.3,
             "--steps", 10, "--out", out])
        assert read_manifest(out)["params"]["alpha"] == 0.3

    def test_boolean_value(self, tmp_path):
        cfg = tmp_path / "mixnet.cfg"
        cfg.write_text("export-graph=true\n")
        out = tmp_path / "out"
        run(["--config", cfg, "simulate", "complete:4", "--steps", 5, "--out", out])
        assert (out / "graph.edgelist").exists()

    def test_malformed_config(self, tmp_path, capsys):
        cfg = tmp_path / "mixnet.cfg"
        cfg.write_text("no equals sign\n")
        code = run(["--config", cfg, "simulate", "complete:4", "--out", tmp_path])
        assert code == 1


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


def test_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("MIXNET_OUT", str(tmp_path / "envout"))
    run(["simulate", "complete:4", "--steps", 5])
    assert (tmp_path / "envout" / "samplelog.csv").exists()

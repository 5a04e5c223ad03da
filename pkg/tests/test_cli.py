import json

from linkpred.cli import main
from linkpred.graph import load_graph

from test_pipeline import minimal_doc, write_config, write_networks


class TestSynth:
    def test_generates_networks_and_config(self, tmp_path):
        out = tmp_path / "bench"
        code = main(
            [
                "synth",
                "--output",
                str(out),
                "--networks",
                "3",
                "--unseen",
                "1",
                "--nodes",
                "150",
                "--attach",
                "3",
                "--seed",
                "5",
            ]
        )
        assert code == 0
        doc = json.loads((out / "config.json").read_text())
        assert len(doc["networks"]) == 3
        roles = [n["role"] for n in doc["networks"]]
        assert roles == ["seen", "seen", "unseen"]
        assert doc["seed"] == 5
        # a relative output keeps the generated bundle relocatable
        assert doc["output"] == "artifacts"
        for entry in doc["networks"]:
            g = load_graph(out / entry["edges"], out / entry["attributes"], entry["id"])
            assert g.node_count == 150

    def test_unseen_must_leave_a_seen_network(self, tmp_path):
        code = main(
            ["synth", "--output", str(tmp_path / "x"), "--networks", "2", "--unseen", "2"]
        )
        assert code == 2

    def test_datasets_flag_recorded(self, tmp_path):
        out = tmp_path / "b2"
        main(
            [
                "synth",
                "--output",
                str(out),
                "--networks",
                "1",
                "--unseen",
                "0",
                "--nodes",
                "80",
                "--attach",
                "3",
                "--datasets",
                "baseline",
            ]
        )
        doc = json.loads((out / "config.json").read_text())
        assert doc["datasets"] == ["baseline"]


class TestRun:
    def test_full_run_and_stage_subsets(self, tmp_path):
        entries = write_networks(tmp_path, roles=("seen", "unseen"))
        cfg_path = write_config(tmp_path, minimal_doc(entries))
        out = tmp_path / "cli-out"

        code = main(["run", "--config", str(cfg_path), "--output", str(out)])
        assert code == 0
        assert (out / "DONE").is_file()
        assert (out / "results.csv").is_file()

    def test_staged_invocations_compose(self, tmp_path):
        entries = write_networks(tmp_path, roles=("seen",))
        cfg_path = write_config(tmp_path, minimal_doc(entries))
        out = tmp_path / "staged-out"
        base = ["--config", str(cfg_path), "--output", str(out)]

        assert main(["run", *base, "--stages", "stats,split"]) == 0
        assert not (out / "DONE").exists()
        assert (out / "splits" / "samples.csv").is_file()
        for stage in ("embed", "build", "select", "train", "eval"):
            assert main([stage, *base]) == 0
        assert (out / "results.csv").is_file()
        assert not (out / "DONE").exists()

    def test_missing_config_exits_one(self, tmp_path):
        code = main(["run", "--config", str(tmp_path / "none.json")])
        assert code == 1

    def test_unknown_stage_exits_one(self, tmp_path):
        entries = write_networks(tmp_path, roles=("seen",))
        cfg_path = write_config(tmp_path, minimal_doc(entries))
        code = main(
            ["run", "--config", str(cfg_path), "--output", str(tmp_path / "o"), "--stages", "fit"]
        )
        assert code == 1

    def test_dependency_failure_exits_two(self, tmp_path):
        entries = write_networks(tmp_path, roles=("seen",))
        cfg_path = write_config(tmp_path, minimal_doc(entries))
        code = main(["eval", "--config", str(cfg_path), "--output", str(tmp_path / "dep")])
        assert code == 2

    def test_seed_override_changes_artifacts(self, tmp_path):
        entries = write_networks(tmp_path, roles=("seen",))
        cfg_path = write_config(tmp_path, minimal_doc(entries))
        out_a, out_b = tmp_path / "sa", tmp_path / "sb"
        main(["run", "--config", str(cfg_path), "--output", str(out_a)])
        main(["run", "--config", str(cfg_path), "--output", str(out_b), "--seed", "1234"])
        a = (out_a / "splits" / "samples.csv").read_bytes()
        b = (out_b / "splits" / "samples.csv").read_bytes()
        assert a != b

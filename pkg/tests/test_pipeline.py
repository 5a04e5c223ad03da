import json

import pytest

from linkpred.errors import ConfigError, DependencyError
from linkpred.pipeline import load_config, run_pipeline
from linkpred.synthetic import (
    make_benchmark_network,
    write_attribute_file,
    write_edge_file,
)

SMALL_WALKS = {
    "dimensions": 8,
    "walks_per_node": 4,
    "walk_length": 8,
    "window": 3,
    "epochs": 1,
}


def write_networks(directory, roles, n=260, seed0=0):
    entries = []
    for i, role in enumerate(roles):
        nid = f"net{i:02d}"
        g = make_benchmark_network(n=n, attach=4, triangle_prob=0.6, seed=seed0 + i, network_id=nid)
        write_edge_file(directory / f"{nid}.edges", g)
        write_attribute_file(directory / f"{nid}.attrs.csv", g)
        entries.append(
            {"id": nid, "edges": f"{nid}.edges", "attributes": f"{nid}.attrs.csv", "role": role}
        )
    return entries


def write_config(directory, doc):
    path = directory / "config.json"
    path.write_text(json.dumps(doc, indent=2))
    return path


def minimal_doc(networks, output="out", seed=7):
    return {
        "networks": networks,
        "datasets": ["baseline"],
        "models": {"baseline": ["logreg-baseline"]},
        "selection": {"folds": 3},
        "lda": {"sample_size": 8},
        "output": output,
        "seed": seed,
    }


def tree_bytes(root):
    """Relative path -> file bytes for every file under root."""
    return {
        str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()
    }


@pytest.fixture(scope="module")
def network_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("networks")
    entries = write_networks(directory, roles=("seen", "unseen"))
    return directory, entries


@pytest.fixture(scope="module")
def minimal_run(network_dir, tmp_path_factory):
    directory, entries = network_dir
    out = tmp_path_factory.mktemp("minimal-out")
    cfg = load_config(write_config(directory, minimal_doc(entries)), output=out)
    run_pipeline(cfg)
    return cfg, out


class TestLoadConfig:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_network_files_must_exist(self, tmp_path):
        doc = minimal_doc(
            [{"id": "x", "edges": "x.edges", "attributes": "x.attrs.csv", "role": "seen"}]
        )
        with pytest.raises(ConfigError) as exc:
            load_config(write_config(tmp_path, doc))
        assert "does not exist" in str(exc.value)

    def test_duplicate_network_ids(self, network_dir):
        directory, entries = network_dir
        doc = minimal_doc([entries[0], dict(entries[0])])
        with pytest.raises(ConfigError):
            load_config(write_config(directory, doc))

    def test_bad_role(self, network_dir):
        directory, entries = network_dir
        entry = dict(entries[0])
        entry["role"] = "holdout"
        with pytest.raises(ConfigError):
            load_config(write_config(directory, minimal_doc([entry])))

    def test_requires_a_seen_network(self, network_dir):
        directory, entries = network_dir
        entry = dict(entries[0])
        entry["role"] = "unseen"
        with pytest.raises(ConfigError):
            load_config(write_config(directory, minimal_doc([entry])))

    def test_unknown_dataset_kind(self, network_dir):
        directory, entries = network_dir
        doc = minimal_doc(entries)
        doc["datasets"] = ["spectral"]
        with pytest.raises(ConfigError):
            load_config(write_config(directory, doc))

    def test_duplicate_dataset_kinds(self, network_dir):
        directory, entries = network_dir
        doc = minimal_doc(entries)
        doc["datasets"] = ["baseline", "baseline"]
        with pytest.raises(ConfigError):
            load_config(write_config(directory, doc))

    def test_unknown_model_preset(self, network_dir):
        directory, entries = network_dir
        doc = minimal_doc(entries)
        doc["models"] = {"baseline": ["gradient-boost"]}
        with pytest.raises(ConfigError):
            load_config(write_config(directory, doc))

    def test_unknown_walk_key(self, network_dir):
        directory, entries = network_dir
        doc = minimal_doc(entries)
        doc["walks"] = {"stride": 3}
        with pytest.raises(ConfigError):
            load_config(write_config(directory, doc))

    def test_bad_fractions_and_counts(self, network_dir):
        directory, entries = network_dir
        for patch in (
            {"split": {"positive_fraction": 0.0}},
            {"split": {"train_fraction": 2.0}},
            {"selection": {"folds": 1}},
            {"lda": {"sample_size": 1}},
        ):
            doc = minimal_doc(entries)
            doc.update(patch)
            with pytest.raises(ConfigError):
                load_config(write_config(directory, doc))

    def test_overrides_beat_file_values(self, network_dir, tmp_path):
        directory, entries = network_dir
        path = write_config(directory, minimal_doc(entries, output="from-file", seed=1))
        cfg = load_config(path, output=tmp_path / "cli-out", seed=99)
        assert cfg.output == tmp_path / "cli-out"
        assert cfg.seed == 99

    def test_paths_resolve_against_config_directory(self, network_dir):
        directory, entries = network_dir
        cfg = load_config(write_config(directory, minimal_doc(entries)))
        assert cfg.networks[0].edge_file == (directory / "net00.edges").resolve()

    def test_relative_output_resolves_against_config_directory(self, network_dir):
        directory, entries = network_dir
        cfg = load_config(write_config(directory, minimal_doc(entries, output="artifacts")))
        assert cfg.output == directory / "artifacts"

    def test_hash_ignores_output_location(self, network_dir, tmp_path):
        directory, entries = network_dir
        path = write_config(directory, minimal_doc(entries))
        h1 = load_config(path, output=tmp_path / "a").config_hash()
        h2 = load_config(path, output=tmp_path / "b").config_hash()
        h3 = load_config(path, output=tmp_path / "a", seed=123).config_hash()
        assert h1 == h2
        assert h1 != h3

    def test_defaults_fill_models_and_datasets(self, network_dir):
        directory, entries = network_dir
        doc = {"networks": entries}
        cfg = load_config(write_config(directory, doc))
        assert cfg.datasets == ("baseline", "topological", "embedding")
        assert set(cfg.model_presets) == set(cfg.datasets)
        assert len(cfg.model_presets["baseline"]) == 4


class TestMinimalRun:
    def test_expected_artifacts(self, minimal_run):
        cfg, out = minimal_run
        for rel in (
            "stats/stats.csv",
            "stats/manifest.json",
            "splits/samples.csv",
            "splits/net00.train-edges",
            "embeddings/manifest.json",
            "datasets/baseline.train.csv",
            "datasets/baseline.train.manifest.json",
            "selection/selection_baseline.json",
            "models/baseline.logreg-baseline.model",
            "lda_baseline.csv",
            "results.csv",
            "DONE",
        ):
            assert (out / rel).is_file(), rel

    def test_results_rows(self, minimal_run):
        cfg, out = minimal_run
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0] == "dataset,partition,model,auroc,f1,accuracy,n_pos,n_neg"
        assert len(lines) == 3
        parts = {line.split(",")[1] for line in lines[1:]}
        assert parts == {"test", "unseen"}
        for line in lines[1:]:
            rec = line.split(",")
            assert rec[0] == "baseline" and rec[2] == "logreg"
            assert 0.0 <= float(rec[3]) <= 1.0

    def test_done_marker_holds_config_hash(self, minimal_run):
        cfg, out = minimal_run
        assert (out / "DONE").read_text().strip() == cfg.config_hash()

    def test_embed_stage_records_skip(self, minimal_run):
        cfg, out = minimal_run
        doc = json.loads((out / "embeddings" / "manifest.json").read_text())
        assert "skipped" in doc
        assert doc["files"] == []

    def test_samples_csv_consistent_with_manifest(self, minimal_run):
        cfg, out = minimal_run
        lines = (out / "splits" / "samples.csv").read_text().splitlines()
        assert lines[0] == "network,u,v,label,partition"
        counts = {"train": 0, "test": 0, "unseen": 0}
        for line in lines[1:]:
            network, u, v, label, partition = line.split(",")
            assert label in ("0", "1")
            counts[partition] += 1
        manifest = json.loads((out / "splits" / "manifest.json").read_text())
        assert manifest["sample_counts"] == counts
        # unseen network contributes every sample to the unseen partition
        assert counts["unseen"] > 0

    def test_train_edges_load_back(self, minimal_run, network_dir):
        from linkpred.graph import load_graph

        directory, entries = network_dir
        cfg, out = minimal_run
        g = load_graph(directory / "net00.edges", directory / "net00.attrs.csv", "net00")
        pruned = load_graph(
            out / "splits" / "net00.train-edges", directory / "net00.attrs.csv", "net00"
        )
        held_out = g.num_edges - pruned.num_edges
        assert held_out == int(round(0.02 * g.num_edges))

    def test_manifests_use_relative_paths_and_config_hash(self, minimal_run):
        cfg, out = minimal_run
        for manifest in out.rglob("manifest.json"):
            doc = json.loads(manifest.read_text())
            assert doc["config_hash"] == cfg.config_hash()
            assert doc["seed"] == cfg.seed
            for rel in doc["files"]:
                assert not rel.startswith("/")
                assert (out / rel).is_file()


class TestDeterminism:
    def test_rerun_is_byte_identical(self, network_dir, tmp_path):
        directory, entries = network_dir
        path = write_config(directory, minimal_doc(entries))
        out_a = tmp_path / "run-a"
        out_b = tmp_path / "run-b"
        run_pipeline(load_config(path, output=out_a))
        run_pipeline(load_config(path, output=out_b))
        assert tree_bytes(out_a) == tree_bytes(out_b)

    def test_staged_equals_monolithic(self, network_dir, tmp_path):
        directory, entries = network_dir
        path = write_config(directory, minimal_doc(entries))
        whole = tmp_path / "whole"
        staged = tmp_path / "staged"
        run_pipeline(load_config(path, output=whole))
        cfg = load_config(path, output=staged)
        run_pipeline(cfg, stages=["stats", "split"])
        assert not (staged / "DONE").exists()
        run_pipeline(cfg, stages=["embed", "build", "select", "train", "eval"])
        assert not (staged / "DONE").exists()
        a = tree_bytes(whole)
        b = tree_bytes(staged)
        del a["DONE"]
        assert a == b

    def test_stale_done_removed_on_partial_run(self, network_dir, tmp_path):
        directory, entries = network_dir
        path = write_config(directory, minimal_doc(entries))
        out = tmp_path / "stale"
        cfg = load_config(path, output=out)
        run_pipeline(cfg)
        assert (out / "DONE").exists()
        run_pipeline(cfg, stages=["stats"])
        assert not (out / "DONE").exists()


class TestStageOrdering:
    def test_unknown_stage_rejected(self, network_dir, tmp_path):
        directory, entries = network_dir
        cfg = load_config(write_config(directory, minimal_doc(entries)), output=tmp_path / "x")
        with pytest.raises(ConfigError):
            run_pipeline(cfg, stages=["compile"])

    def test_missing_upstream_artifact_raises(self, network_dir, tmp_path):
        directory, entries = network_dir
        cfg = load_config(write_config(directory, minimal_doc(entries)), output=tmp_path / "y")
        with pytest.raises(DependencyError) as exc:
            run_pipeline(cfg, stages=["build"])
        assert "earlier stages" in str(exc.value)

    def test_stages_run_in_canonical_order(self, network_dir, tmp_path):
        directory, entries = network_dir
        cfg = load_config(write_config(directory, minimal_doc(entries)), output=tmp_path / "z")
        # out-of-order request still runs split before eval dependencies resolve
        run_pipeline(cfg, stages=["split", "stats"])
        assert (tmp_path / "z" / "splits" / "samples.csv").is_file()

    def test_corrupted_samples_header_detected(self, network_dir, tmp_path):
        directory, entries = network_dir
        cfg = load_config(write_config(directory, minimal_doc(entries)), output=tmp_path / "c")
        run_pipeline(cfg, stages=["stats", "split"])
        samples = cfg.output / "splits" / "samples.csv"
        body = samples.read_text().splitlines()[1:]
        samples.write_text("\n".join(["who,knows"] + body) + "\n")
        with pytest.raises(DependencyError):
            run_pipeline(cfg, stages=["build"])


@pytest.fixture(scope="module")
def full_run(network_dir, tmp_path_factory):
    directory, entries = network_dir
    out = tmp_path_factory.mktemp("full-out")
    doc = {
        "networks": entries,
        "datasets": ["baseline", "topological", "embedding"],
        "models": {
            "baseline": ["logreg-baseline"],
            "topological": ["rf-default"],
            "embedding": ["svm-gaussian"],
        },
        "walks": SMALL_WALKS,
        "selection": {"folds": 3},
        "lda": {"sample_size": 8},
        "seed": 11,
    }
    cfg = load_config(write_config(directory, doc), output=out)
    run_pipeline(cfg)
    return cfg, out


class TestAllDatasets:
    def test_results_cover_every_cell(self, full_run):
        cfg, out = full_run
        lines = (out / "results.csv").read_text().splitlines()
        assert len(lines) == 1 + 3 * 1 * 2
        cells = {tuple(line.split(",")[:3]) for line in lines[1:]}
        assert ("baseline", "test", "logreg") in cells
        assert ("topological", "unseen", "random_forest") in cells
        assert ("embedding", "test", "svm") in cells

    def test_embedding_artifacts_written(self, full_run):
        cfg, out = full_run
        for nid in ("net00", "net01"):
            assert (out / "embeddings" / f"{nid}.emb.txt").is_file()
            assert (out / "embeddings" / f"{nid}.emb.bin").is_file()
        text = (out / "embeddings" / "net00.emb.txt").read_text().splitlines()
        n, d = text[0].split()
        assert int(d) == SMALL_WALKS["dimensions"]
        assert int(n) == 260

    def test_selection_outputs_per_kind(self, full_run):
        cfg, out = full_run
        baseline = json.loads((out / "selection" / "selection_baseline.json").read_text())
        assert set(baseline["selected"]) <= {"jc", "aa", "pa", "rai"}
        assert (out / "selection" / "importance_baseline.csv").is_file()
        assert (out / "selection" / "correlation_topological.csv").is_file()
        embedding = json.loads((out / "selection" / "selection_embedding.json").read_text())
        assert embedding.get("exempt") is True
        assert embedding["selected"] == embedding["columns"]

    def test_dataset_matrices_standardized(self, full_run):
        import numpy as np

        from linkpred.dataset import read_matrix_csv

        cfg, out = full_run
        train = read_matrix_csv(out / "datasets" / "topological.train.csv", "topological", "train")
        means = train.rows.mean(axis=0)
        assert np.abs(means).max() < 1e-9

    def test_lda_files_per_kind(self, full_run):
        cfg, out = full_run
        for kind in ("baseline", "topological", "embedding"):
            lines = (out / f"lda_{kind}.csv").read_text().splitlines()
            assert lines[0] == "coord,label"
            assert len(lines) == 9

    def test_model_files_load(self, full_run):
        from linkpred.models import load_model

        cfg, out = full_run
        model = load_model(out / "models" / "embedding.svm-gaussian.model")
        assert model.kind == "svm"
        assert model.hyperparameters.kernel == "gaussian"

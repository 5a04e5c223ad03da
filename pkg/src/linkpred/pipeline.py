"""Pipeline orchestration: stats -> split -> embed -> build -> select ->
train -> eval, each stage independently runnable from prior artifacts.

Every stage writes its outputs plus a manifest carrying the config hash and
the master seed, all artifacts are byte-deterministic given the seed, and a
DONE marker appears only when the full stage list completed.
"""

import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .dataset import (
    FeatureMatrix,
    NodePairSample,
    SplitSpec,
    assign_partitions,
    build_dataset,
    concat_matrices,
    read_matrix_csv,
    split_network,
    standardize,
    verify_no_leakage,
    write_matrix_csv,
    write_matrix_manifest,
)
from .embedding import (
    load_embeddings_binary,
    save_embeddings_binary,
    save_embeddings_text,
    train_embeddings,
)
from .errors import ConfigError, DependencyError, DomainError
from .evaluation import EvalReport, auroc, f1_accuracy, lda_probe, write_lda_csv, write_results_csv
from .graph import graph_stats, load_graph, write_degree_histogram
from .models import load_model, preset_config, save_model, score, train_model
from .models.base import PRESETS, ModelConfig
from .rng import derive_seed
from .selection import (
    correlation_matrix,
    rf_importance,
    rfecv,
    write_correlation_csv,
    write_importance_csv,
    write_selection_csv,
)
from .walks import WalkConfig, generate_walks

logger = logging.getLogger("linkpred")

STAGES = ("stats", "split", "embed", "build", "select", "train", "eval")
DATASET_KINDS = ("baseline", "topological", "embedding")

DEFAULT_MODEL_GRID = {
    "baseline": ("logreg-baseline", "rf-default", "svm-linear", "mlp-default"),
    "topological": ("logreg-topological", "rf-default", "svm-linear", "mlp-default"),
    "embedding": ("logreg-embedding", "rf-default", "svm-gaussian", "mlp-default"),
}

_WALK_KEYS = {f.name for f in dataclasses.fields(WalkConfig)} - {"seed"}


@dataclass(frozen=True)
class NetworkSpec:
    network_id: str
    edge_file: Path
    attribute_file: Path
    role: str  # seen | unseen


@dataclass
class PipelineConfig:
    networks: tuple
    datasets: tuple
    model_presets: dict
    positive_fraction: float
    train_fraction: float
    walk_overrides: dict
    selection_folds: int
    lda_sample: int
    output: Path
    seed: int

    def doc(self) -> dict:
        """Canonical dict form, the basis of the config hash."""
        return {
            "networks": [
                {
                    "id": n.network_id,
                    "edges": str(n.edge_file),
                    "attributes": str(n.attribute_file),
                    "role": n.role,
                }
                for n in self.networks
            ],
            "datasets": list(self.datasets),
            "models": {k: list(v) for k, v in self.model_presets.items()},
            "split": {
                "positive_fraction": self.positive_fraction,
                "train_fraction": self.train_fraction,
            },
            "walks": dict(sorted(self.walk_overrides.items())),
            "selection": {"folds": self.selection_folds},
            "lda": {"sample_size": self.lda_sample},
            "seed": self.seed,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.doc(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()

    def split_spec(self) -> SplitSpec:
        return SplitSpec(
            seed=derive_seed(self.seed, "split"),
            seen_networks=tuple(n.network_id for n in self.networks if n.role == "seen"),
            unseen_networks=tuple(n.network_id for n in self.networks if n.role == "unseen"),
            positive_fraction=self.positive_fraction,
            train_fraction=self.train_fraction,
        )

    def walk_config(self, network_id: str) -> WalkConfig:
        return WalkConfig(seed=derive_seed(self.seed, "embed", network_id), **self.walk_overrides)

    def has_unseen(self) -> bool:
        return any(n.role == "unseen" for n in self.networks)


def load_config(path=None, doc=None, output=None, seed=None) -> PipelineConfig:
    """Build and validate a PipelineConfig from a JSON file or a dict.

    `output` and `seed` override the file's values (CLI flags win).
    """
    if doc is None:
        if path is None:
            raise ConfigError("a config file or document is required")
        try:
            doc = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    base = Path(path).parent if path is not None else Path(".")

    networks = []
    ids = set()
    for i, net in enumerate(doc.get("networks", [])):
        try:
            nid = str(net["id"])
            edge_file = (base / net["edges"]).resolve()
            attr_file = (base / net["attributes"]).resolve()
        except (KeyError, TypeError):
            raise ConfigError(f"network entry {i} needs id, edges and attributes") from None
        role = net.get("role", "seen")
        if role not in ("seen", "unseen"):
            raise ConfigError(f"network {nid!r}: role must be seen or unseen, got {role!r}")
        if nid in ids:
            raise ConfigError(f"duplicate network id {nid!r}")
        ids.add(nid)
        for p in (edge_file, attr_file):
            if not p.is_file():
                raise ConfigError(f"network {nid!r}: file does not exist: {p}")
        networks.append(NetworkSpec(nid, edge_file, attr_file, role))
    if not any(n.role == "seen" for n in networks):
        raise ConfigError("at least one seen network is required")

    datasets = tuple(doc.get("datasets", ["baseline", "topological", "embedding"]))
    if not datasets:
        raise ConfigError("at least one dataset kind is required")
    for kind in datasets:
        if kind not in DATASET_KINDS:
            raise ConfigError(f"unknown dataset kind {kind!r}; choose from {DATASET_KINDS}")
    if len(set(datasets)) != len(datasets):
        raise ConfigError("dataset kinds must be unique")

    presets_doc = doc.get("models", {})
    model_presets = {}
    for kind in datasets:
        names = tuple(presets_doc.get(kind, DEFAULT_MODEL_GRID[kind]))
        if not names:
            raise ConfigError(f"no model presets for dataset {kind!r}")
        for name in names:
            if name not in PRESETS:
                raise ConfigError(f"unknown model preset {name!r}; choose from {sorted(PRESETS)}")
        model_presets[kind] = names

    split_doc = doc.get("split", {})
    walks_doc = doc.get("walks", {})
    bad = set(walks_doc) - _WALK_KEYS
    if bad:
        raise ConfigError(f"unknown walk settings: {sorted(bad)}")

    # like the network files, a relative output in the doc is anchored at the
    # config file's directory; an explicit override stays caller-relative
    out_dir = Path(output) if output is not None else base / doc.get("output", "linkpred-out")
    master_seed = int(seed) if seed is not None else int(doc.get("seed", 0))
    cfg = PipelineConfig(
        networks=tuple(networks),
        datasets=datasets,
        model_presets=model_presets,
        positive_fraction=float(split_doc.get("positive_fraction", 0.02)),
        train_fraction=float(split_doc.get("train_fraction", 0.8)),
        walk_overrides=dict(walks_doc),
        selection_folds=int(doc.get("selection", {}).get("folds", 5)),
        lda_sample=int(doc.get("lda", {}).get("sample_size", 200)),
        output=out_dir,
        seed=master_seed,
    )
    cfg.split_spec()  # surfaces invalid fractions as ConfigError now
    if cfg.selection_folds < 2:
        raise ConfigError(f"selection folds must be >= 2, got {cfg.selection_folds}")
    if cfg.lda_sample < 2:
        raise ConfigError(f"lda sample_size must be >= 2, got {cfg.lda_sample}")
    return cfg


def _write_manifest(directory: Path, cfg: PipelineConfig, stage: str, files, extra=None) -> None:
    doc = {
        "stage": stage,
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "files": sorted(str(Path(f).relative_to(cfg.output)) for f in files),
    }
    if extra:
        doc.update(extra)
    (directory / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _require(path: Path, stage: str) -> Path:
    if not path.exists():
        raise DependencyError(f"stage {stage!r} needs missing artifact {path}; run the earlier stages first")
    return path


def _load_networks(cfg: PipelineConfig):
    return [(net, load_graph(net.edge_file, net.attribute_file, net.network_id)) for net in cfg.networks]


def _load_train_graphs(cfg: PipelineConfig, stage: str):
    graphs = {}
    for net in cfg.networks:
        edge_file = _require(cfg.output / "splits" / f"{net.network_id}.train-edges", stage)
        graphs[net.network_id] = load_graph(edge_file, net.attribute_file, net.network_id)
    return graphs


# -- stages ------------------------------------------------------------


def stage_stats(cfg: PipelineConfig) -> None:
    out = cfg.output / "stats"
    out.mkdir(parents=True, exist_ok=True)
    files = []
    stats_path = out / "stats.csv"
    with stats_path.open("w") as fh:
        fh.write("network,n,m,avg_degree,clustering,role\n")
        for net, g in _load_networks(cfg):
            s = graph_stats(g)
            fh.write(f"{net.network_id},{s.n},{s.m},{s.d:.6f},{s.C:.6f},{net.role}\n")
            hist = out / f"degree_hist_{net.network_id}.csv"
            write_degree_histogram(hist, g)
            files.append(hist)
    files.append(stats_path)
    _write_manifest(out, cfg, "stats", files)


def stage_split(cfg: PipelineConfig) -> None:
    out = cfg.output / "splits"
    out.mkdir(parents=True, exist_ok=True)
    spec = cfg.split_spec()
    files = []
    samples_by_network = {}
    originals = {}
    for net, g in _load_networks(cfg):
        g_train, positives, negatives = split_network(g, spec)
        verify_no_leakage(g, g_train, positives, negatives)
        samples_by_network[net.network_id] = positives + negatives
        originals[net.network_id] = g.original_ids
        edge_path = out / f"{net.network_id}.train-edges"
        with edge_path.open("w") as fh:
            fh.write(f"# pruned train graph of network {net.network_id}\n")
            for u, v in g_train.edges():
                fh.write(f"{g.original_ids[u]} {g.original_ids[v]}\n")
        files.append(edge_path)
    parts = assign_partitions(samples_by_network, spec)
    samples_path = out / "samples.csv"
    with samples_path.open("w") as fh:
        fh.write("network,u,v,label,partition\n")
        for partition in ("train", "test", "unseen"):
            for s in parts[partition]:
                ids = originals[s.network_id]
                fh.write(f"{s.network_id},{ids[s.u]},{ids[s.v]},{s.label},{partition}\n")
    files.append(samples_path)
    counts = {p: len(parts[p]) for p in parts}
    _write_manifest(out, cfg, "split", files, extra={"sample_counts": counts})


def _read_samples(cfg: PipelineConfig, stage: str):
    """samples.csv -> {partition: {network: [NodePairSample,...]}} in file order."""
    path = _require(cfg.output / "splits" / "samples.csv", stage)
    id_maps = {}
    for net in cfg.networks:
        g = load_graph(net.edge_file, net.attribute_file, net.network_id)
        id_maps[net.network_id] = {oid: i for i, oid in enumerate(g.original_ids)}
    out = {"train": {}, "test": {}, "unseen": {}}
    with path.open() as fh:
        header = fh.readline().strip()
        if header != "network,u,v,label,partition":
            raise DependencyError(f"{path}: unexpected samples header {header!r}")
        for line in fh:
            network, u, v, label, partition = line.strip().split(",")
            ids = id_maps[network]
            sample = NodePairSample(network, ids[u], ids[v], int(label))
            out[partition].setdefault(network, []).append(sample)
    return out


def stage_embed(cfg: PipelineConfig) -> None:
    out = cfg.output / "embeddings"
    out.mkdir(parents=True, exist_ok=True)
    if "embedding" not in cfg.datasets:
        _write_manifest(out, cfg, "embed", [], extra={"skipped": "embedding dataset not requested"})
        return
    graphs = _load_train_graphs(cfg, "embed")
    files = []
    reports = {}
    for net in cfg.networks:
        g_train = graphs[net.network_id]
        wcfg = cfg.walk_config(net.network_id)
        report = {}
        walks = generate_walks(g_train, wcfg, report)
        table = train_embeddings(walks, wcfg, g_train.node_count, network_id=net.network_id)
        text_path = out / f"{net.network_id}.emb.txt"
        bin_path = out / f"{net.network_id}.emb.bin"
        save_embeddings_text(text_path, table)
        save_embeddings_binary(bin_path, table)
        files.extend([text_path, bin_path])
        reports[net.network_id] = report
    _write_manifest(out, cfg, "embed", files, extra={"walks": reports})


def stage_build(cfg: PipelineConfig) -> None:
    out = cfg.output / "datasets"
    out.mkdir(parents=True, exist_ok=True)
    samples = _read_samples(cfg, "build")
    graphs = _load_train_graphs(cfg, "build")
    tables = {}
    if "embedding" in cfg.datasets:
        for net in cfg.networks:
            bin_path = _require(cfg.output / "embeddings" / f"{net.network_id}.emb.bin", "build")
            tables[net.network_id] = load_embeddings_binary(bin_path)
    files = []
    for kind in cfg.datasets:
        matrices = {}
        for partition in ("train", "test", "unseen"):
            parts = []
            for network in sorted(samples[partition]):
                emb = tables.get(network) if kind == "embedding" else None
                parts.append(
                    build_dataset(kind, samples[partition][network], graphs[network], emb, partition)
                )
            if parts:
                matrices[partition] = concat_matrices(parts, partition)
        if "train" not in matrices or "test" not in matrices:
            raise DomainError(
                f"dataset {kind!r} is missing train or test samples; "
                "check the split stage and network roles"
            )
        others = [matrices[p] for p in ("test", "unseen") if p in matrices]
        train_std, others_std, params = standardize(matrices["train"], others)
        matrices["train"] = train_std
        for mat in others_std:
            matrices[mat.partition] = mat
        for partition, mat in matrices.items():
            csv_path = out / f"{kind}.{partition}.csv"
            write_matrix_csv(csv_path, mat)
            manifest_path = out / f"{kind}.{partition}.manifest.json"
            write_matrix_manifest(
                manifest_path, mat, cfg.seed, params if partition == "train" else None
            )
            files.extend([csv_path, manifest_path])
    _write_manifest(out, cfg, "build", files)


def _selection_path(cfg: PipelineConfig, kind: str) -> Path:
    return cfg.output / "selection" / f"selection_{kind}.json"


def stage_select(cfg: PipelineConfig) -> None:
    out = cfg.output / "selection"
    out.mkdir(parents=True, exist_ok=True)
    files = []
    notes = {}
    for kind in cfg.datasets:
        train = read_matrix_csv(
            _require(cfg.output / "datasets" / f"{kind}.train.csv", "select"), kind, "train"
        )
        doc = {"kind": kind, "columns": list(train.column_names)}
        if kind == "embedding":
            # the fixed node-feature subset is already applied when building
            doc["selected"] = list(train.column_names)
            doc["exempt"] = True
        else:
            counts = [int((train.labels == c).sum()) for c in (0, 1)]
            folds = min(cfg.selection_folds, *counts)
            if folds < 2:
                doc["selected"] = list(train.column_names)
                doc["skipped"] = f"class counts {counts} cannot support cross-validation"
                notes[kind] = doc["skipped"]
            else:
                if folds < cfg.selection_folds:
                    notes[kind] = f"folds reduced to {folds} to keep both classes in every fold"
                report = rfecv(train, folds=folds, seed=derive_seed(cfg.seed, "select", kind))
                doc["selected"] = list(report.selected)
                doc["ranking"] = list(report.ranking)
                doc["cv_scores"] = {str(k): v for k, v in sorted(report.cv_scores.items())}
                doc["folds"] = folds
                csv_path = out / f"selection_{kind}.csv"
                write_selection_csv(csv_path, report)
                files.append(csv_path)
            imp_cfg = ModelConfig(trees=100, seed=derive_seed(cfg.seed, "importance", kind))
            imp_path = out / f"importance_{kind}.csv"
            write_importance_csv(imp_path, rf_importance(train, imp_cfg))
            corr_path = out / f"correlation_{kind}.csv"
            write_correlation_csv(corr_path, correlation_matrix(train))
            files.extend([imp_path, corr_path])
        json_path = _selection_path(cfg, kind)
        json_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        files.append(json_path)
    _write_manifest(out, cfg, "select", files, extra={"notes": notes} if notes else None)


def _project_columns(matrix: FeatureMatrix, columns) -> FeatureMatrix:
    missing = [c for c in columns if c not in matrix.column_names]
    if missing:
        raise DependencyError(f"matrix lacks columns {missing} expected by the model")
    keep = [matrix.column_names.index(c) for c in columns]
    return FeatureMatrix(
        tuple(columns), matrix.rows[:, keep], matrix.labels, matrix.dataset_kind, matrix.partition
    )


def _selected_columns(cfg: PipelineConfig, kind: str, stage: str):
    doc = json.loads(_require(_selection_path(cfg, kind), stage).read_text())
    return tuple(doc["selected"])


def stage_train(cfg: PipelineConfig) -> None:
    out = cfg.output / "models"
    out.mkdir(parents=True, exist_ok=True)
    files = []
    for kind in cfg.datasets:
        train = read_matrix_csv(
            _require(cfg.output / "datasets" / f"{kind}.train.csv", "train"), kind, "train"
        )
        selected = _selected_columns(cfg, kind, "train")
        projected = _project_columns(train, selected)
        for preset in cfg.model_presets[kind]:
            model_kind, mcfg = preset_config(preset, derive_seed(cfg.seed, "train", kind, preset))
            logger.info("training %s on %s (%d rows, %d features)",
                        preset, kind, projected.n_rows, len(selected))
            model = train_model(model_kind, projected, mcfg)
            path = out / f"{kind}.{preset}.model"
            save_model(path, model)
            files.append(path)
    _write_manifest(out, cfg, "train", files)


def stage_eval(cfg: PipelineConfig) -> None:
    out = cfg.output
    out.mkdir(parents=True, exist_ok=True)
    reports = []
    files = []
    for kind in cfg.datasets:
        partitions = ["test"] + (["unseen"] if cfg.has_unseen() else [])
        matrices = {
            p: read_matrix_csv(
                _require(out / "datasets" / f"{kind}.{p}.csv", "eval"), kind, p
            )
            for p in partitions
        }
        for preset in cfg.model_presets[kind]:
            model = load_model(_require(out / "models" / f"{kind}.{preset}.model", "eval"))
            for partition in partitions:
                projected = _project_columns(matrices[partition], model.feature_columns)
                scores = score(model, projected)
                f1, acc = f1_accuracy(scores, projected.labels, model.threshold)
                reports.append(
                    EvalReport(
                        auroc=auroc(scores, projected.labels),
                        f1=f1,
                        accuracy=acc,
                        partition=partition,
                        dataset_kind=kind,
                        model_kind=model.kind,
                        n_pos=int(projected.labels.sum()),
                        n_neg=int((projected.labels == 0).sum()),
                    )
                )
        probe = lda_probe(
            matrices["test"],
            min(cfg.lda_sample, matrices["test"].n_rows),
            derive_seed(cfg.seed, "lda", kind),
        )
        lda_path = out / f"lda_{kind}.csv"
        write_lda_csv(lda_path, probe)
        files.append(lda_path)
    results_path = out / "results.csv"
    write_results_csv(results_path, reports)
    files.append(results_path)
    _write_manifest(out, cfg, "eval", files)


STAGE_FUNCS = {
    "stats": stage_stats,
    "split": stage_split,
    "embed": stage_embed,
    "build": stage_build,
    "select": stage_select,
    "train": stage_train,
    "eval": stage_eval,
}


def run_pipeline(cfg: PipelineConfig, stages=None) -> Path:
    """Run the requested stages in canonical order; returns the output dir.

    The DONE marker is written only when every stage ran in this invocation,
    so its absence flags partial or aborted runs.
    """
    if stages is None:
        requested = list(STAGES)
    else:
        requested = list(stages)
        unknown = [s for s in requested if s not in STAGES]
        if unknown:
            raise ConfigError(f"unknown stages {unknown}; choose from {list(STAGES)}")
        requested = [s for s in STAGES if s in requested]
    cfg.output.mkdir(parents=True, exist_ok=True)
    done = cfg.output / "DONE"
    if done.exists():
        done.unlink()
    for name in requested:
        logger.info("stage %s: starting", name)
        try:
            STAGE_FUNCS[name](cfg)
        except Exception as exc:
            logger.error("stage %s failed: %s", name, exc)
            raise
        logger.info("stage %s: done", name)
    if requested == list(STAGES):
        done.write_text(cfg.config_hash() + "\n")
    return cfg.output

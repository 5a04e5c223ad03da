"""Balanced link-prediction datasets: edge holdout, negative sampling, features.

Protocol per network: remove a fraction of edges uniformly at random (these
become positive samples), sample the same number of non-edges as negatives,
and compute every feature on the pruned graph only. Seen networks are pooled
and split train/test; unseen networks contribute all samples to a held-out
"unseen" partition.
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embedding import edge_embedding
from .errors import ConfigError, DomainError, ParseError, SamplingError
from .graph import ATTRIBUTE_COLUMNS, AttributedGraph
from .metrics import score_pairs
from .rng import make_rng

DATASET_KINDS = ("baseline", "topological", "embedding")
PARTITIONS = ("train", "test", "unseen")

BASELINE_COLUMNS = ("jc", "aa", "pa", "rai")
PAIR_FEATURE_COLUMNS = (
    "same_dorm",
    "same_year",
    "year_diff",
    "high_school_1",
    "high_school_2",
    "major_1",
    "major_2",
    "same_faculty",
    "same_gender",
)
# node-based features kept alongside the Hadamard block
EMBEDDING_NODE_COLUMNS = ("same_year", "same_dorm")

_YEAR_COL = ATTRIBUTE_COLUMNS.index("year")


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    seen_networks: tuple = ()
    unseen_networks: tuple = ()
    positive_fraction: float = 0.02
    train_fraction: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "seen_networks", tuple(self.seen_networks))
        object.__setattr__(self, "unseen_networks", tuple(self.unseen_networks))
        if not 0.0 < self.positive_fraction < 1.0:
            raise ConfigError(f"positive_fraction must be in (0, 1), got {self.positive_fraction}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        overlap = set(self.seen_networks) & set(self.unseen_networks)
        if overlap:
            raise ConfigError(f"networks listed as both seen and unseen: {sorted(overlap)}")


@dataclass(frozen=True)
class NodePairSample:
    """One labeled node pair; label 1 = held-out edge, 0 = sampled non-edge."""

    network_id: str
    u: int
    v: int
    label: int

    def __post_init__(self):
        if self.u == self.v:
            raise DomainError("sample endpoints must differ")
        if self.label not in (0, 1):
            raise DomainError(f"label must be 0 or 1, got {self.label}")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class PairFeatures:
    same_dorm: int
    same_year: int
    year_diff: float
    high_school_1: int
    high_school_2: int
    major_1: int
    major_2: int
    same_faculty: int
    same_gender: int

    def as_vector(self) -> np.ndarray:
        return np.array(
            [
                self.same_dorm,
                self.same_year,
                self.year_diff,
                self.high_school_1,
                self.high_school_2,
                self.major_1,
                self.major_2,
                self.same_faculty,
                self.same_gender,
            ],
            dtype=np.float64,
        )


@dataclass
class FeatureMatrix:
    column_names: tuple
    rows: np.ndarray
    labels: np.ndarray
    dataset_kind: str
    partition: str

    def __post_init__(self):
        self.column_names = tuple(self.column_names)
        self.rows = np.asarray(self.rows, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.column_names):
            raise DomainError(
                f"rows must be 2-D with {len(self.column_names)} columns, got shape {self.rows.shape}"
            )
        if self.rows.shape[0] != self.labels.shape[0]:
            raise DomainError("row count and label count differ")
        if not np.isfinite(self.rows).all():
            raise DomainError("feature matrix contains non-finite values")
        if self.labels.size and not np.isin(self.labels, (0, 1)).all():
            raise DomainError("labels must be binary 0/1")
        if self.dataset_kind not in DATASET_KINDS:
            raise DomainError(f"unknown dataset kind {self.dataset_kind!r}")
        if self.partition not in PARTITIONS:
            raise DomainError(f"unknown partition {self.partition!r}")

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])


def split_network(g: AttributedGraph, spec: SplitSpec):
    """Hold out positive edges and sample balanced negatives for one network.

    Returns (pruned graph, positives, negatives). The pruned graph is the
    original minus the held-out edges; every feature downstream must be
    computed on it.
    """
    m = g.num_edges
    if spec.positive_fraction * m < 1.0:
        raise DomainError(
            f"positive_fraction {spec.positive_fraction} of {m} edges holds out less than one edge"
        )
    k = int(round(spec.positive_fraction * m))
    rng = make_rng(spec.seed, "split", g.network_id)
    edges = g.edges()
    chosen = rng.choice(m, size=k, replace=False)
    chosen.sort()
    held_out = [edges[i] for i in chosen]
    g_train = g.remove_edges(held_out)
    positives = [NodePairSample(g.network_id, u, v, 1) for u, v in held_out]
    negatives = _sample_negatives(g, k, rng)
    return g_train, positives, negatives


def _sample_negatives(g, count, rng):
    """Rejection-sample `count` distinct unordered non-edges of g."""
    n = g.node_count
    cap = 100 * count
    attempts = 0
    taken = set()
    out = []
    while len(out) < count:
        if attempts >= cap:
            raise SamplingError(
                f"could not find {count} non-edges in network {g.network_id!r} "
                f"after {attempts} draws"
            )
        chunk = min(max(64, count - len(out)), cap - attempts)
        cand = rng.integers(0, n, size=(chunk, 2))
        attempts += chunk
        for a, b in cand:
            if a == b:
                continue
            pair = (int(a), int(b)) if a < b else (int(b), int(a))
            if pair in taken or pair in g.edge_set:
                continue
            taken.add(pair)
            out.append(NodePairSample(g.network_id, pair[0], pair[1], 0))
            if len(out) == count:
                break
    return out


def verify_no_leakage(g, g_train, positives, negatives) -> None:
    """Exhaustively check the split invariants; raises on any violation."""
    for s in positives:
        if g_train.has_edge(s.u, s.v):
            raise DomainError(f"positive ({s.u}, {s.v}) still present in the pruned graph")
        if not g.has_edge(s.u, s.v):
            raise DomainError(f"positive ({s.u}, {s.v}) was never an edge")
    for s in negatives:
        if g.has_edge(s.u, s.v):
            raise DomainError(f"negative ({s.u}, {s.v}) is an edge of the original graph")
    if g_train.num_edges + len(positives) != g.num_edges:
        raise DomainError("pruned graph size does not account for every held-out edge")


def mean_known_year(g: AttributedGraph) -> float:
    """Mean enrollment year over nodes whose year is recorded; 0.0 if none."""
    years = g.attributes[:, _YEAR_COL]
    known = years[years != 0]
    return float(known.mean()) if known.size else 0.0


def node_pair_features(g: AttributedGraph, u: int, v: int, year_mean: float) -> PairFeatures:
    """Attribute-derived features of a node pair, symmetric in u and v.

    Equality flags are 0 whenever either side's attribute is missing (code 0).
    Missing years are imputed with year_mean before taking the difference.
    """
    a, b = g.attribute(u), g.attribute(v)

    def same(x, y):
        return 1 if x == y and x != 0 else 0

    ya = a.year if a.year != 0 else year_mean
    yb = b.year if b.year != 0 else year_mean
    hs_lo, hs_hi = sorted((a.high_school, b.high_school))
    mj_lo, mj_hi = sorted((a.major, b.major))
    return PairFeatures(
        same_dorm=same(a.dorm, b.dorm),
        same_year=same(a.year, b.year),
        year_diff=float(abs(ya - yb)),
        high_school_1=hs_lo,
        high_school_2=hs_hi,
        major_1=mj_lo,
        major_2=mj_hi,
        same_faculty=same(a.status, b.status),
        same_gender=same(a.gender, b.gender),
    )


def assign_partitions(samples_by_network: dict, spec: SplitSpec) -> dict:
    """Pool per-network samples into train/test/unseen partitions.

    Seen networks are shuffled and split train_fraction/rest separately per
    label class (so the pooled partitions stay balanced per network), unseen
    networks contribute everything to the unseen partition.
    """
    seen = set(spec.seen_networks)
    unseen = set(spec.unseen_networks)
    parts = {"train": [], "test": [], "unseen": []}
    for network in sorted(samples_by_network):
        samples = samples_by_network[network]
        if network in seen:
            for label in (1, 0):
                group = [s for s in samples if s.label == label]
                perm = make_rng(spec.seed, "partition", network, label).permutation(len(group))
                n_train = int(round(spec.train_fraction * len(group)))
                for i, j in enumerate(perm):
                    parts["train" if i < n_train else "test"].append(group[j])
        elif network in unseen:
            parts["unseen"].extend(samples)
        else:
            raise ConfigError(f"network {network!r} is not listed as seen or unseen")
    return parts


def build_dataset(kind, samples, g_train, emb=None, partition="train") -> FeatureMatrix:
    """Featurize one network's samples on its pruned graph.

    Column order: baseline = (jc, aa, pa, rai); topological appends the nine
    node-based features; embedding = (same_year, same_dorm) followed by the
    Hadamard product of the endpoint embeddings.
    """
    if kind not in DATASET_KINDS:
        raise DomainError(f"unknown dataset kind {kind!r}")
    if (emb is not None) != (kind == "embedding"):
        raise DomainError("an embedding table is required exactly when kind='embedding'")
    if not samples:
        raise DomainError("no samples to featurize")
    for s in samples:
        if s.network_id != g_train.network_id:
            raise DomainError(
                f"sample from network {s.network_id!r} does not match graph {g_train.network_id!r}"
            )
    pairs = [(s.u, s.v) for s in samples]
    labels = np.array([s.label for s in samples], dtype=np.int64)

    if kind == "baseline":
        cols = BASELINE_COLUMNS
        rows = np.array([[p.jc, p.aa, p.pa, p.rai] for p in score_pairs(g_train, pairs)])
    elif kind == "topological":
        cols = BASELINE_COLUMNS + PAIR_FEATURE_COLUMNS
        ym = mean_known_year(g_train)
        rows = np.empty((len(samples), len(cols)))
        for i, (p, (u, v)) in enumerate(zip(score_pairs(g_train, pairs), pairs)):
            rows[i, :4] = (p.jc, p.aa, p.pa, p.rai)
            rows[i, 4:] = node_pair_features(g_train, u, v, ym).as_vector()
    else:
        cols = EMBEDDING_NODE_COLUMNS + tuple(f"hadamard_{i}" for i in range(emb.dims))
        ym = mean_known_year(g_train)
        rows = np.empty((len(samples), len(cols)))
        for i, (u, v) in enumerate(pairs):
            feats = node_pair_features(g_train, u, v, ym)
            rows[i, 0] = feats.same_year
            rows[i, 1] = feats.same_dorm
            rows[i, 2:] = edge_embedding(emb, u, v)
    return FeatureMatrix(cols, rows, labels, kind, partition)


def concat_matrices(parts, partition=None) -> FeatureMatrix:
    """Stack per-network matrices of the same kind into one partition matrix."""
    if not parts:
        raise DomainError("nothing to concatenate")
    first = parts[0]
    for p in parts[1:]:
        if p.column_names != first.column_names or p.dataset_kind != first.dataset_kind:
            raise DomainError("matrices disagree on columns or dataset kind")
    rows = np.concatenate([p.rows for p in parts], axis=0)
    labels = np.concatenate([p.labels for p in parts])
    return FeatureMatrix(first.column_names, rows, labels, first.dataset_kind, partition or first.partition)


@dataclass(frozen=True)
class Standardization:
    mean: np.ndarray
    scale: np.ndarray
    column_names: tuple


def standardize(train: FeatureMatrix, others=()):
    """Fit per-column mean/scale on the train matrix, apply everywhere.

    Uses population variance; zero-variance columns are centered with scale 1.
    Returns (train', list of others', Standardization).
    """
    if train.n_rows == 0:
        raise DomainError("cannot standardize an empty train matrix")
    mean = train.rows.mean(axis=0)
    scale = np.sqrt(train.rows.var(axis=0))
    scale = np.where(scale == 0.0, 1.0, scale)
    params = Standardization(mean=mean, scale=scale, column_names=train.column_names)
    transformed = [apply_standardization(m, params) for m in (train, *others)]
    return transformed[0], transformed[1:], params


def apply_standardization(matrix: FeatureMatrix, params: Standardization) -> FeatureMatrix:
    if matrix.column_names != params.column_names:
        raise DomainError("standardization parameters were fitted on different columns")
    rows = (matrix.rows - params.mean) / params.scale
    return FeatureMatrix(matrix.column_names, rows, matrix.labels, matrix.dataset_kind, matrix.partition)


def write_matrix_csv(path, matrix: FeatureMatrix) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(matrix.column_names) + ["label"])
        for row, label in zip(matrix.rows, matrix.labels):
            writer.writerow([repr(float(x)) for x in row] + [int(label)])


def read_matrix_csv(path, dataset_kind, partition) -> FeatureMatrix:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[-1] != "label":
            raise ParseError(f"{path}: matrix CSV must end with a 'label' column", 1)
        cols = tuple(header[:-1])
        rows, labels = [], []
        for line_no, rec in enumerate(reader, start=2):
            if len(rec) != len(header):
                raise ParseError(f"{path}: expected {len(header)} fields, got {len(rec)}", line_no)
            rows.append([float(x) for x in rec[:-1]])
            labels.append(int(rec[-1]))
    return FeatureMatrix(
        cols,
        np.array(rows, dtype=np.float64).reshape(len(rows), len(cols)),
        np.array(labels, dtype=np.int64),
        dataset_kind,
        partition,
    )


def write_matrix_manifest(path, matrix: FeatureMatrix, seed: int, params=None) -> None:
    doc = {
        "kind": matrix.dataset_kind,
        "partition": matrix.partition,
        "seed": int(seed),
        "columns": list(matrix.column_names),
        "rows": matrix.n_rows,
    }
    if params is not None:
        doc["standardization"] = {
            "mean": [float(x) for x in params.mean],
            "scale": [float(x) for x in params.scale],
        }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")

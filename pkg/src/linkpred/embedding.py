"""Skip-gram embeddings with negative sampling over random-walk corpora.

Training pairs are every (center, context) within the window across all
walks; negatives come from the walk unigram distribution raised to 3/4.
Updates run in deterministic mini-batches so identical seeds reproduce the
vectors bit for bit.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError
from .rng import make_rng
from .walks import WalkConfig, build_alias, generate_walks

_BATCH = 1024
_MAGIC = b"EMBT\x01"


@dataclass
class EmbeddingTable:
    vectors: np.ndarray
    config: WalkConfig
    network_id: str = ""

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise DomainError("embedding vectors must form a 2-D array")
        if not np.isfinite(self.vectors).all():
            raise DomainError("embedding vectors must be finite")

    @property
    def node_count(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def dims(self) -> int:
        return int(self.vectors.shape[1])

    def vector(self, node: int) -> np.ndarray:
        if not 0 <= node < self.node_count:
            raise DomainError(f"no embedding vector for node {node}")
        return self.vectors[node]


def _sigmoid(x):
    x = np.asarray(x, dtype=np.float64)
    return np.exp(-np.logaddexp(0.0, -x))


def skipgram_loss_grad(center, context, negatives):
    """Loss and gradients of one (center, context, negatives) sample.

    L = -log sigma(c.o) - sum_n log sigma(-c.n), computed with logaddexp so
    large magnitudes stay finite. Returns (loss, g_center, g_context,
    g_negatives) where g_negatives has one row per negative vector.
    """
    center = np.asarray(center, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    negatives = np.atleast_2d(np.asarray(negatives, dtype=np.float64))
    pos = float(center @ context)
    neg = negatives @ center
    loss = np.logaddexp(0.0, -pos) + np.logaddexp(0.0, neg).sum()
    s_pos = _sigmoid(pos)
    s_neg = _sigmoid(neg)
    g_center = (s_pos - 1.0) * context + s_neg @ negatives
    g_context = (s_pos - 1.0) * center
    g_negatives = s_neg[:, None] * center[None, :]
    return float(loss), g_center, g_context, g_negatives


def _walk_pairs(walks, window):
    """All (center, context) pairs within the window, both directions."""
    centers, contexts = [], []
    for walk in walks:
        arr = np.asarray(walk.nodes, dtype=np.int64)
        for off in range(1, min(window, arr.size - 1) + 1):
            centers.append(arr[:-off])
            contexts.append(arr[off:])
            centers.append(arr[off:])
            contexts.append(arr[:-off])
    if not centers:
        raise DomainError("walks are too short to produce any training pair")
    return np.concatenate(centers), np.concatenate(contexts)


def train_embeddings(walks, cfg: WalkConfig, node_count: int, network_id="", loss_history=None) -> EmbeddingTable:
    """Skip-gram with negative sampling; one vector per node in [0, node_count).

    Nodes that never occur in the corpus (isolated nodes) keep the zero
    vector. The learning rate decays linearly from cfg.learning_rate to
    1e-4 of itself across all batches. Passing a list as loss_history
    records the mean sample loss of every batch.
    """
    if not walks:
        raise DomainError("cannot train embeddings without walks")
    if node_count < 1:
        raise DomainError("node_count must be positive")
    counts = np.bincount(
        np.concatenate([np.asarray(w.nodes, dtype=np.int64) for w in walks]),
        minlength=node_count,
    ).astype(np.float64)
    if counts.size > node_count:
        raise DomainError("walks mention nodes outside [0, node_count)")

    centers, contexts = _walk_pairs(walks, cfg.window)
    n_pairs = centers.size
    noise_prob, noise_alias = build_alias(counts**0.75)

    d = cfg.dimensions
    init_rng = make_rng(cfg.seed, "sgns-init")
    vec_in = (init_rng.random((node_count, d)) - 0.5) / d
    vec_in[counts == 0] = 0.0
    vec_out = np.zeros((node_count, d))

    k = cfg.negatives_per_positive
    n_batches = math.ceil(n_pairs / _BATCH)
    total_steps = cfg.epochs * n_batches
    step = 0
    for epoch in range(cfg.epochs):
        order = make_rng(cfg.seed, "sgns-order", epoch).permutation(n_pairs)
        neg_rng = make_rng(cfg.seed, "sgns-neg", epoch)
        for lo in range(0, n_pairs, _BATCH):
            batch = order[lo : lo + _BATCH]
            c, o = centers[batch], contexts[batch]
            draw = neg_rng.integers(node_count, size=(batch.size, k))
            keep = neg_rng.random((batch.size, k)) < noise_prob[draw]
            negs = np.where(keep, draw, noise_alias[draw])

            vc = vec_in[c]
            vo = vec_out[o]
            vn = vec_out[negs]
            pos_score = np.einsum("bd,bd->b", vc, vo)
            neg_score = np.einsum("bkd,bd->bk", vn, vc)
            s_pos = _sigmoid(pos_score)
            s_neg = _sigmoid(neg_score)

            if loss_history is not None:
                loss = np.logaddexp(0.0, -pos_score) + np.logaddexp(0.0, neg_score).sum(axis=1)
                loss_history.append(float(loss.mean()))

            lr = cfg.learning_rate * max(1.0 - step / total_steps, 1e-4)
            step += 1
            g_pos = s_pos - 1.0
            grad_c = g_pos[:, None] * vo + np.einsum("bk,bkd->bd", s_neg, vn)
            grad_o = g_pos[:, None] * vc
            grad_n = s_neg[:, :, None] * vc[:, None, :]
            np.add.at(vec_in, c, -lr * grad_c)
            np.add.at(vec_out, o, -lr * grad_o)
            np.add.at(vec_out, negs.reshape(-1), -lr * grad_n.reshape(-1, d))

    if not np.isfinite(vec_in).all():
        raise DomainError("embedding training produced non-finite vectors")
    return EmbeddingTable(vectors=vec_in, config=cfg, network_id=network_id)


def edge_embedding(tbl: EmbeddingTable, u: int, v: int) -> np.ndarray:
    """Hadamard (elementwise) product of the two endpoint vectors."""
    return tbl.vector(u) * tbl.vector(v)


def grid_search_embeddings(g, grid, evaluator):
    """Train and score every config; rank by score desc, ties to fewer dims.

    A config whose training or evaluation raises is kept in the ranking with
    a NaN score, sorted after every scored config.
    """
    if not grid:
        raise DomainError("empty embedding search grid")
    scored = []
    for cfg in grid:
        try:
            walks = generate_walks(g, cfg)
            tbl = train_embeddings(walks, cfg, g.node_count, network_id=g.network_id)
            scored.append((cfg, float(evaluator(tbl))))
        except Exception:  # noqa: BLE001 - one bad setting must not sink the sweep
            scored.append((cfg, float("nan")))

    def key(item):
        cfg, score = item
        failed = 1 if math.isnan(score) else 0
        return (failed, -score if not failed else 0.0, cfg.dimensions)

    return sorted(scored, key=key)


def write_grid_csv(path, ranked) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dims", "walks", "length", "p", "q", "score", "rank"])
        for rank, (cfg, score) in enumerate(ranked, start=1):
            writer.writerow(
                [
                    cfg.dimensions,
                    cfg.walks_per_node,
                    cfg.walk_length,
                    repr(cfg.return_p),
                    repr(cfg.in_out_q),
                    repr(score),
                    rank,
                ]
            )


def save_embeddings_text(path, tbl: EmbeddingTable) -> None:
    """`node_count dimensions` header then one `node v1 ... vD` line per node."""
    with Path(path).open("w") as fh:
        fh.write(f"{tbl.node_count} {tbl.dims}\n")
        for node in range(tbl.node_count):
            coords = " ".join(repr(float(x)) for x in tbl.vectors[node])
            fh.write(f"{node} {coords}\n")


def load_embeddings_text(path, config: WalkConfig = None, network_id="") -> EmbeddingTable:
    """Read the text format; config metadata is not stored in it, so a
    placeholder config (defaults, seed 0) is synthesized unless one is given."""
    with Path(path).open() as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ParseError(f"{path}: expected 'node_count dimensions' header", 1)
        try:
            n, d = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError(f"{path}: malformed header {header!r}", 1) from None
        vectors = np.full((n, d), np.nan)
        for line_no, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != d + 1:
                raise ParseError(f"{path}: expected {d + 1} fields, got {len(parts)}", line_no)
            node = int(parts[0])
            if not 0 <= node < n:
                raise ParseError(f"{path}: node {node} out of range", line_no)
            if np.isfinite(vectors[node]).any():
                raise ParseError(f"{path}: duplicate vector for node {node}", line_no)
            vectors[node] = [float(x) for x in parts[1:]]
    if np.isnan(vectors).any():
        raise ParseError(f"{path}: missing vectors for some nodes", 1)
    if config is None:
        config = WalkConfig(seed=0, dimensions=d)
    return EmbeddingTable(vectors=vectors, config=config, network_id=network_id)


def save_embeddings_binary(path, tbl: EmbeddingTable) -> None:
    """Lossless binary form: magic, JSON metadata line, raw little-endian f64."""
    header = {
        "network_id": tbl.network_id,
        "shape": [tbl.node_count, tbl.dims],
        "config": asdict(tbl.config),
    }
    with Path(path).open("wb") as fh:
        fh.write(_MAGIC)
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        fh.write(np.ascontiguousarray(tbl.vectors, dtype="<f8").tobytes())


def load_embeddings_binary(path) -> EmbeddingTable:
    with Path(path).open("rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ParseError(f"{path}: not an embedding table file", 1)
        header = json.loads(fh.readline().decode())
        n, d = header["shape"]
        raw = fh.read(n * d * 8)
    if len(raw) != n * d * 8:
        raise ParseError(f"{path}: truncated vector payload", 2)
    vectors = np.frombuffer(raw, dtype="<f8").reshape(n, d).copy()
    return EmbeddingTable(
        vectors=vectors,
        config=WalkConfig(**header["config"]),
        network_id=header["network_id"],
    )

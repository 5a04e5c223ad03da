"""Ranking and threshold metrics plus the Fisher-LDA separability probe."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, NumericError
from .rng import make_rng


@dataclass(frozen=True)
class EvalReport:
    auroc: float
    f1: float
    accuracy: float
    partition: str
    dataset_kind: str
    model_kind: str
    n_pos: int
    n_neg: int


@dataclass(frozen=True)
class LdaProbe:
    direction: np.ndarray
    threshold: float
    train_accuracy: float
    projected: np.ndarray
    labels: np.ndarray


def _checked_scores_labels(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 1 or scores.shape != labels.shape:
        raise DomainError("scores and labels must be 1-D and the same length")
    if not np.isin(labels, (0, 1)).all():
        raise DomainError("labels must be binary 0/1")
    labels = labels.astype(np.int64)
    if labels.sum() == 0 or labels.sum() == labels.size:
        raise DomainError("need at least one positive and one negative label")
    return scores, labels


def auroc(scores, labels) -> float:
    """Probability a positive outranks a negative, ties counted half.

    Computed from average ranks (Mann-Whitney U), O(n log n).
    """
    scores, labels = _checked_scores_labels(scores, labels)
    order = np.argsort(scores, kind="mergesort")
    sorted_scores = scores[order]
    ranks = np.empty(scores.size, dtype=np.float64)
    # average rank within each tie group
    boundaries = np.flatnonzero(np.diff(sorted_scores)) + 1
    starts = np.concatenate(([0], boundaries))
    stops = np.concatenate((boundaries, [scores.size]))
    for a, b in zip(starts, stops):
        ranks[order[a:b]] = 0.5 * (a + b + 1)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    u_stat = ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u_stat / (n_pos * n_neg))


def f1_accuracy(scores, labels, threshold: float):
    """(F1, accuracy) at the given threshold; predict 1 iff score >= threshold."""
    scores, labels = _checked_scores_labels(scores, labels)
    pred = (scores >= threshold).astype(np.int64)
    tp = int(np.sum((pred == 1) & (labels == 1)))
    fp = int(np.sum((pred == 1) & (labels == 0)))
    fn = int(np.sum((pred == 0) & (labels == 1)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = float(np.mean(pred == labels))
    return f1, accuracy


def lda_probe(matrix, sample_size: int, seed: int) -> LdaProbe:
    """Fisher discriminant on a uniform subsample of the matrix's rows.

    Projects the sample onto w ∝ (S_w + εI)^{-1} (μ1 − μ0) with a ridge of
    1e-6 · trace(S_w)/dims, thresholds at the midpoint of the projected
    class means, and reports the accuracy of that 1-D rule on the sample.
    """
    rows = np.asarray(matrix.rows, dtype=np.float64)
    labels = np.asarray(matrix.labels, dtype=np.int64)
    n, dims = rows.shape
    if sample_size > n:
        raise DomainError(f"sample_size {sample_size} exceeds {n} rows")
    idx = make_rng(seed, "lda").choice(n, size=sample_size, replace=False)
    idx.sort()
    x, y = rows[idx], labels[idx]
    if y.sum() == 0 or y.sum() == y.size:
        raise DomainError("both classes must be present in the sample")

    mu0, mu1 = x[y == 0].mean(axis=0), x[y == 1].mean(axis=0)
    c0, c1 = x[y == 0] - mu0, x[y == 1] - mu1
    scatter = c0.T @ c0 + c1.T @ c1
    ridge = 1e-6 * np.trace(scatter) / dims
    try:
        direction = np.linalg.solve(scatter + ridge * np.eye(dims), mu1 - mu0)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"within-class scatter not invertible: {exc}") from None
    norm = np.linalg.norm(direction)
    if not np.isfinite(norm) or norm == 0.0:
        raise NumericError("degenerate LDA direction")
    direction = direction / norm

    projected = x @ direction
    threshold = 0.5 * (projected[y == 1].mean() + projected[y == 0].mean())
    if projected[y == 1].mean() >= projected[y == 0].mean():
        pred = (projected >= threshold).astype(np.int64)
    else:
        pred = (projected < threshold).astype(np.int64)
    return LdaProbe(
        direction=direction,
        threshold=float(threshold),
        train_accuracy=float(np.mean(pred == y)),
        projected=projected,
        labels=y,
    )


def write_lda_csv(path, probe: LdaProbe) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["coord", "label"])
        for coord, label in zip(probe.projected, probe.labels):
            writer.writerow([repr(float(coord)), int(label)])


RESULTS_HEADER = ["dataset", "partition", "model", "auroc", "f1", "accuracy", "n_pos", "n_neg"]


def write_results_csv(path, reports) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        for r in reports:
            writer.writerow(
                [
                    r.dataset_kind,
                    r.partition,
                    r.model_kind,
                    f"{r.auroc:.6f}",
                    f"{r.f1:.6f}",
                    f"{r.accuracy:.6f}",
                    r.n_pos,
                    r.n_neg,
                ]
            )

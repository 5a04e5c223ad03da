"""Feature selection: SVM-driven recursive elimination with cross-validated
subset sizing, random-forest importances, and feature/label correlations."""

import csv
import dataclasses
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import FeatureMatrix
from .errors import DomainError, StratificationError
from .evaluation import auroc
from .models import ModelConfig, primal_weights, score, train_random_forest, train_svm
from .models.base import PRESETS
from .rng import make_rng


@dataclass(frozen=True)
class SelectionReport:
    ranking: tuple  # most important first: survivor, then reverse elimination order
    selected: tuple
    cv_scores: dict  # subset size -> mean AUROC across folds
    folds: int


@dataclass(frozen=True)
class CorrelationMatrix:
    names: tuple
    values: np.ndarray


def stratified_folds(labels, folds: int, seed: int) -> np.ndarray:
    """Fold index per row; each class spread round-robin after a shuffle."""
    labels = np.asarray(labels)
    if folds < 2:
        raise DomainError(f"need at least 2 folds, got {folds}")
    fold_of = np.empty(labels.size, dtype=np.int64)
    rng = make_rng(seed, "folds")
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        if idx.size < folds:
            raise StratificationError(
                f"class {cls} has only {idx.size} samples for {folds} folds"
            )
        idx = idx[rng.permutation(idx.size)]
        fold_of[idx] = np.arange(idx.size) % folds
    return fold_of


def _subset_matrix(matrix, columns):
    keep = [matrix.column_names.index(c) for c in columns]
    return FeatureMatrix(
        tuple(columns),
        matrix.rows[:, keep],
        matrix.labels,
        matrix.dataset_kind,
        matrix.partition,
    )


def rfecv(matrix: FeatureMatrix, folds: int = 5, seed: int = 0, svm_config: ModelConfig = None) -> SelectionReport:
    """Recursive feature elimination with cross-validated subset-size choice.

    Each round scores the current column set by stratified k-fold AUROC of a
    linear SVM, then drops the column with the smallest |primal weight| of a
    full-data fit (ties broken by column name, which makes the outcome
    independent of input column order). The retained set is the size with the
    best mean cv score, preferring fewer features on ties.
    """
    if len(matrix.column_names) < 2:
        raise DomainError("RFECV needs at least two feature columns")
    if svm_config is None:
        svm_config = dataclasses.replace(PRESETS["svm-linear"][1], seed=seed)
    if svm_config.kernel != "linear":
        raise DomainError("RFECV elimination relies on a linear kernel")
    y = matrix.labels
    fold_of = stratified_folds(y, folds, seed)
    active = list(matrix.column_names)
    eliminated = []
    cv_scores = {}
    while active:
        sub = _subset_matrix(matrix, active)
        fold_aucs = []
        for f in range(folds):
            tr = fold_of != f
            model = train_svm(_mask_rows(sub, tr), svm_config)
            fold_aucs.append(auroc(score(model, _mask_rows(sub, ~tr)), y[~tr]))
        cv_scores[len(active)] = float(np.mean(fold_aucs))
        if len(active) == 1:
            break
        full = train_svm(sub, svm_config)
        w = np.abs(primal_weights(full))
        drop = min(range(len(active)), key=lambda i: (w[i], active[i]))
        eliminated.append(active.pop(drop))
    ranking = tuple(active + list(reversed(eliminated)))
    best_size = max(sorted(cv_scores), key=lambda s: (cv_scores[s], -s))
    return SelectionReport(
        ranking=ranking,
        selected=ranking[:best_size],
        cv_scores=cv_scores,
        folds=folds,
    )


def _mask_rows(matrix, mask):
    return FeatureMatrix(
        matrix.column_names,
        matrix.rows[mask],
        matrix.labels[mask],
        matrix.dataset_kind,
        matrix.partition,
    )


def rf_importance(matrix: FeatureMatrix, cfg: ModelConfig):
    """(name, importance) pairs aligned to columns, importances summing to 1."""
    model = train_random_forest(matrix, cfg)
    imp = np.asarray(model.parameters["importance"], dtype=np.float64)
    return list(zip(matrix.column_names, imp.tolist()))


def correlation_matrix(matrix: FeatureMatrix) -> CorrelationMatrix:
    """Pearson correlations over all feature columns plus the label.

    Zero-variance columns correlate 0 with everything by convention (with a
    warning) while keeping 1 on the diagonal.
    """
    if matrix.n_rows < 2:
        raise DomainError("correlation needs at least two rows")
    data = np.column_stack([matrix.rows, matrix.labels.astype(np.float64)])
    names = tuple(matrix.column_names) + ("label",)
    std = data.std(axis=0)
    constant = std == 0.0
    if constant.any():
        flat = [names[i] for i in np.flatnonzero(constant)]
        warnings.warn(f"zero-variance columns treated as uncorrelated: {flat}", stacklevel=2)
    z = (data - data.mean(axis=0)) / np.where(constant, 1.0, std)
    z[:, constant] = 0.0
    corr = z.T @ z / data.shape[0]
    corr = np.clip(0.5 * (corr + corr.T), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix(names=names, values=corr)


def write_selection_csv(path, report: SelectionReport) -> None:
    """rank,feature,selected rows followed by subset_size,mean_auroc rows."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "feature", "selected"])
        chosen = set(report.selected)
        for rank, name in enumerate(report.ranking, start=1):
            writer.writerow([rank, name, int(name in chosen)])
        writer.writerow([])
        writer.writerow(["subset_size", "mean_auroc"])
        for size in sorted(report.cv_scores, reverse=True):
            writer.writerow([size, f"{report.cv_scores[size]:.6f}"])


def write_importance_csv(path, pairs) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["feature", "importance"])
        for name, value in sorted(pairs, key=lambda nv: -nv[1]):
            writer.writerow([name, f"{value:.6f}"])


def write_correlation_csv(path, cm: CorrelationMatrix) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", *cm.names])
        for i, name in enumerate(cm.names):
            writer.writerow([name, *(f"{v:.6f}" for v in cm.values[i])])

"""Random forest of CART trees: Gini splits, bootstrap rows, sqrt(d) candidate
features per split, averaged leaf probabilities, impurity-based importances."""

import math

import numpy as np

from ..errors import DomainError
from ..rng import make_rng
from .base import ModelConfig, TrainedModel, checked_labels


def _best_split(x, y, idx, feats, min_leaf):
    """Highest Gini-decrease split of the rows `idx` over candidate features.

    Returns (feature, threshold, impurity decrease) or None if no feature
    admits a split that leaves min_leaf rows on each side.
    """
    n = idx.size
    pos = y[idx].sum()
    p = pos / n
    parent = 2.0 * p * (1.0 - p)
    best = None
    for f in feats:
        vals = x[idx, f]
        order = np.argsort(vals, kind="mergesort")
        sv = vals[order]
        sy = y[idx[order]]
        cuts = np.flatnonzero(sv[1:] > sv[:-1]) + 1  # candidate left sizes
        cuts = cuts[(cuts >= min_leaf) & (n - cuts >= min_leaf)]
        if cuts.size == 0:
            continue
        cum_pos = np.cumsum(sy)
        left_n = cuts.astype(np.float64)
        left_pos = cum_pos[cuts - 1]
        right_n = n - left_n
        right_pos = pos - left_pos
        pl = left_pos / left_n
        pr = right_pos / right_n
        child = (left_n * 2.0 * pl * (1.0 - pl) + right_n * 2.0 * pr * (1.0 - pr)) / n
        i = int(np.argmin(child))
        decrease = parent - float(child[i])
        if best is None or decrease > best[2]:
            cut = cuts[i]
            best = (int(f), float(0.5 * (sv[cut - 1] + sv[cut])), decrease)
    if best is None or best[2] <= 0.0:
        return None
    return best


def _build_tree(x, y, rng, cfg: ModelConfig):
    """One CART tree as flat arrays plus its weighted impurity decreases."""
    n, d = x.shape
    k = max(1, int(round(math.sqrt(d))))
    feature, threshold, left, right, value = [], [], [], [], []
    importance = np.zeros(d)

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    stack = [(new_node(), np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        pos = y[idx].sum()
        value[node] = pos / idx.size
        if (
            pos == 0
            or pos == idx.size
            or idx.size < 2 * cfg.min_leaf
            or (cfg.max_depth is not None and depth >= cfg.max_depth)
        ):
            continue
        feats = rng.choice(d, size=k, replace=False) if k < d else np.arange(d)
        split = _best_split(x, y, idx, feats, cfg.min_leaf)
        if split is None:
            continue
        f, thr, decrease = split
        importance[f] += (idx.size / n) * decrease
        go_left = x[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        lnode, rnode = new_node(), new_node()
        left[node] = lnode
        right[node] = rnode
        stack.append((rnode, idx[~go_left], depth + 1))
        stack.append((lnode, idx[go_left], depth + 1))
    tree = {
        "feature": np.array(feature, dtype=np.int64),
        "threshold": np.array(threshold, dtype=np.float64),
        "left": np.array(left, dtype=np.int64),
        "right": np.array(right, dtype=np.int64),
        "value": np.array(value, dtype=np.float64),
    }
    return tree, importance


def _tree_scores(tree, x):
    node = np.zeros(x.shape[0], dtype=np.int64)
    active = np.arange(x.shape[0])
    while active.size:
        f = tree["feature"][node[active]]
        at_leaf = f < 0
        inner = active[~at_leaf]
        if inner.size:
            f = f[~at_leaf]
            thr = tree["threshold"][node[inner]]
            go_left = x[inner, f] <= thr
            node[inner] = np.where(go_left, tree["left"][node[inner]], tree["right"][node[inner]])
        active = inner
    return tree["value"][node]


def train_random_forest(matrix, cfg: ModelConfig) -> TrainedModel:
    y = checked_labels(matrix)
    x = np.asarray(matrix.rows, dtype=np.float64)
    n, d = x.shape
    trees = []
    importance = np.zeros(d)
    for i in range(cfg.trees):
        rng = make_rng(cfg.seed, "tree", i)
        boot = rng.integers(n, size=n)
        tree, imp = _build_tree(x[boot], y[boot], rng, cfg)
        trees.append(tree)
        importance += imp
    total = importance.sum()
    if total > 0:
        importance /= total
    return TrainedModel(
        kind="random_forest",
        parameters={"trees": trees, "importance": importance},
        hyperparameters=cfg,
        feature_columns=matrix.column_names,
        threshold=0.5,
    )


def feature_importance(model: TrainedModel) -> np.ndarray:
    if model.kind != "random_forest":
        raise DomainError("feature_importance is defined for random forests only")
    return np.asarray(model.parameters["importance"], dtype=np.float64)


def score_rows(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    trees = model.parameters["trees"]
    total = np.zeros(x.shape[0])
    for tree in trees:
        total += _tree_scores(tree, x)
    return total / len(trees)

"""Logistic regression by full-batch gradient descent.

The objective is mean binary cross-entropy plus penalty_weight times either
the squared L2 norm or the L1 norm of the weights (bias unpenalized). L1 is
handled with proximal soft-threshold steps, so large penalties drive weights
to exactly zero.
"""

import numpy as np

from ..errors import DomainError
from .base import ModelConfig, TrainedModel, checked_labels


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


def logreg_loss_grad(weights, bias, x, y, l2_weight=0.0):
    """Mean BCE (+ optional squared-L2 penalty) with analytic gradients.

    Returns (loss, grad_weights, grad_bias). This is the smooth part of the
    training objective and the surface used by finite-difference checks; the
    L1 penalty is applied separately through the proximal step.
    """
    z = x @ weights + bias
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    p = _sigmoid(z)
    resid = (p - y) / y.size
    grad_w = x.T @ resid
    grad_b = float(resid.sum())
    if l2_weight:
        loss += l2_weight * float(weights @ weights)
        grad_w = grad_w + 2.0 * l2_weight * weights
    return loss, grad_w, grad_b


def logreg_objective(weights, bias, x, y, penalty, penalty_weight):
    """Full training objective including the nonsmooth L1 term."""
    z = x @ weights + bias
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    if penalty == "l2":
        loss += penalty_weight * float(weights @ weights)
    else:
        loss += penalty_weight * float(np.abs(weights).sum())
    return loss


def train_logreg(matrix, cfg: ModelConfig, loss_history=None) -> TrainedModel:
    y = checked_labels(matrix)
    x = np.asarray(matrix.rows, dtype=np.float64)
    n, d = x.shape
    w = np.zeros(d)
    b = 0.0
    lr = cfg.learning_rate
    for _ in range(cfg.epochs):
        if cfg.penalty == "l2":
            _, gw, gb = logreg_loss_grad(w, b, x, y, l2_weight=cfg.penalty_weight)
            w = w - lr * gw
            b = b - lr * gb
        else:
            _, gw, gb = logreg_loss_grad(w, b, x, y)
            w = w - lr * gw
            b = b - lr * gb
            shrink = lr * cfg.penalty_weight
            w = np.sign(w) * np.maximum(np.abs(w) - shrink, 0.0)
        if loss_history is not None:
            loss_history.append(logreg_objective(w, b, x, y, cfg.penalty, cfg.penalty_weight))
    if not (np.isfinite(w).all() and np.isfinite(b)):
        raise DomainError("logistic regression diverged; reduce the learning rate")
    return TrainedModel(
        kind="logreg",
        parameters={"weights": w, "bias": float(b)},
        hyperparameters=cfg,
        feature_columns=matrix.column_names,
        threshold=0.5,
    )


def score_rows(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    return _sigmoid(x @ model.parameters["weights"] + model.parameters["bias"])

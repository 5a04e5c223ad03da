"""Fully connected network: ReLU hidden layers, sigmoid output, binary
cross-entropy on the logits, Adam updates on deterministic mini-batches."""

import numpy as np

from ..errors import DivergenceError
from ..rng import make_rng
from .base import ModelConfig, TrainedModel, checked_labels

_BETA1, _BETA2, _EPS = 0.9, 0.999, 1e-8


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


def init_mlp_params(layer_dims, seed):
    """Glorot-uniform weights (+/- sqrt(6/(fan_in+fan_out))), zero biases.

    layer_dims runs from the input width through the hidden sizes to the
    single output unit. Returns a flat list [W0, b0, W1, b1, ...].
    """
    rng = make_rng(seed, "mlp-init")
    params = []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        params.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def _forward(params, x):
    """Logits plus the per-layer inputs and pre-activations for backprop."""
    acts = [x]
    pre = []
    a = x
    n_layers = len(params) // 2
    for layer in range(n_layers):
        w, b = params[2 * layer], params[2 * layer + 1]
        z = a @ w + b
        pre.append(z)
        if layer < n_layers - 1:
            a = np.maximum(z, 0.0)
            acts.append(a)
    return pre[-1][:, 0], acts, pre


def mlp_loss_grad(params, x, y):
    """Mean BCE on the logits and its gradient for every weight and bias."""
    logits, acts, pre = _forward(params, x)
    n = y.size
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))
    delta = ((_sigmoid(logits) - y) / n)[:, None]
    grads = [None] * len(params)
    n_layers = len(params) // 2
    for layer in range(n_layers - 1, -1, -1):
        grads[2 * layer] = acts[layer].T @ delta
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ params[2 * layer].T) * (pre[layer - 1] > 0.0)
    return loss, grads


def mlp_loss(params, x, y) -> float:
    logits, _, _ = _forward(params, x)
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def train_mlp(matrix, cfg: ModelConfig, loss_history=None) -> TrainedModel:
    y = checked_labels(matrix)
    x = np.asarray(matrix.rows, dtype=np.float64)
    n, d = x.shape
    params = init_mlp_params([d, *cfg.hidden_layers, 1], cfg.seed)
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    step = 0
    for epoch in range(cfg.epochs):
        order = make_rng(cfg.seed, "mlp-epoch", epoch).permutation(n)
        for lo in range(0, n, cfg.batch_size):
            batch = order[lo : lo + cfg.batch_size]
            loss, grads = mlp_loss_grad(params, x[batch], y[batch])
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"training loss became non-finite at epoch {epoch}; "
                    "try a smaller learning_rate"
                )
            step += 1
            c1 = 1.0 - _BETA1**step
            c2 = 1.0 - _BETA2**step
            for i, g in enumerate(grads):
                m[i] = _BETA1 * m[i] + (1.0 - _BETA1) * g
                v[i] = _BETA2 * v[i] + (1.0 - _BETA2) * g * g
                params[i] = params[i] - cfg.learning_rate * (m[i] / c1) / (
                    np.sqrt(v[i] / c2) + _EPS
                )
        if loss_history is not None:
            loss_history.append(mlp_loss(params, x, y))
    return TrainedModel(
        kind="mlp",
        parameters={"layers": params},
        hyperparameters=cfg,
        feature_columns=matrix.column_names,
        threshold=0.5,
    )


def score_rows(model: TrainedModel, x: np.ndarray) -> np.ndarray:
    logits, _, _ = _forward(model.parameters["layers"], x)
    return _sigmoid(logits)

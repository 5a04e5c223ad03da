from .base import (
    MODEL_KINDS,
    PRESETS,
    ModelConfig,
    TrainedModel,
    load_model,
    predict,
    preset_config,
    save_model,
    score,
    train_model,
)
from .forest import feature_importance, train_random_forest
from .logistic import logreg_loss_grad, logreg_objective, train_logreg
from .mlp import init_mlp_params, mlp_loss, mlp_loss_grad, train_mlp
from .svm import dual_objective, duality_gap, kernel_matrix, primal_weights, resolve_gamma, train_svm

__all__ = [
    "MODEL_KINDS",
    "PRESETS",
    "ModelConfig",
    "TrainedModel",
    "dual_objective",
    "duality_gap",
    "feature_importance",
    "init_mlp_params",
    "kernel_matrix",
    "load_model",
    "logreg_loss_grad",
    "logreg_objective",
    "mlp_loss",
    "mlp_loss_grad",
    "predict",
    "preset_config",
    "primal_weights",
    "resolve_gamma",
    "save_model",
    "score",
    "train_logreg",
    "train_mlp",
    "train_model",
    "train_random_forest",
    "train_svm",
]

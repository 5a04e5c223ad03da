"""Shared model plumbing: config, trained-model container, scoring, presets,
and a self-describing binary serialization format."""

import dataclasses
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DomainError, ParseError, SchemaError

MODEL_KINDS = ("logreg", "random_forest", "svm", "mlp")
PENALTIES = ("l1", "l2")
KERNELS = ("linear", "polynomial", "gaussian")

_MAGIC = b"LPMD"
_VERSION = 1


@dataclass(frozen=True)
class ModelConfig:
    seed: int = 0
    penalty: str = "l2"
    penalty_weight: float = 1.0
    kernel: str = "linear"
    kernel_gamma: object = "auto"
    trees: int = 100
    max_depth: object = None
    min_leaf: int = 1
    hidden_layers: tuple = (16, 8)
    learning_rate: float = 0.1
    epochs: int = 500
    batch_size: int = 32
    tol: float = 1e-3
    smo_max_iter: int = 200000

    def __post_init__(self):
        object.__setattr__(self, "penalty", str(self.penalty).lower())
        object.__setattr__(self, "kernel", str(self.kernel).lower())
        object.__setattr__(self, "hidden_layers", tuple(int(h) for h in self.hidden_layers))
        if self.penalty not in PENALTIES:
            raise ConfigError(f"penalty must be one of {PENALTIES}, got {self.penalty!r}")
        if self.penalty_weight < 0:
            raise ConfigError(f"penalty_weight must be nonnegative, got {self.penalty_weight}")
        if self.kernel not in KERNELS:
            raise ConfigError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if self.kernel_gamma != "auto" and not float(self.kernel_gamma) > 0:
            raise ConfigError("kernel_gamma must be positive or 'auto'")
        if self.trees < 1:
            raise ConfigError(f"trees must be >= 1, got {self.trees}")
        if self.max_depth is not None and int(self.max_depth) < 1:
            raise ConfigError(f"max_depth must be >= 1 or None, got {self.max_depth}")
        if self.min_leaf < 1:
            raise ConfigError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if not self.hidden_layers or any(h < 1 for h in self.hidden_layers):
            raise ConfigError("hidden_layers must be a nonempty list of positive sizes")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be >= 1")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.smo_max_iter < 1:
            raise ConfigError(f"smo_max_iter must be >= 1, got {self.smo_max_iter}")


@dataclass
class TrainedModel:
    kind: str
    parameters: dict
    hyperparameters: ModelConfig
    feature_columns: tuple
    threshold: float

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise DomainError(f"unknown model kind {self.kind!r}")
        self.feature_columns = tuple(self.feature_columns)


# preset name -> (model kind, config); pipeline overrides the seed per stage
PRESETS = {
    "logreg-baseline": ("logreg", ModelConfig(penalty="l2", penalty_weight=1.0)),
    "logreg-topological": ("logreg", ModelConfig(penalty="l1", penalty_weight=1000.0)),
    "logreg-embedding": ("logreg", ModelConfig(penalty="l1", penalty_weight=150.0)),
    "svm-linear": ("svm", ModelConfig(kernel="linear", penalty_weight=1e-3)),
    "svm-gaussian": ("svm", ModelConfig(kernel="gaussian", penalty_weight=1e-3)),
    "rf-default": ("random_forest", ModelConfig(trees=100)),
    "mlp-default": ("mlp", ModelConfig(hidden_layers=(16, 8), learning_rate=1e-3, epochs=200)),
}


def preset_config(name: str, seed: int):
    """Look up a preset and bind the given seed into its config."""
    if name not in PRESETS:
        raise ConfigError(f"unknown model preset {name!r}; choose from {sorted(PRESETS)}")
    kind, cfg = PRESETS[name]
    return kind, dataclasses.replace(cfg, seed=seed)


def checked_labels(matrix) -> np.ndarray:
    y = np.asarray(matrix.labels)
    if y.size == 0:
        raise DomainError("cannot train on an empty matrix")
    if not np.isin(y, (0, 1)).all():
        raise DomainError("labels must be binary 0/1")
    return y.astype(np.float64)


def check_columns(model: TrainedModel, matrix) -> None:
    got = tuple(matrix.column_names)
    if got != model.feature_columns:
        missing = [c for c in model.feature_columns if c not in got]
        extra = [c for c in got if c not in model.feature_columns]
        if missing or extra:
            raise SchemaError(
                f"feature columns do not match the model: missing {missing}, unexpected {extra}"
            )
        raise SchemaError(
            f"feature columns are ordered differently than the model expects: "
            f"got {list(got)}, want {list(model.feature_columns)}"
        )


def score(model: TrainedModel, matrix) -> np.ndarray:
    """One finite score per row; probability for logreg/rf/mlp, margin for svm."""
    check_columns(model, matrix)
    x = np.asarray(matrix.rows, dtype=np.float64)
    if x.shape[0] == 0:
        return np.empty(0)
    from . import forest, logistic, mlp, svm

    scorer = {
        "logreg": logistic.score_rows,
        "random_forest": forest.score_rows,
        "svm": svm.score_rows,
        "mlp": mlp.score_rows,
    }[model.kind]
    out = scorer(model, x)
    if not np.isfinite(out).all():
        raise DomainError("model produced non-finite scores")
    return out


def predict(model: TrainedModel, matrix) -> np.ndarray:
    return (score(model, matrix) >= model.threshold).astype(np.int64)


def train_model(kind: str, matrix, cfg: ModelConfig) -> TrainedModel:
    from . import forest, logistic, mlp, svm

    trainer = {
        "logreg": logistic.train_logreg,
        "random_forest": forest.train_random_forest,
        "svm": svm.train_svm,
        "mlp": mlp.train_mlp,
    }.get(kind)
    if trainer is None:
        raise ConfigError(f"unknown model kind {kind!r}")
    return trainer(matrix, cfg)


def _encode_params(value, arrays):
    if isinstance(value, np.ndarray):
        arrays.append(value)
        return {"__array__": len(arrays) - 1}
    if isinstance(value, (np.floating, np.integer)):
        return float(value) if isinstance(value, np.floating) else int(value)
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_encode_params(v, arrays) for v in value]
    if isinstance(value, dict):
        return {k: _encode_params(v, arrays) for k, v in value.items()}
    raise DomainError(f"cannot serialize parameter of type {type(value).__name__}")


def _decode_params(value, arrays):
    if isinstance(value, dict):
        if set(value) == {"__array__"}:
            return arrays[value["__array__"]]
        return {k: _decode_params(v, arrays) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode_params(v, arrays) for v in value]
    return value


def save_model(path, model: TrainedModel) -> None:
    """Binary layout: magic, u32 version, JSON header line, npy-encoded arrays."""
    arrays = []
    params = _encode_params(model.parameters, arrays)
    header = {
        "kind": model.kind,
        "threshold": model.threshold,
        "feature_columns": list(model.feature_columns),
        "hyperparameters": dataclasses.asdict(model.hyperparameters),
        "parameters": params,
        "array_count": len(arrays),
    }
    with Path(path).open("wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        for arr in arrays:
            np.lib.format.write_array(fh, np.ascontiguousarray(arr), allow_pickle=False)


def load_model(path) -> TrainedModel:
    with Path(path).open("rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise ParseError(f"{path}: not a model file", 1)
        (version,) = struct.unpack("<I", fh.read(4))
        if version != _VERSION:
            raise ParseError(f"{path}: unsupported model file version {version}", 1)
        header = json.loads(fh.readline().decode())
        arrays = [
            np.lib.format.read_array(fh, allow_pickle=False)
            for _ in range(header["array_count"])
        ]
    hyper = dict(header["hyperparameters"])
    hyper["hidden_layers"] = tuple(hyper.get("hidden_layers", ()))
    return TrainedModel(
        kind=header["kind"],
        parameters=_decode_params(header["parameters"], arrays),
        hyperparameters=ModelConfig(**hyper),
        feature_columns=tuple(header["feature_columns"]),
        threshold=float(header["threshold"]),
    )

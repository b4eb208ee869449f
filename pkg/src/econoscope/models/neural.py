"""Two-layer feedforward network trained with Adam.

dense(h1) + ReLU + dropout -> dense(h2) + ReLU + dropout -> dense(3)
+ softmax, cross-entropy loss, inputs standardized by train-set moments
stored on the model. Dropout is inverted and active only during training;
inference is deterministic. Early stopping keeps the best-epoch weights,
with the untrained initialization counting as epoch zero.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .base import (
    Dataset,
    ModelError,
    N_CLASSES,
    Standardizer,
    WinProbModel,
    model_id_from_params,
    multiclass_log_loss,
    one_hot,
    softmax,
)
from ..features import SCHEMA_PER_MAP

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
BATCH_SIZE = 512
MAX_EPOCHS = 500
PATIENCE = 10

_PARAM_NAMES = ("W1", "b1", "W2", "b2", "W3", "b3")


@dataclass(frozen=True)
class NeuralHyperparams:
    hidden1: int = 96
    hidden2: int = 32
    dropout: float = 0.1
    learning_rate: float = 1e-4


def init_weights(n_features: int, hp: NeuralHyperparams,
                 rng: np.random.Generator) -> dict[str, np.ndarray]:
    """He-normal initialization."""
    def he(fan_in: int, shape: tuple[int, ...]) -> np.ndarray:
        return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=shape)

    return {
        "W1": he(n_features, (n_features, hp.hidden1)),
        "b1": np.zeros(hp.hidden1),
        "W2": he(hp.hidden1, (hp.hidden1, hp.hidden2)),
        "b2": np.zeros(hp.hidden2),
        "W3": he(hp.hidden2, (hp.hidden2, N_CLASSES)),
        "b3": np.zeros(N_CLASSES),
    }


def forward_backward(
    weights: dict[str, np.ndarray],
    X: np.ndarray,
    Y: np.ndarray,
    masks: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[float, dict[str, np.ndarray]]:
    """Cross-entropy loss and exact gradients for one batch.

    ``masks`` are inverted-dropout multipliers for the two hidden
    activations; None disables dropout (inference behaviour).
    """
    n = X.shape[0]
    a1 = X @ weights["W1"] + weights["b1"]
    r1 = np.maximum(a1, 0.0)
    d1 = r1 * masks[0] if masks is not None else r1
    a2 = d1 @ weights["W2"] + weights["b2"]
    r2 = np.maximum(a2, 0.0)
    d2 = r2 * masks[1] if masks is not None else r2
    logits = d2 @ weights["W3"] + weights["b3"]
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = float(-np.sum(Y * log_probs) / n)

    dz = (np.exp(log_probs) - Y) / n
    grads = {
        "W3": d2.T @ dz,
        "b3": dz.sum(axis=0),
    }
    dd2 = dz @ weights["W3"].T
    if masks is not None:
        dd2 = dd2 * masks[1]
    da2 = dd2 * (a2 > 0.0)
    grads["W2"] = d1.T @ da2
    grads["b2"] = da2.sum(axis=0)
    dd1 = da2 @ weights["W2"].T
    if masks is not None:
        dd1 = dd1 * masks[0]
    da1 = dd1 * (a1 > 0.0)
    grads["W1"] = X.T @ da1
    grads["b1"] = da1.sum(axis=0)
    return loss, grads


class NeuralModel(WinProbModel):
    family = "neural"

    def __init__(self, weights: dict[str, np.ndarray], standardizer: Standardizer,
                 hp: NeuralHyperparams, mode: str, metadata: dict):
        self.weights = weights
        self.standardizer = standardizer
        self.hp = hp
        self.mode = mode
        self.metadata = metadata

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        Z = self.standardizer.transform(X)
        h1 = np.maximum(Z @ self.weights["W1"] + self.weights["b1"], 0.0)
        h2 = np.maximum(h1 @ self.weights["W2"] + self.weights["b2"], 0.0)
        return softmax(h2 @ self.weights["W3"] + self.weights["b3"])

    def copy_weights(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.weights.items()}


def _fit(
    weights: dict[str, np.ndarray],
    standardizer: Standardizer,
    train: Dataset,
    val: Dataset,
    hp: NeuralHyperparams,
    learning_rate: float,
    rng: np.random.Generator,
    batch_size: int,
    max_epochs: int,
    patience: int,
    mode: str,
) -> NeuralModel:
    X = standardizer.transform(train.X)
    Y = one_hot(train.y)
    X_val = val.X
    y_val = val.y
    n = X.shape[0]
    adam_m = {k: np.zeros_like(v) for k, v in weights.items()}
    adam_v = {k: np.zeros_like(v) for k, v in weights.items()}
    t = 0

    def val_loss_of(w: dict[str, np.ndarray]) -> float:
        probe = NeuralModel(w, standardizer, hp, mode, {})
        return multiclass_log_loss(probe.predict_matrix(X_val), y_val)

    best_loss = val_loss_of(weights)
    best_weights = {k: v.copy() for k, v in weights.items()}
    best_epoch = 0
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            Xb, Yb = X[batch], Y[batch]
            masks = None
            if hp.dropout > 0.0:
                keep = 1.0 - hp.dropout
                masks = (
                    (rng.random((Xb.shape[0], hp.hidden1)) < keep) / keep,
                    (rng.random((Xb.shape[0], hp.hidden2)) < keep) / keep,
                )
            loss, grads = forward_backward(weights, Xb, Yb, masks)
            if not np.isfinite(loss):
                raise ModelError(
                    f"non-finite loss at epoch {epoch}, batch {start // batch_size}")
            t += 1
            corr1 = 1.0 - ADAM_BETA1 ** t
            corr2 = 1.0 - ADAM_BETA2 ** t
            for k in _PARAM_NAMES:
                adam_m[k] = ADAM_BETA1 * adam_m[k] + (1 - ADAM_BETA1) * grads[k]
                adam_v[k] = ADAM_BETA2 * adam_v[k] + (1 - ADAM_BETA2) * grads[k] ** 2
                weights[k] = weights[k] - learning_rate * (
                    (adam_m[k] / corr1) / (np.sqrt(adam_v[k] / corr2) + ADAM_EPS))

        loss_now = val_loss_of(weights)
        if loss_now < best_loss:
            best_loss = loss_now
            best_weights = {k: v.copy() for k, v in weights.items()}
            best_epoch = epoch
        elif epoch - best_epoch >= patience:
            break

    metadata = {
        "hyperparams": asdict(hp),
        "learning_rate_used": learning_rate,
        "best_epoch": best_epoch,
        "stopped_epoch": epoch,
        "best_val_loss": best_loss,
        "data_hash": train.data_hash(),
    }
    metadata["model_id"] = model_id_from_params(
        "neural", mode, b"".join(best_weights[k].tobytes() for k in _PARAM_NAMES))
    return NeuralModel(best_weights, standardizer, hp, mode, metadata)


def train_neural(
    train: Dataset,
    val: Dataset,
    hp: NeuralHyperparams,
    mode: str = "no_map",
    seed: int = 0,
    batch_size: int = BATCH_SIZE,
    max_epochs: int = MAX_EPOCHS,
    patience: int = PATIENCE,
) -> NeuralModel:
    if len(train) == 0 or len(val) == 0:
        raise ModelError("train and validation sets must be non-empty")
    rng = np.random.default_rng(seed)
    standardizer = Standardizer.fit(train.X)
    weights = init_weights(train.X.shape[1], hp, rng)
    return _fit(weights, standardizer, train, val, hp, hp.learning_rate, rng,
                batch_size, max_epochs, patience, mode)


def fine_tune_neural(
    model: NeuralModel,
    new_train: Dataset,
    learning_rate: float,
    new_val: Dataset | None = None,
    seed: int = 0,
    batch_size: int = BATCH_SIZE,
    max_epochs: int = MAX_EPOCHS,
    patience: int = PATIENCE,
) -> NeuralModel:
    """Continue training from a no-map-feature model's weights.

    The source model is left untouched; its input standardization is kept
    (the new data passes through the original moments). Early stopping
    monitors ``new_val``, defaulting to the fine-tuning data itself, and
    the initial weights count as a candidate epoch, so a zero or harmful
    learning rate can never make the returned model worse on the monitor.
    """
    if not isinstance(model, NeuralModel):
        raise ModelError(f"fine-tuning needs a neural model, got {model.family}")
    if model.feature_schema != SCHEMA_PER_MAP:
        raise ModelError(
            "fine-tuning is defined for models without map one-hot features; "
            f"this model uses schema {model.feature_schema!r}")
    if new_train.schema != model.feature_schema:
        raise ModelError(
            f"data schema {new_train.schema!r} does not match model "
            f"schema {model.feature_schema!r}")
    if len(new_train) == 0:
        raise ModelError("fine-tuning data must be non-empty")
    if learning_rate < 0:
        raise ModelError("learning_rate must be >= 0")
    val = new_val if new_val is not None else new_train
    rng = np.random.default_rng(seed)
    tuned = _fit(model.copy_weights(), model.standardizer, new_train, val,
                 model.hp, learning_rate, rng, batch_size, max_epochs,
                 patience, model.mode)
    tuned.metadata["fine_tuned_from"] = model.model_id
    return tuned

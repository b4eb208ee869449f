"""Multinomial logistic regression fit by full-batch gradient descent.

The baseline configuration restricts features to the two team scores and
their difference; the full feature set stays available behind a flag for
ablations. Cross-entropy plus an L2 penalty on the weights (never the
intercept), trained until the gradient max-norm drops below tolerance.
"""

from __future__ import annotations

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

SCORES_ONLY = "scores_only"
FULL_FEATURES = "full"

_SCORE_COLUMNS = (0, 1, 2)  # ct_score, t_score, score_diff in both schemas

L2_PENALTY = 1e-4
GRAD_TOL = 1e-6
MAX_ITERATIONS = 10_000


def objective_and_grads(
    W: np.ndarray, b: np.ndarray, X: np.ndarray, Y: np.ndarray,
    l2: float = L2_PENALTY,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Penalized mean cross-entropy and its exact gradients."""
    n = X.shape[0]
    logits = X @ W + b
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = float(-np.sum(Y * log_probs) / n + 0.5 * l2 * np.sum(W * W))
    P = np.exp(log_probs)
    grad_W = X.T @ (P - Y) / n + l2 * W
    grad_b = (P - Y).mean(axis=0)
    return loss, grad_W, grad_b


class LogisticModel(WinProbModel):
    family = "logistic"

    def __init__(self, W: np.ndarray, b: np.ndarray, feature_indices: tuple[int, ...],
                 standardizer: Standardizer, mode: str, metadata: dict):
        self.W = W
        self.b = b
        self.feature_indices = tuple(feature_indices)
        self.standardizer = standardizer
        self.mode = mode
        self.metadata = metadata

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        Z = self.standardizer.transform(X[:, self.feature_indices])
        return softmax(Z @ self.W + self.b)


def train_logistic(
    train: Dataset,
    feature_subset: str = SCORES_ONLY,
    mode: str = "no_map",
    l2: float = L2_PENALTY,
    learning_rate: float = 1.0,
    max_iterations: int = MAX_ITERATIONS,
    grad_tol: float = GRAD_TOL,
) -> LogisticModel:
    """Gradient descent with halving backtracking on the step size."""
    if feature_subset == SCORES_ONLY:
        indices = _SCORE_COLUMNS
    elif feature_subset == FULL_FEATURES:
        indices = tuple(range(train.X.shape[1]))
    else:
        raise ModelError(f"unknown feature_subset {feature_subset!r}")
    classes = np.unique(train.y)
    if classes.size < 2:
        raise ModelError("training data contains a single outcome class")

    X_raw = train.X[:, indices]
    standardizer = Standardizer.fit(X_raw)
    X = standardizer.transform(X_raw)
    Y = one_hot(train.y)
    W = np.zeros((X.shape[1], N_CLASSES))
    b = np.zeros(N_CLASSES)

    loss, grad_W, grad_b = objective_and_grads(W, b, X, Y, l2)
    step = learning_rate
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        grad_norm = max(np.abs(grad_W).max(), np.abs(grad_b).max())
        if grad_norm < grad_tol:
            break
        while True:
            W_new = W - step * grad_W
            b_new = b - step * grad_b
            new_loss, new_grad_W, new_grad_b = objective_and_grads(W_new, b_new, X, Y, l2)
            if new_loss <= loss or step < 1e-12:
                break
            step *= 0.5
        W, b, loss, grad_W, grad_b = W_new, b_new, new_loss, new_grad_W, new_grad_b

    metadata = {
        "feature_subset": feature_subset,
        "l2": l2,
        "iterations": iterations,
        "train_loss": loss,
        "train_accuracy": float(
            np.mean(np.argmax(X @ W + b, axis=1) == train.y)),
        "data_hash": train.data_hash(),
    }
    metadata["model_id"] = model_id_from_params(
        "logistic", mode, W.tobytes() + b.tobytes())
    model = LogisticModel(W, b, indices, standardizer, mode, metadata)
    metadata["final_train_log_loss"] = multiclass_log_loss(
        model.predict_matrix(train.X), train.y)
    return model

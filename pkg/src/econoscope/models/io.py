"""Model persistence: a self-describing, versioned JSON container.

Header carries {format_version, family, mode, metadata}; the payload holds
every learned parameter. Floats are serialized with Python's shortest
round-trip repr, so a loaded model predicts bit-identically.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .base import ModelError, PerMapModel, Standardizer, WinProbModel
from .gbtree import GbtreeHyperparams, GbtreeModel, Tree
from .logistic import LogisticModel
from .neural import NeuralHyperparams, NeuralModel

FORMAT_VERSION = 1


class ModelPersistenceError(ModelError):
    """Corrupt, truncated or incompatible model file."""


def _arr(values, dtype=np.float64) -> np.ndarray:
    return np.asarray(values, dtype=dtype)


def _model_doc(model: WinProbModel) -> dict:
    if isinstance(model, PerMapModel):
        return {
            "kind": "per_map",
            "submodels": {m: _model_doc(sub) for m, sub in sorted(model.submodels.items())},
        }
    if isinstance(model, LogisticModel):
        params = {
            "weights": model.W.tolist(),
            "bias": model.b.tolist(),
            "feature_indices": list(model.feature_indices),
            "mean": model.standardizer.mean.tolist(),
            "std": model.standardizer.std.tolist(),
        }
    elif isinstance(model, NeuralModel):
        params = {
            "hyperparams": asdict(model.hp),
            "weights": {k: v.tolist() for k, v in model.weights.items()},
            "mean": model.standardizer.mean.tolist(),
            "std": model.standardizer.std.tolist(),
        }
    elif isinstance(model, GbtreeModel):
        params = {
            "hyperparams": asdict(model.hp),
            "rounds": [
                [
                    {
                        "feature": tree.feature.tolist(),
                        "threshold": tree.threshold.tolist(),
                        "left": tree.left.tolist(),
                        "right": tree.right.tolist(),
                        "value": tree.value.tolist(),
                    }
                    for tree in round_trees
                ]
                for round_trees in model.rounds
            ],
        }
    else:
        raise ModelPersistenceError(f"cannot serialize model type {type(model).__name__}")
    return {
        "kind": "single",
        "family": model.family,
        "mode": model.mode,
        "metadata": _jsonable(model.metadata),
        "params": params,
    }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def save_model(model: WinProbModel, path: str | Path) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "family": model.family,
        "mode": model.mode,
        "feature_schema": model.feature_schema,
        "metadata": _jsonable(model.metadata),
        "model": _model_doc(model),
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True))


def _single_from_doc(doc: dict) -> WinProbModel:
    family = doc["family"]
    mode = doc["mode"]
    metadata = doc["metadata"]
    params = doc["params"]
    if family == "logistic":
        return LogisticModel(
            W=_arr(params["weights"]),
            b=_arr(params["bias"]),
            feature_indices=tuple(params["feature_indices"]),
            standardizer=Standardizer(_arr(params["mean"]), _arr(params["std"])),
            mode=mode,
            metadata=metadata,
        )
    if family == "neural":
        return NeuralModel(
            weights={k: _arr(v) for k, v in params["weights"].items()},
            standardizer=Standardizer(_arr(params["mean"]), _arr(params["std"])),
            hp=NeuralHyperparams(**params["hyperparams"]),
            mode=mode,
            metadata=metadata,
        )
    if family == "gbtree":
        rounds = [
            tuple(
                Tree(
                    feature=_arr(t["feature"], np.int32),
                    threshold=_arr(t["threshold"]),
                    left=_arr(t["left"], np.int32),
                    right=_arr(t["right"], np.int32),
                    value=_arr(t["value"]),
                )
                for t in round_trees
            )
            for round_trees in params["rounds"]
        ]
        return GbtreeModel(rounds, GbtreeHyperparams(**params["hyperparams"]),
                           mode, metadata)
    raise ModelPersistenceError(f"unknown model family {family!r}")


def load_model(path: str | Path) -> WinProbModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelPersistenceError(f"corrupt model file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise ModelPersistenceError(f"corrupt model file {path}: missing header")
    version = doc["format_version"]
    if version != FORMAT_VERSION:
        raise ModelPersistenceError(
            f"model file {path} has format version {version}; "
            f"this build reads version {FORMAT_VERSION}")
    try:
        inner = doc["model"]
        if inner["kind"] == "per_map":
            subs = {m: _single_from_doc(d) for m, d in inner["submodels"].items()}
            return PerMapModel(subs, metadata=doc["metadata"])
        return _single_from_doc(inner)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelPersistenceError(f"corrupt model file {path}: {exc}") from exc

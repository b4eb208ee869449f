"""Win-probability model families behind one prediction interface."""

from __future__ import annotations

from .base import (
    MODE_NO_MAP,
    MODE_OHE_MAP,
    MODE_PER_MAP,
    MODEL_MODES,
    Dataset,
    ModelError,
    PerMapModel,
    Standardizer,
    WinProbModel,
    multiclass_log_loss,
    schema_for_mode,
)
from .gbtree import GbtreeHyperparams, GbtreeModel, train_gbtree
from .io import ModelPersistenceError, load_model, save_model
from .logistic import FULL_FEATURES, SCORES_ONLY, LogisticModel, train_logistic
from .neural import NeuralHyperparams, NeuralModel, fine_tune_neural, train_neural
from .search import HyperparamSpace, SearchResult, random_search

from ..domain import LabeledRound

FAMILIES = ("logistic", "gbtree", "neural")


def train_model(
    family: str,
    mode: str,
    train_rounds: list[LabeledRound],
    val_rounds: list[LabeledRound],
    hp=None,
    seed: int = 0,
    **kwargs,
) -> WinProbModel:
    """Family/mode dispatch; per-map mode trains one sub-model per map."""
    schema = schema_for_mode(mode)
    if mode == MODE_PER_MAP:
        maps = sorted({lr.state.map_name for lr in train_rounds})
        subs = {}
        for map_name in maps:
            sub_train = [lr for lr in train_rounds if lr.state.map_name == map_name]
            sub_val = [lr for lr in val_rounds if lr.state.map_name == map_name]
            subs[map_name] = train_model(family, MODE_NO_MAP, sub_train,
                                         sub_val or sub_train, hp, seed, **kwargs)
        return PerMapModel(subs)

    train_ds = Dataset.from_rounds(train_rounds, schema)
    val_ds = Dataset.from_rounds(val_rounds, schema)
    if family == "logistic":
        subset = kwargs.pop("feature_subset", SCORES_ONLY)
        return train_logistic(train_ds, feature_subset=subset, mode=mode, **kwargs)
    if family == "gbtree":
        return train_gbtree(train_ds, val_ds, hp or GbtreeHyperparams(),
                            mode=mode, seed=seed, **kwargs)
    if family == "neural":
        return train_neural(train_ds, val_ds, hp or NeuralHyperparams(),
                            mode=mode, seed=seed, **kwargs)
    raise ModelError(f"unknown family {family!r}; expected one of {FAMILIES}")


__all__ = [
    "Dataset", "FAMILIES", "FULL_FEATURES", "GbtreeHyperparams", "GbtreeModel",
    "HyperparamSpace", "LogisticModel", "MODE_NO_MAP", "MODE_OHE_MAP",
    "MODE_PER_MAP", "MODEL_MODES", "ModelError", "ModelPersistenceError",
    "NeuralHyperparams", "NeuralModel", "PerMapModel", "SCORES_ONLY",
    "SearchResult", "Standardizer", "WinProbModel", "fine_tune_neural",
    "load_model", "multiclass_log_loss", "random_search", "save_model",
    "schema_for_mode", "train_gbtree", "train_logistic", "train_model",
    "train_neural",
]

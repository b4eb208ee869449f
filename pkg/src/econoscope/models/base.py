"""Shared model-side infrastructure: datasets, standardization, the
prediction interface all three families implement, and per-map routing."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..domain import (
    OUTCOME_ORDER,
    DomainError,
    LabeledRound,
    OutcomeDistribution,
    RoundState,
)
from ..features import (
    SCHEMA_OHE_MAP,
    SCHEMA_PER_MAP,
    featurize_batch,
    states_matrix,
)

N_CLASSES = len(OUTCOME_ORDER)

MODE_PER_MAP = "per_map"    # routing table of per-map sub-models
MODE_OHE_MAP = "ohe_map"    # single model, map one-hot encoded
MODE_NO_MAP = "no_map"      # single model, no map information at all

MODEL_MODES = (MODE_PER_MAP, MODE_OHE_MAP, MODE_NO_MAP)


class ModelError(ValueError):
    """Bad model input, schema mismatch, or training failure."""


def schema_for_mode(mode: str) -> str:
    if mode in (MODE_PER_MAP, MODE_NO_MAP):
        return SCHEMA_PER_MAP
    if mode == MODE_OHE_MAP:
        return SCHEMA_OHE_MAP
    raise ModelError(f"unknown model mode {mode!r}; expected one of {MODEL_MODES}")


@dataclass(frozen=True)
class Dataset:
    """Feature matrix + class labels + per-row map names."""

    X: np.ndarray
    y: np.ndarray
    maps: tuple[str, ...]
    schema: str

    def __post_init__(self) -> None:
        if self.X.shape[0] != self.y.shape[0] or self.X.shape[0] != len(self.maps):
            raise ModelError("X, y and maps must have equal length")

    @classmethod
    def from_rounds(cls, rounds: list[LabeledRound], schema: str) -> "Dataset":
        X, y, maps = featurize_batch(rounds, schema)
        return cls(X, y, tuple(maps), schema)

    def __len__(self) -> int:
        return int(self.X.shape[0])

    def restrict_to_map(self, map_name: str) -> "Dataset":
        mask = np.asarray([m == map_name for m in self.maps])
        return Dataset(self.X[mask], self.y[mask],
                       tuple(m for m in self.maps if m == map_name), self.schema)

    def subsample(self, n: int, seed: int = 0) -> "Dataset":
        if n >= len(self):
            return self
        idx = np.sort(np.random.default_rng(seed).choice(len(self), n, replace=False))
        return Dataset(self.X[idx], self.y[idx],
                       tuple(self.maps[i] for i in idx), self.schema)

    def data_hash(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.ascontiguousarray(self.X).tobytes())
        digest.update(np.ascontiguousarray(self.y).tobytes())
        return digest.hexdigest()[:12]


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def log_softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def one_hot(y: np.ndarray, k: int = N_CLASSES) -> np.ndarray:
    out = np.zeros((y.shape[0], k), dtype=np.float64)
    out[np.arange(y.shape[0]), y] = 1.0
    return out


def multiclass_log_loss(proba: np.ndarray, y: np.ndarray,
                        clip: float = 1e-15) -> float:
    """Mean cross-entropy of predicted probabilities against class indices."""
    p = np.clip(proba[np.arange(y.shape[0]), y], clip, 1.0 - clip)
    return float(-np.mean(np.log(p)))


@dataclass(frozen=True)
class Standardizer:
    """Per-column affine normalization frozen at training time."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
        return cls(mean, std)

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std


class WinProbModel:
    """Uniform prediction interface over the three model families.

    Subclasses set ``family`` and implement ``predict_matrix``; everything
    downstream (evaluation, counterfactuals, the service) only consumes
    ``predict_matrix`` / ``predict_state`` / ``predict_rounds``.
    """

    family: str = "abstract"
    mode: str = MODE_NO_MAP
    metadata: dict

    @property
    def feature_schema(self) -> str:
        return schema_for_mode(self.mode)

    @property
    def model_id(self) -> str:
        return self.metadata.get("model_id", f"{self.family}-{self.mode}")

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict_dataset(self, ds: Dataset) -> np.ndarray:
        if ds.schema != self.feature_schema:
            raise ModelError(
                f"dataset schema {ds.schema!r} does not match model "
                f"schema {self.feature_schema!r}")
        return self.predict_matrix(ds.X)

    def predict_state(self, state: RoundState) -> OutcomeDistribution:
        X = states_matrix([state], self.feature_schema)
        row = self.predict_matrix(X)[0]
        return distribution_from_row(row)

    def predict_rounds(self, rounds: list[LabeledRound]) -> np.ndarray:
        return self.predict_dataset(Dataset.from_rounds(rounds, self.feature_schema))


def distribution_from_row(row: np.ndarray) -> OutcomeDistribution:
    # exact renormalization guards accumulated float error at the boundary
    p = np.clip(np.asarray(row, dtype=np.float64), 0.0, 1.0)
    p = p / p.sum()
    return OutcomeDistribution(float(p[0]), float(p[1]), float(p[2]))


class PerMapModel(WinProbModel):
    """Routing table of independently trained per-map sub-models."""

    mode = MODE_PER_MAP

    def __init__(self, submodels: dict[str, WinProbModel], metadata: dict | None = None):
        if not submodels:
            raise ModelError("per-map model needs at least one sub-model")
        families = {m.family for m in submodels.values()}
        if len(families) != 1:
            raise ModelError(f"sub-models must share a family, got {families}")
        self.submodels = dict(submodels)
        self.family = families.pop()
        self.metadata = metadata or {}
        self.metadata.setdefault(
            "model_id", f"{self.family}-per_map-{len(submodels)}maps")

    def sub_for(self, map_name: str) -> WinProbModel:
        try:
            return self.submodels[map_name]
        except KeyError:
            raise ModelError(
                f"no sub-model for map {map_name!r}; "
                f"have {sorted(self.submodels)}") from None

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        raise ModelError("per-map models route by map; use predict_dataset")

    def predict_dataset(self, ds: Dataset) -> np.ndarray:
        if ds.schema != self.feature_schema:
            raise ModelError(
                f"dataset schema {ds.schema!r} does not match model "
                f"schema {self.feature_schema!r}")
        out = np.empty((len(ds), N_CLASSES), dtype=np.float64)
        maps = np.asarray(ds.maps)
        for map_name in dict.fromkeys(ds.maps):
            mask = maps == map_name
            out[mask] = self.sub_for(map_name).predict_matrix(ds.X[mask])
        return out

    def predict_state(self, state: RoundState) -> OutcomeDistribution:
        return self.sub_for(state.map_name).predict_state(state)


def model_id_from_params(family: str, mode: str, payload: bytes) -> str:
    return f"{family}-{mode}-{hashlib.sha256(payload).hexdigest()[:8]}"

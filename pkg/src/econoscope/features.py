"""Feature-vector encoding of round states.

Layout (in order): ct_score, t_score, score_diff, ct_equip_start,
t_equip_start, ct_money, t_money, one-hot ct_buy x6, one-hot t_buy x6,
and in OHE-map mode a trailing one-hot map block x7. Raw spend dollars are
deliberately not encoded; the buy decision enters only as its categorical
type so counterfactual states stay well-defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import (
    BUY_INDEX,
    BUY_ORDER,
    DEFAULT_MAP_POOL,
    OUTCOME_INDEX,
    DomainError,
    LabeledRound,
    RoundState,
)

SCHEMA_PER_MAP = "per_map"
SCHEMA_OHE_MAP = "ohe_map"

N_BASE_FEATURES = 7 + 2 * len(BUY_ORDER)  # 19
N_OHE_FEATURES = N_BASE_FEATURES + len(DEFAULT_MAP_POOL)  # 26

_MAP_INDEX = {m: i for i, m in enumerate(DEFAULT_MAP_POOL)}

_BASE_NAMES = (
    "ct_score",
    "t_score",
    "score_diff",
    "ct_equip_start",
    "t_equip_start",
    "ct_money",
    "t_money",
    *(f"ct_buy_{b.value}" for b in BUY_ORDER),
    *(f"t_buy_{b.value}" for b in BUY_ORDER),
)


def feature_names(schema: str) -> tuple[str, ...]:
    if schema == SCHEMA_PER_MAP:
        return _BASE_NAMES
    if schema == SCHEMA_OHE_MAP:
        return _BASE_NAMES + tuple(f"map_{m}" for m in DEFAULT_MAP_POOL)
    raise DomainError(f"unknown feature schema {schema!r}")


@dataclass(frozen=True)
class FeatureVector:
    """Encoded round with its schema tag and routing metadata.

    In per-map mode the map never enters the values; it rides along as
    metadata so per-map models can route on it.
    """

    values: tuple[float, ...]
    schema: str
    map_name: str

    def __post_init__(self) -> None:
        expected = N_PER_SCHEMA[self.schema]
        if len(self.values) != expected:
            raise DomainError(
                f"schema {self.schema} expects {expected} values, got {len(self.values)}")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


N_PER_SCHEMA = {SCHEMA_PER_MAP: N_BASE_FEATURES, SCHEMA_OHE_MAP: N_OHE_FEATURES}


def _encode_state(state: RoundState, schema: str) -> tuple[float, ...]:
    values = [
        float(state.ct_score),
        float(state.t_score),
        float(state.ct_score - state.t_score),
        float(state.ct_equip_start),
        float(state.t_equip_start),
        float(state.ct_money),
        float(state.t_money),
    ]
    for buy in (state.ct_buy, state.t_buy):
        block = [0.0] * len(BUY_ORDER)
        block[BUY_INDEX[buy]] = 1.0
        values.extend(block)
    if schema == SCHEMA_OHE_MAP:
        if state.map_name not in _MAP_INDEX:
            raise DomainError(
                f"map {state.map_name!r} is not in the one-hot pool {DEFAULT_MAP_POOL}")
        block = [0.0] * len(DEFAULT_MAP_POOL)
        block[_MAP_INDEX[state.map_name]] = 1.0
        values.extend(block)
    elif schema != SCHEMA_PER_MAP:
        raise DomainError(f"unknown feature schema {schema!r}")
    return tuple(values)


def featurize(round_: LabeledRound | RoundState, mode: str = SCHEMA_PER_MAP) -> FeatureVector:
    state = round_.state if isinstance(round_, LabeledRound) else round_
    return FeatureVector(_encode_state(state, mode), mode, state.map_name)


def featurize_batch(
    rounds: list[LabeledRound], mode: str = SCHEMA_PER_MAP
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """(X, y, map names) for a labeled dataset; y indexes OUTCOME_ORDER."""
    n = len(rounds)
    X = np.empty((n, N_PER_SCHEMA[mode]), dtype=np.float64)
    y = np.empty(n, dtype=np.int64)
    maps: list[str] = []
    for i, lr in enumerate(rounds):
        X[i] = _encode_state(lr.state, mode)
        y[i] = OUTCOME_INDEX[lr.outcome]
        maps.append(lr.state.map_name)
    return X, y, maps


def states_matrix(states: list[RoundState], mode: str) -> np.ndarray:
    X = np.empty((len(states), N_PER_SCHEMA[mode]), dtype=np.float64)
    for i, state in enumerate(states):
        X[i] = _encode_state(state, mode)
    return X


def decode_features(fv: FeatureVector) -> dict:
    """Recover the encoded fields; inverse of featurize on its image."""
    v = fv.values
    out = {
        "ct_score": int(v[0]),
        "t_score": int(v[1]),
        "score_diff": int(v[2]),
        "ct_equip_start": int(v[3]),
        "t_equip_start": int(v[4]),
        "ct_money": int(v[5]),
        "t_money": int(v[6]),
    }
    ct_block = v[7 : 7 + len(BUY_ORDER)]
    t_block = v[7 + len(BUY_ORDER) : 7 + 2 * len(BUY_ORDER)]
    for name, block in (("ct_buy", ct_block), ("t_buy", t_block)):
        if sum(block) != 1.0:
            raise DomainError(f"{name} one-hot block does not sum to 1")
        out[name] = BUY_ORDER[block.index(1.0)]
    if fv.schema == SCHEMA_OHE_MAP:
        block = v[N_BASE_FEATURES:]
        if sum(block) != 1.0:
            raise DomainError("map one-hot block does not sum to 1")
        out["map_name"] = DEFAULT_MAP_POOL[block.index(1.0)]
    else:
        out["map_name"] = fv.map_name
    return out

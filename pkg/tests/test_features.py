from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from econoscope.domain import BUY_ORDER, DEFAULT_MAP_POOL, DomainError, GameOutcome
from econoscope.features import (
    SCHEMA_OHE_MAP,
    SCHEMA_PER_MAP,
    decode_features,
    feature_names,
    featurize,
    featurize_batch,
)

from conftest import make_labeled, make_state


def test_per_map_layout_symmetric_state():
    state = make_state(ct_equip_start=1_000, t_equip_start=1_000,
                       ct_money=4_000, t_money=4_000)
    fv = featurize(state, SCHEMA_PER_MAP)
    assert len(fv.values) == 19
    assert fv.values[2] == 0.0  # score_diff
    ct_block = fv.values[7:13]
    t_block = fv.values[13:19]
    assert ct_block == t_block
    assert ct_block[0] == 1.0 and sum(ct_block) == 1.0  # both sides eco


def test_ohe_map_appends_single_hot_block():
    state = make_state(map_name=DEFAULT_MAP_POOL[2])
    fv = featurize(state, SCHEMA_OHE_MAP)
    assert len(fv.values) == 26
    map_block = fv.values[19:]
    assert map_block[2] == 1.0 and sum(map_block) == 1.0


def test_feature_names_align_with_length():
    assert len(feature_names(SCHEMA_PER_MAP)) == 19
    assert len(feature_names(SCHEMA_OHE_MAP)) == 26
    assert feature_names(SCHEMA_PER_MAP)[2] == "score_diff"


def test_unknown_map_fails_ohe_only():
    state = make_state(map_name="cache")
    assert featurize(state, SCHEMA_PER_MAP).map_name == "cache"
    with pytest.raises(DomainError):
        featurize(state, SCHEMA_OHE_MAP)


@given(
    ct_score=st.integers(0, 15),
    t_score=st.integers(0, 15),
    ct_equip=st.integers(0, 30_000),
    t_equip=st.integers(0, 30_000),
    ct_money=st.integers(0, 80_000),
    t_money=st.integers(0, 80_000),
    map_idx=st.integers(0, 6),
    data=st.data(),
)
@settings(max_examples=150)
def test_round_trip_recovers_state(ct_score, t_score, ct_equip, t_equip,
                                   ct_money, t_money, map_idx, data):
    state = make_state(
        ct_score=ct_score, t_score=t_score,
        ct_equip_start=ct_equip, t_equip_start=t_equip,
        ct_money=ct_money, t_money=t_money,
        ct_spend=data.draw(st.integers(0, ct_money)),
        t_spend=data.draw(st.integers(0, t_money)),
        map_name=DEFAULT_MAP_POOL[map_idx],
    )
    for mode in (SCHEMA_PER_MAP, SCHEMA_OHE_MAP):
        decoded = decode_features(featurize(state, mode))
        assert decoded["ct_score"] == state.ct_score
        assert decoded["t_score"] == state.t_score
        assert decoded["score_diff"] == state.ct_score - state.t_score
        assert decoded["ct_equip_start"] == state.ct_equip_start
        assert decoded["t_equip_start"] == state.t_equip_start
        assert decoded["ct_money"] == state.ct_money
        assert decoded["t_money"] == state.t_money
        assert decoded["ct_buy"] is state.ct_buy
        assert decoded["t_buy"] is state.t_buy
        assert decoded["map_name"] == state.map_name


def test_batch_matches_single_encoding():
    rounds = [
        make_labeled(GameOutcome.CT_WIN, ct_score=3, t_score=1,
                     ct_money=10_000, ct_spend=8_000),
        make_labeled(GameOutcome.T_WIN, map_name="nuke"),
        make_labeled(GameOutcome.DRAW, t_equip_start=5_000),
    ]
    X, y, maps = featurize_batch(rounds, SCHEMA_OHE_MAP)
    assert X.shape == (3, 26)
    assert list(y) == [0, 1, 2]
    assert maps == ["inferno", "nuke", "inferno"]
    for i, lr in enumerate(rounds):
        np.testing.assert_array_equal(X[i], featurize(lr, SCHEMA_OHE_MAP).as_array())

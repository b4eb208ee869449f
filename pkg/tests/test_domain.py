from __future__ import annotations

import pytest

from econoscope.domain import (
    BUY_ORDER,
    BuyType,
    DomainError,
    GameOutcome,
    OutcomeDistribution,
    Side,
)

from conftest import make_state


def test_enumerations_have_fixed_cardinality():
    assert len(Side) == 2
    assert len(BuyType) == 6
    assert len(GameOutcome) == 3
    assert len(BUY_ORDER) == 6


def test_side_opponent():
    assert Side.CT.opponent is Side.T
    assert Side.T.opponent is Side.CT


class TestRoundState:
    def test_spend_cannot_exceed_money(self):
        with pytest.raises(DomainError):
            make_state(ct_money=1_000, ct_spend=2_000)
        with pytest.raises(DomainError):
            make_state(t_money=1_000, t_spend=2_000)

    def test_negative_fields_rejected(self):
        with pytest.raises(DomainError):
            make_state(ct_score=-1)
        with pytest.raises(DomainError):
            make_state(t_equip_start=-100)

    def test_side_fields(self):
        state = make_state(ct_equip_start=5_000, ct_money=9_000, ct_spend=2_500)
        equip, money, spend, buy, team = state.side_fields(Side.CT)
        assert (equip, money, spend, team) == (5_000, 9_000, 2_500, "alpha")
        assert buy is state.ct_buy

    def test_team_side(self):
        state = make_state()
        assert state.team_side("alpha") is Side.CT
        assert state.team_side("beta") is Side.T
        assert state.team_side("nobody") is None


class TestOutcomeDistribution:
    def test_valid(self):
        d = OutcomeDistribution(0.5, 0.3, 0.2)
        assert d.for_side(Side.CT) == 0.5
        assert d.for_side(Side.T) == 0.3

    def test_sum_must_be_one(self):
        with pytest.raises(DomainError):
            OutcomeDistribution(0.5, 0.5, 0.1)

    def test_range_check(self):
        with pytest.raises(DomainError):
            OutcomeDistribution(1.2, -0.1, -0.1)

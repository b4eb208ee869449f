"""Shared builders for round fixtures."""

from __future__ import annotations

import datetime as dt

from econoscope.domain import GameOutcome, LabeledRound, RoundState, Side
from econoscope.economy import classify_buy


def make_state(
    game_id="g1",
    map_name="inferno",
    ct_score=0,
    t_score=0,
    ct_equip_start=0,
    t_equip_start=0,
    ct_money=4_000,
    t_money=4_000,
    ct_spend=0,
    t_spend=0,
    ct_team="alpha",
    t_team="beta",
    match_date=dt.date(2020, 6, 1),
    round_number=None,
) -> RoundState:
    return RoundState(
        game_id=game_id,
        map_name=map_name,
        round_number=ct_score + t_score + 1 if round_number is None else round_number,
        ct_score=ct_score,
        t_score=t_score,
        ct_equip_start=ct_equip_start,
        t_equip_start=t_equip_start,
        ct_money=ct_money,
        t_money=t_money,
        ct_spend=ct_spend,
        t_spend=t_spend,
        ct_buy=classify_buy(ct_equip_start, ct_spend),
        t_buy=classify_buy(t_equip_start, t_spend),
        ct_team=ct_team,
        t_team=t_team,
        match_date=match_date,
    )


def make_labeled(outcome=GameOutcome.CT_WIN, round_winner=Side.CT, **kwargs) -> LabeledRound:
    return LabeledRound(make_state(**kwargs), outcome, round_winner)

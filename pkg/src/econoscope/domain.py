"""Shared domain types for round economies and game outcomes.

Everything here is immutable after construction and safe to share across
threads. Buy labels on a RoundState are expected to be derived from
(equipment, spend) by the economy module, never taken on faith from input
files; ingest enforces that.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass
from enum import Enum


class Side(Enum):
    CT = "CT"
    T = "T"

    @property
    def opponent(self) -> "Side":
        return Side.T if self is Side.CT else Side.CT


class BuyType(Enum):
    """Six-way spending taxonomy for a side's buy phase."""

    ECO = "Eco"
    LOW_BUY = "LowBuy"
    HALF_BUY = "HalfBuy"
    HERO_LOW_BUY = "HeroLowBuy"
    HERO_HALF_BUY = "HeroHalfBuy"
    FULL_BUY = "FullBuy"


# Canonical ordering used for one-hot blocks, tables and reports.
BUY_ORDER: tuple[BuyType, ...] = (
    BuyType.ECO,
    BuyType.LOW_BUY,
    BuyType.HALF_BUY,
    BuyType.HERO_LOW_BUY,
    BuyType.HERO_HALF_BUY,
    BuyType.FULL_BUY,
)

BUY_INDEX: dict[BuyType, int] = {b: i for i, b in enumerate(BUY_ORDER)}


class GameOutcome(Enum):
    """Game result relative to the sides at the round in question."""

    CT_WIN = "CtWin"
    T_WIN = "TWin"
    DRAW = "Draw"


OUTCOME_ORDER: tuple[GameOutcome, ...] = (
    GameOutcome.CT_WIN,
    GameOutcome.T_WIN,
    GameOutcome.DRAW,
)

OUTCOME_INDEX: dict[GameOutcome, int] = {o: i for i, o in enumerate(OUTCOME_ORDER)}

# The seven-map competitive pool this engine ships with.
DEFAULT_MAP_POOL: tuple[str, ...] = (
    "dust2",
    "inferno",
    "mirage",
    "nuke",
    "overpass",
    "train",
    "vertigo",
)


class DomainError(ValueError):
    """Invalid argument or invariant violation in a domain value."""


@dataclass(frozen=True)
class RoundState:
    """Everything known about a round at its start, before it is played.

    Money and equipment fields are team totals in dollars. Buy types are
    derived labels; ``round_number == ct_score + t_score + 1`` holds for
    every round because exactly one score increments per round.
    """

    game_id: str
    map_name: str
    round_number: int
    ct_score: int
    t_score: int
    ct_equip_start: int
    t_equip_start: int
    ct_money: int
    t_money: int
    ct_spend: int
    t_spend: int
    ct_buy: BuyType
    t_buy: BuyType
    ct_team: str
    t_team: str
    match_date: _dt.date

    def __post_init__(self) -> None:
        if self.round_number < 1:
            raise DomainError(f"round_number must be >= 1, got {self.round_number}")
        for field in ("ct_score", "t_score", "ct_equip_start", "t_equip_start",
                      "ct_money", "t_money", "ct_spend", "t_spend"):
            value = getattr(self, field)
            if value < 0:
                raise DomainError(f"{field} must be >= 0, got {value}")
        if self.ct_spend > self.ct_money:
            raise DomainError(
                f"ct_spend {self.ct_spend} exceeds ct_money {self.ct_money}")
        if self.t_spend > self.t_money:
            raise DomainError(
                f"t_spend {self.t_spend} exceeds t_money {self.t_money}")

    def side_fields(self, side: Side) -> tuple[int, int, int, BuyType, str]:
        """(equip_start, money, spend, buy, team) for one side."""
        if side is Side.CT:
            return (self.ct_equip_start, self.ct_money, self.ct_spend,
                    self.ct_buy, self.ct_team)
        return (self.t_equip_start, self.t_money, self.t_spend,
                self.t_buy, self.t_team)

    def team_side(self, team: str) -> Side | None:
        if team == self.ct_team:
            return Side.CT
        if team == self.t_team:
            return Side.T
        return None


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probability over the three game outcomes; sums to 1 within 1e-9."""

    p_ct_win: float
    p_t_win: float
    p_draw: float

    def __post_init__(self) -> None:
        for name, p in (("p_ct_win", self.p_ct_win),
                        ("p_t_win", self.p_t_win),
                        ("p_draw", self.p_draw)):
            if not (0.0 <= p <= 1.0):
                raise DomainError(f"{name} must be in [0, 1], got {p}")
        total = self.p_ct_win + self.p_t_win + self.p_draw
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"probabilities sum to {total!r}, expected 1")

    def for_side(self, side: Side) -> float:
        """Win probability credited to one side; draw mass goes to neither."""
        return self.p_ct_win if side is Side.CT else self.p_t_win

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_ct_win, self.p_t_win, self.p_draw)


@dataclass(frozen=True)
class LabeledRound:
    """A round plus its game-level outcome label and round winner.

    ``round_winner`` feeds win-rate reports only; the model target is
    ``outcome``.
    """

    state: RoundState
    outcome: GameOutcome
    round_winner: Side

"""CSGO round-economy rules.

Buy-type classification, the round-reward and loss-bonus ladder, and the
feasibility logic that constrains counterfactual buy choices. All interval
boundaries are half-open [lo, hi); the full-buy test (equipment + spend
reaching $20,000) takes precedence over the tier rows.
"""

from __future__ import annotations

from dataclasses import dataclass

from .domain import BuyType, DomainError, Side

# Table boundaries, dollars. Full-buy threshold doubles as the implicit
# upper bound of the half-buy spend ranges.
FULL_BUY_TOTAL = 20_000
HERO_EQUIP_MIN = 3_000
LOW_SPEND_MAX = 2_000
HALF_SPEND_MIN = 7_500


@dataclass(frozen=True)
class EconomyConfig:
    """Per-player dollar amounts for the round economy.

    The loss bonus ladder is indexed by consecutive losses since the last
    win; the final entry repeats for longer streaks.
    """

    win_reward: int = 3_250
    bomb_detonation_reward: int = 3_500
    loss_bonus_ladder: tuple[int, ...] = (1_400, 1_900, 2_400, 2_900, 3_400)
    max_money: int = 16_000
    full_buy_threshold: int = FULL_BUY_TOTAL

    def __post_init__(self) -> None:
        if self.full_buy_threshold <= 0:
            raise DomainError("full_buy_threshold must be positive")
        for name in ("win_reward", "bomb_detonation_reward", "max_money"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0")
        ladder = tuple(self.loss_bonus_ladder)
        if not ladder:
            raise DomainError("loss_bonus_ladder must be non-empty")
        if any(v < 0 for v in ladder):
            raise DomainError("loss bonus values must be >= 0")
        if any(b < a for a, b in zip(ladder, ladder[1:])):
            raise DomainError("loss_bonus_ladder must be non-decreasing")
        object.__setattr__(self, "loss_bonus_ladder", ladder)


DEFAULT_ECONOMY = EconomyConfig()


def classify_buy(equip_start: float, spend: float) -> BuyType:
    """Map a side's (starting equipment, buy-phase spend) to its buy type."""
    if equip_start < 0 or spend < 0:
        raise DomainError(
            f"equipment and spend must be >= 0, got ({equip_start}, {spend})")
    if equip_start + spend >= FULL_BUY_TOTAL:
        return BuyType.FULL_BUY
    if equip_start < HERO_EQUIP_MIN:
        if spend < LOW_SPEND_MAX:
            return BuyType.ECO
        if spend < HALF_SPEND_MIN:
            return BuyType.LOW_BUY
        return BuyType.HALF_BUY
    if spend < HALF_SPEND_MIN:
        return BuyType.HERO_LOW_BUY
    return BuyType.HERO_HALF_BUY


def loss_bonus(consecutive_losses: int, config: EconomyConfig = DEFAULT_ECONOMY) -> int:
    """Per-player payout after the given number of consecutive losses."""
    if consecutive_losses < 1:
        raise DomainError(
            "loss bonus requires >= 1 consecutive losses; winners take win_reward")
    ladder = config.loss_bonus_ladder
    return ladder[min(consecutive_losses, len(ladder)) - 1]


def round_reward(winner_side: Side, win_by_detonation: bool,
                 config: EconomyConfig = DEFAULT_ECONOMY) -> int:
    """Per-player payout for the round winner."""
    if win_by_detonation and winner_side is not Side.T:
        raise DomainError("bomb detonation wins belong to the T side")
    return config.bomb_detonation_reward if win_by_detonation else config.win_reward


def _spend_intervals(equip_start: float) -> dict[BuyType, tuple[float, float]]:
    """Half-open spend intervals realizing each non-full buy at this tier."""
    cap = FULL_BUY_TOTAL - equip_start  # spends >= cap become a full buy
    if equip_start < HERO_EQUIP_MIN:
        return {
            BuyType.ECO: (0, LOW_SPEND_MAX),
            BuyType.LOW_BUY: (LOW_SPEND_MAX, HALF_SPEND_MIN),
            BuyType.HALF_BUY: (HALF_SPEND_MIN, cap),
        }
    if equip_start < FULL_BUY_TOTAL:
        return {
            BuyType.HERO_LOW_BUY: (0, min(HALF_SPEND_MIN, cap)),
            BuyType.HERO_HALF_BUY: (HALF_SPEND_MIN, cap),
        }
    return {}


def feasible_buys(equip_start: float, money: float) -> set[BuyType]:
    """Buy types reachable by some spend in [0, money].

    Equipment tier is fixed at round start; only the spend varies, so hero
    and non-hero buys never appear in the same feasible set.
    """
    if equip_start < 0 or money < 0:
        raise DomainError(
            f"equipment and money must be >= 0, got ({equip_start}, {money})")
    out = {
        buy
        for buy, (lo, hi) in _spend_intervals(equip_start).items()
        if lo < hi and money >= lo
    }
    if equip_start + money >= FULL_BUY_TOTAL:
        out.add(BuyType.FULL_BUY)
    return out


def representative_spend(buy: BuyType, equip_start: float, money: float) -> int:
    """Concrete spend standing in for a chosen buy type.

    Midpoint of the spend interval realizing the buy, clipped to the money
    on hand; a full buy tops equipment up to the threshold plus a $2,000
    margin for utility.
    """
    if buy not in feasible_buys(equip_start, money):
        raise DomainError(
            f"{buy.value} infeasible at equip={equip_start}, money={money}")
    if buy is BuyType.FULL_BUY:
        return int(min(money, max(0, FULL_BUY_TOTAL - equip_start) + 2_000))
    lo, hi = _spend_intervals(equip_start)[buy]
    return int((lo + min(hi, money)) // 2)

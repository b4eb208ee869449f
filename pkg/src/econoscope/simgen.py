"""Synthetic match generator and Monte Carlo ground-truth oracle.

Round winners follow a logistic model on the post-buy equipment difference
plus a per-map CT bias, so spending decisions causally matter. The economy
dynamics (win reward, loss-bonus ladder, money cap, equipment carryover,
half-time reset) are exact integer arithmetic, which lets tests replay a
game from its round records and verify money conservation to the dollar.

Two engines share one set of policy/spend rules: a per-game Python loop
used by the corpus generator (it supports model-driven policies), and a
vectorized rollout engine used by the oracle, where a hundred thousand
continuations of one state run as a few numpy ops per round.
"""

from __future__ import annotations

import datetime as _dt
import math
import zlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .domain import (
    BUY_INDEX,
    BUY_ORDER,
    DEFAULT_MAP_POOL,
    BuyType,
    DomainError,
    GameOutcome,
    OutcomeDistribution,
    RoundState,
    Side,
)
from .economy import (
    DEFAULT_ECONOMY,
    FULL_BUY_TOTAL,
    EconomyConfig,
    classify_buy,
    feasible_buys,
    loss_bonus,
    representative_spend,
    round_reward,
)
from .ingest import DRAW_MARKER, record_from_state

PLAYERS_PER_TEAM = 5
PISTOL_MONEY_PER_PLAYER = 800

# CT round-win logit offset at equal equipment; deliberately distinct per
# map so map identity is learnable from synthetic corpora.
DEFAULT_MAP_BIAS: dict[str, float] = {
    "dust2": 0.10,
    "inferno": 0.05,
    "mirage": 0.15,
    "nuke": 0.20,
    "overpass": -0.05,
    "train": 0.12,
    "vertigo": -0.10,
}

POLICY_NAMES = ("always-max", "threshold-full-buy", "random-feasible")


@dataclass(frozen=True)
class SimConfig:
    economy: EconomyConfig = DEFAULT_ECONOMY
    equip_advantage_coeff: float = 2e-4  # logit per dollar of equipment edge
    map_side_bias: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_MAP_BIAS))
    rounds_to_win: int = 16
    half_length: int = 15
    policy_ct: str = "threshold-full-buy"
    policy_t: str = "threshold-full-buy"
    rng_seed: int = 0
    carryover_win: float = 0.7   # post-buy equipment fraction kept by winner
    carryover_loss: float = 0.2
    detonation_prob: float = 0.3  # chance a T round win pays the bomb reward

    def __post_init__(self) -> None:
        if self.equip_advantage_coeff < 0:
            raise DomainError("equip_advantage_coeff must be >= 0")
        if not self.rounds_to_win > self.half_length:
            raise DomainError("rounds_to_win must exceed half_length")
        for name in ("carryover_win", "carryover_loss", "detonation_prob"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name} must be in [0, 1], got {v}")

    def bias_for(self, map_name: str) -> float:
        return float(self.map_side_bias.get(map_name, 0.0))

    @property
    def team_start_money(self) -> int:
        return PISTOL_MONEY_PER_PLAYER * PLAYERS_PER_TEAM

    @property
    def team_money_cap(self) -> int:
        return self.economy.max_money * PLAYERS_PER_TEAM


@dataclass(frozen=True)
class GameResult:
    winner_team: str | None  # None means a 15-15 draw
    round_winners: tuple[Side, ...]
    detonations: tuple[bool, ...]

    @property
    def winner_marker(self) -> str:
        return self.winner_team if self.winner_team is not None else DRAW_MARKER


# --------------------------------------------------------------------------
# Buy policies. Scalar policy calls delegate to the vectorized selectors so
# the per-game engine and the rollout engine can never disagree.
# --------------------------------------------------------------------------

def _feasibility_matrix(equip: np.ndarray, money: np.ndarray) -> np.ndarray:
    """(n, 6) bool matrix over BUY_ORDER mirroring economy.feasible_buys."""
    low = equip < 3_000
    hero = (equip >= 3_000) & (equip < FULL_BUY_TOTAL)
    out = np.zeros((equip.shape[0], len(BUY_ORDER)), dtype=bool)
    out[:, BUY_INDEX[BuyType.ECO]] = low
    out[:, BUY_INDEX[BuyType.LOW_BUY]] = low & (money >= 2_000)
    out[:, BUY_INDEX[BuyType.HALF_BUY]] = low & (money >= 7_500)
    out[:, BUY_INDEX[BuyType.HERO_LOW_BUY]] = hero
    out[:, BUY_INDEX[BuyType.HERO_HALF_BUY]] = (
        hero & (money >= 7_500) & (equip < FULL_BUY_TOTAL - 7_500))
    out[:, BUY_INDEX[BuyType.FULL_BUY]] = equip + money >= FULL_BUY_TOTAL
    return out


def representative_spend_vec(buy_idx: np.ndarray, equip: np.ndarray,
                             money: np.ndarray) -> np.ndarray:
    """Vectorized economy.representative_spend over feasible choices."""
    cap = FULL_BUY_TOTAL - equip
    lo = np.select(
        [buy_idx == BUY_INDEX[BuyType.ECO],
         buy_idx == BUY_INDEX[BuyType.LOW_BUY],
         buy_idx == BUY_INDEX[BuyType.HALF_BUY],
         buy_idx == BUY_INDEX[BuyType.HERO_LOW_BUY],
         buy_idx == BUY_INDEX[BuyType.HERO_HALF_BUY]],
        [0, 2_000, 7_500, 0, 7_500],
        default=0,
    )
    hi = np.select(
        [buy_idx == BUY_INDEX[BuyType.ECO],
         buy_idx == BUY_INDEX[BuyType.LOW_BUY],
         buy_idx == BUY_INDEX[BuyType.HALF_BUY],
         buy_idx == BUY_INDEX[BuyType.HERO_LOW_BUY],
         buy_idx == BUY_INDEX[BuyType.HERO_HALF_BUY]],
        [2_000, 7_500, cap, np.minimum(7_500, cap), cap],
        default=0,
    )
    mid = (lo + np.minimum(hi, money)) // 2
    full = np.minimum(money, np.maximum(0, cap) + 2_000)
    return np.where(buy_idx == BUY_INDEX[BuyType.FULL_BUY], full, mid).astype(np.int64)


_PREFER_EXPENSIVE = [BuyType.FULL_BUY, BuyType.HALF_BUY, BuyType.HERO_HALF_BUY,
                     BuyType.LOW_BUY, BuyType.HERO_LOW_BUY, BuyType.ECO]
_PREFER_CHEAP = list(reversed(_PREFER_EXPENSIVE))


def _pick_by_preference(feasible: np.ndarray, order: list[BuyType]) -> np.ndarray:
    cols = [BUY_INDEX[b] for b in order]
    ranked = feasible[:, cols]
    choice_rank = np.argmax(ranked, axis=1)  # first feasible in preference order
    return np.asarray(cols, dtype=np.int64)[choice_rank]


def choose_buys_vec(policy: str, equip: np.ndarray, money: np.ndarray,
                    rng: np.random.Generator,
                    economy: EconomyConfig = DEFAULT_ECONOMY) -> np.ndarray:
    """Buy index per row for one of the stateless policy kinds."""
    feasible = _feasibility_matrix(equip, money)
    if policy == "always-max":
        return _pick_by_preference(feasible, _PREFER_EXPENSIVE)
    if policy == "threshold-full-buy":
        full = equip + money >= economy.full_buy_threshold
        cheap = _pick_by_preference(feasible, _PREFER_CHEAP)
        return np.where(full, BUY_INDEX[BuyType.FULL_BUY], cheap)
    if policy == "random-feasible":
        counts = feasible.sum(axis=1)
        k = np.floor(rng.random(equip.shape[0]) * counts).astype(np.int64)
        cum = np.cumsum(feasible, axis=1)
        return np.argmax(cum > k[:, None], axis=1).astype(np.int64)
    raise DomainError(f"unknown policy {policy!r}; expected one of {POLICY_NAMES}")


class SpendingPolicy:
    """Picks a buy type for one team; spend is always the representative one."""

    name = "abstract"
    needs_opponent_buy = False

    def choose(self, ctx: "BuyContext", rng: np.random.Generator) -> BuyType:
        raise NotImplementedError


class StatelessPolicy(SpendingPolicy):
    def __init__(self, name: str):
        if name not in POLICY_NAMES:
            raise DomainError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")
        self.name = name

    def choose(self, ctx: "BuyContext", rng: np.random.Generator) -> BuyType:
        idx = choose_buys_vec(
            self.name,
            np.asarray([ctx.my_equip], dtype=np.int64),
            np.asarray([ctx.my_money], dtype=np.int64),
            rng,
            ctx.economy,
        )[0]
        return BUY_ORDER[idx]


class OracleOptimalPolicy(SpendingPolicy):
    """Argmax buy under a win-probability model, matching the counterfactual
    evaluator's tie-breaking exactly (teams run by this policy score an
    optimal-spending error of zero against the same model)."""

    name = "oracle-optimal"
    needs_opponent_buy = True

    def __init__(self, model):
        self.model = model

    def choose(self, ctx: "BuyContext", rng: np.random.Generator) -> BuyType:
        from .counterfactual import evaluate_buy_options  # local: keeps layering one-way

        opp_buy = ctx.opp_buy
        opp_spend = ctx.opp_spend
        if opp_buy is None:
            # opponent undecided: assume their maximal feasible buy
            idx = choose_buys_vec(
                "always-max",
                np.asarray([ctx.opp_equip], dtype=np.int64),
                np.asarray([ctx.opp_money], dtype=np.int64),
                rng,
                ctx.economy,
            )[0]
            opp_buy = BUY_ORDER[idx]
            opp_spend = representative_spend(opp_buy, ctx.opp_equip, ctx.opp_money)
        placeholder = min(
            feasible_buys(ctx.my_equip, ctx.my_money),
            key=lambda b: representative_spend(b, ctx.my_equip, ctx.my_money),
        )
        my_spend = representative_spend(placeholder, ctx.my_equip, ctx.my_money)
        if ctx.my_side is Side.CT:
            ct = (ctx.my_equip, ctx.my_money, my_spend, placeholder, ctx.my_team)
            t = (ctx.opp_equip, ctx.opp_money, opp_spend, opp_buy, ctx.opp_team)
        else:
            ct = (ctx.opp_equip, ctx.opp_money, opp_spend, opp_buy, ctx.opp_team)
            t = (ctx.my_equip, ctx.my_money, my_spend, placeholder, ctx.my_team)
        state = RoundState(
            game_id=ctx.game_id,
            map_name=ctx.map_name,
            round_number=ctx.round_number,
            ct_score=ctx.ct_score,
            t_score=ctx.t_score,
            ct_equip_start=ct[0], t_equip_start=t[0],
            ct_money=ct[1], t_money=t[1],
            ct_spend=ct[2], t_spend=t[2],
            ct_buy=ct[3], t_buy=t[3],
            ct_team=ct[4], t_team=t[4],
            match_date=ctx.match_date,
        )
        return evaluate_buy_options(self.model, state, ctx.my_side).optimal_buy


def make_policy(name: str, model=None) -> SpendingPolicy:
    if name == "oracle-optimal":
        if model is None:
            raise DomainError("oracle-optimal policy needs a model")
        return OracleOptimalPolicy(model)
    return StatelessPolicy(name)


@dataclass(frozen=True)
class BuyContext:
    """What a policy may look at when choosing a buy."""

    game_id: str
    map_name: str
    round_number: int
    ct_score: int
    t_score: int
    my_side: Side
    my_team: str
    opp_team: str
    my_equip: int
    my_money: int
    opp_equip: int
    opp_money: int
    opp_buy: BuyType | None
    opp_spend: int | None
    match_date: _dt.date
    economy: EconomyConfig


# --------------------------------------------------------------------------
# Per-game engine
# --------------------------------------------------------------------------

@dataclass
class _TeamState:
    team_id: str
    policy: SpendingPolicy
    money: int
    equip: int = 0
    streak: int = 0  # consecutive losses since last win
    score: int = 0


def _sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def simulate_game(
    config: SimConfig,
    game_id: str = "sim-000000",
    match_date: _dt.date = _dt.date(2020, 6, 1),
    map_name: str = "inferno",
    teams: tuple[str, str] = ("alpha", "beta"),
    policies: tuple[SpendingPolicy, SpendingPolicy] | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[list[RoundState], GameResult]:
    """Play one game; returns round-start states plus the result.

    ``teams[0]`` starts CT with ``config.policy_ct`` (policies follow their
    team across the half-time switch).
    """
    if teams[0] == teams[1]:
        raise DomainError(f"teams must be distinct, got {teams!r}")
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    if policies is None:
        policies = (make_policy(config.policy_ct), make_policy(config.policy_t))
    start_money = config.team_start_money
    cap = config.team_money_cap
    a = _TeamState(teams[0], policies[0], money=start_money)
    b = _TeamState(teams[1], policies[1], money=start_money)
    bias = config.bias_for(map_name)
    rounds: list[RoundState] = []
    winners: list[Side] = []
    detonations: list[bool] = []
    total_rounds = 2 * config.half_length

    for round_number in range(1, total_rounds + 1):
        a_is_ct = round_number <= config.half_length
        if round_number == config.half_length + 1:
            for team in (a, b):  # half-time reset: second pistol round
                team.money, team.equip, team.streak = start_money, 0, 0
        ct, t = (a, b) if a_is_ct else (b, a)

        buys: dict[str, tuple[BuyType, int]] = {}
        first, second = sorted(
            (ct, t), key=lambda team: team.policy.needs_opponent_buy)
        for team, opp in ((first, second), (second, first)):
            opp_choice = buys.get(opp.team_id)
            ctx = BuyContext(
                game_id=game_id,
                map_name=map_name,
                round_number=round_number,
                ct_score=ct.score,
                t_score=t.score,
                my_side=Side.CT if team is ct else Side.T,
                my_team=team.team_id,
                opp_team=opp.team_id,
                my_equip=team.equip,
                my_money=team.money,
                opp_equip=opp.equip,
                opp_money=opp.money,
                opp_buy=opp_choice[0] if opp_choice else None,
                opp_spend=opp_choice[1] if opp_choice else None,
                match_date=match_date,
                economy=config.economy,
            )
            buy = team.policy.choose(ctx, rng)
            buys[team.team_id] = (buy, representative_spend(buy, team.equip, team.money))

        ct_buy, ct_spend = buys[ct.team_id]
        t_buy, t_spend = buys[t.team_id]
        rounds.append(RoundState(
            game_id=game_id,
            map_name=map_name,
            round_number=round_number,
            ct_score=ct.score,
            t_score=t.score,
            ct_equip_start=ct.equip,
            t_equip_start=t.equip,
            ct_money=ct.money,
            t_money=t.money,
            ct_spend=ct_spend,
            t_spend=t_spend,
            ct_buy=ct_buy,
            t_buy=t_buy,
            ct_team=ct.team_id,
            t_team=t.team_id,
            match_date=match_date,
        ))

        ct_after = ct.equip + ct_spend
        t_after = t.equip + t_spend
        p_ct = _sigmoid(config.equip_advantage_coeff * (ct_after - t_after) + bias)
        ct_won = bool(rng.random() < p_ct)
        winner, loser = (ct, t) if ct_won else (t, ct)
        winner_after, loser_after = (ct_after, t_after) if ct_won else (t_after, ct_after)
        detonation = (not ct_won) and bool(rng.random() < config.detonation_prob)
        winners.append(Side.CT if ct_won else Side.T)
        detonations.append(detonation)

        winner_side = Side.CT if ct_won else Side.T
        reward = round_reward(winner_side, detonation, config.economy)
        winner.money = min(cap, winner.money - buys[winner.team_id][1]
                           + PLAYERS_PER_TEAM * reward)
        winner.equip = int(config.carryover_win * winner_after)
        winner.streak = 0
        winner.score += 1
        loser.streak += 1
        bonus = loss_bonus(loser.streak, config.economy)
        loser.money = min(cap, loser.money - buys[loser.team_id][1]
                          + PLAYERS_PER_TEAM * bonus)
        loser.equip = int(config.carryover_loss * loser_after)

        if winner.score >= config.rounds_to_win:
            return rounds, GameResult(winner.team_id, tuple(winners), tuple(detonations))

    winner_team = None
    if a.score != b.score:
        winner_team = a.team_id if a.score > b.score else b.team_id
    return rounds, GameResult(winner_team, tuple(winners), tuple(detonations))


# --------------------------------------------------------------------------
# Vectorized rollout engine and Monte Carlo oracle
# --------------------------------------------------------------------------

def _state_fingerprint(state: RoundState) -> list[int]:
    return [
        zlib.crc32(state.map_name.encode()),
        state.round_number,
        state.ct_score, state.t_score,
        state.ct_equip_start, state.t_equip_start,
        state.ct_money, state.t_money,
        state.ct_spend, state.t_spend,
        BUY_INDEX[state.ct_buy], BUY_INDEX[state.t_buy],
    ]


def oracle_win_prob(
    state: RoundState,
    config: SimConfig,
    n_rollouts: int,
    ct_losses: int = 0,
    t_losses: int = 0,
    base_seed: int | None = None,
) -> OutcomeDistribution:
    """Monte Carlo game-outcome estimate from one round-start state.

    The given round's buys and spends are applied as recorded; later rounds
    follow the configured side policies. Loss streaks are not recoverable
    from a round state, so they default to fresh (overridable). Rollout
    seeds derive from the state's contents, making the estimate a pure
    function of (state, config, n_rollouts).
    """
    if n_rollouts < 1:
        raise DomainError("n_rollouts must be >= 1")
    for policy in (config.policy_ct, config.policy_t):
        if policy not in POLICY_NAMES:
            raise DomainError(
                f"oracle rollouts need a stateless policy, got {policy!r}")

    # absorbing states: game already decided
    if state.ct_score >= config.rounds_to_win:
        return OutcomeDistribution(1.0, 0.0, 0.0)
    if state.t_score >= config.rounds_to_win:
        return OutcomeDistribution(0.0, 1.0, 0.0)
    if state.round_number > 2 * config.half_length:
        return OutcomeDistribution(0.0, 0.0, 1.0)

    seed = config.rng_seed if base_seed is None else base_seed
    entropy = [seed & 0xFFFFFFFF] + _state_fingerprint(state) + [ct_losses, t_losses]
    rng = np.random.default_rng(np.random.SeedSequence(entropy))

    n = n_rollouts
    cap = config.team_money_cap
    start_money = config.team_start_money
    ladder = np.asarray(config.economy.loss_bonus_ladder, dtype=np.int64)
    bias = config.bias_for(state.map_name)
    coeff = config.equip_advantage_coeff

    # team A is the side playing CT in the input round
    money = {"A": np.full(n, state.ct_money, dtype=np.int64),
             "B": np.full(n, state.t_money, dtype=np.int64)}
    equip = {"A": np.full(n, state.ct_equip_start, dtype=np.int64),
             "B": np.full(n, state.t_equip_start, dtype=np.int64)}
    streak = {"A": np.full(n, ct_losses, dtype=np.int64),
              "B": np.full(n, t_losses, dtype=np.int64)}
    score = {"A": np.zeros(n, dtype=np.int64), "B": np.zeros(n, dtype=np.int64)}
    score["A"] += state.ct_score
    score["B"] += state.t_score
    outcome = np.zeros(n, dtype=np.int8)  # 0 undecided, 1 A wins, 2 B wins, 3 draw
    policy_of = {"A": config.policy_ct, "B": config.policy_t}

    first_round = True
    for round_number in range(state.round_number, 2 * config.half_length + 1):
        active = outcome == 0
        if not active.any():
            break
        a_is_ct = round_number <= config.half_length
        if round_number == config.half_length + 1 and round_number > state.round_number:
            for key in ("A", "B"):
                money[key][active] = start_money
                equip[key][active] = 0
                streak[key][active] = 0

        spend = {}
        if first_round:
            spend["A"] = np.full(n, state.ct_spend, dtype=np.int64)
            spend["B"] = np.full(n, state.t_spend, dtype=np.int64)
            first_round = False
        else:
            for key in ("A", "B"):
                buy_idx = choose_buys_vec(policy_of[key], equip[key], money[key],
                                          rng, config.economy)
                spend[key] = representative_spend_vec(buy_idx, equip[key], money[key])

        after = {key: equip[key] + spend[key] for key in ("A", "B")}
        ct_after, t_after = (after["A"], after["B"]) if a_is_ct else (after["B"], after["A"])
        logits = coeff * (ct_after - t_after).astype(np.float64) + bias
        p_ct = 1.0 / (1.0 + np.exp(-logits))
        ct_won = rng.random(n) < p_ct
        a_won = ct_won if a_is_ct else ~ct_won
        detonation = (~ct_won) & (rng.random(n) < config.detonation_prob)
        reward = np.where(detonation, config.economy.bomb_detonation_reward,
                          config.economy.win_reward)

        for key, won in (("A", a_won), ("B", ~a_won)):
            upd = active & won
            money[key][upd] = np.minimum(
                cap, money[key][upd] - spend[key][upd]
                + PLAYERS_PER_TEAM * reward[upd])
            equip[key][upd] = (config.carryover_win * after[key][upd]).astype(np.int64)
            streak[key][upd] = 0
            score[key][upd] += 1

            lost = active & ~won
            streak[key][lost] += 1
            bonus = ladder[np.minimum(streak[key][lost], len(ladder)) - 1]
            money[key][lost] = np.minimum(
                cap, money[key][lost] - spend[key][lost] + PLAYERS_PER_TEAM * bonus)
            equip[key][lost] = (config.carryover_loss * after[key][lost]).astype(np.int64)

        outcome[active & (score["A"] >= config.rounds_to_win)] = 1
        outcome[active & (score["B"] >= config.rounds_to_win)] = 2

    still = outcome == 0
    outcome[still & (score["A"] > score["B"])] = 1
    outcome[still & (score["B"] > score["A"])] = 2
    outcome[outcome == 0] = 3

    p_a = float(np.count_nonzero(outcome == 1)) / n
    p_b = float(np.count_nonzero(outcome == 2)) / n
    p_draw = float(np.count_nonzero(outcome == 3)) / n
    return OutcomeDistribution(p_a, p_b, p_draw)


class MonteCarloModel:
    """Adapter presenting oracle_win_prob through the model interface.

    Deterministic per state; usable wherever a trained model is expected.
    """

    family = "oracle"
    mode = "oracle"
    model_id = "monte-carlo-oracle"

    def __init__(self, config: SimConfig, n_rollouts: int = 2_000,
                 base_seed: int | None = None):
        self.config = config
        self.n_rollouts = n_rollouts
        self.base_seed = base_seed
        self._cache: dict[tuple, OutcomeDistribution] = {}

    def predict_state(self, state: RoundState) -> OutcomeDistribution:
        key = tuple(_state_fingerprint(state))
        hit = self._cache.get(key)
        if hit is None:
            hit = oracle_win_prob(state, self.config, self.n_rollouts,
                                  base_seed=self.base_seed)
            self._cache[key] = hit
        return hit


# --------------------------------------------------------------------------
# Corpus generation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TeamSpec:
    team_id: str
    policy: SpendingPolicy


def generate_corpus(
    n_games: int,
    config: SimConfig,
    date_range: tuple[_dt.date, _dt.date] = (_dt.date(2020, 4, 1), _dt.date(2021, 4, 20)),
    path: str | None = None,
    teams: Sequence[TeamSpec] | None = None,
    maps: Sequence[str] = DEFAULT_MAP_POOL,
    format: str | None = None,
) -> list[dict]:
    """Simulate games and emit flat schema records (optionally to a file).

    Each game draws its own child RNG stream from the configured seed, so
    corpora are reproducible under any parallel schedule. With a team
    roster, matchups and starting sides are drawn uniformly.
    """
    if n_games < 1:
        raise DomainError("n_games must be >= 1")
    start, end = date_range
    if end < start:
        raise DomainError("empty date range")
    if teams is not None and len(teams) < 2:
        raise DomainError("team roster needs at least two teams")

    span_days = (end - start).days + 1
    streams = np.random.SeedSequence(config.rng_seed).spawn(n_games)
    records: list[dict] = []
    for i, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        game_id = f"sim-{config.rng_seed}-{i:06d}"
        match_date = start + _dt.timedelta(days=int(rng.integers(span_days)))
        map_name = maps[int(rng.integers(len(maps)))]
        if teams is None:
            pair = (TeamSpec("alpha", make_policy(config.policy_ct)),
                    TeamSpec("beta", make_policy(config.policy_t)))
        else:
            first, second = rng.choice(len(teams), size=2, replace=False)
            pair = (teams[int(first)], teams[int(second)])
        if rng.random() < 0.5:
            pair = (pair[1], pair[0])
        rounds, result = simulate_game(
            config,
            game_id=game_id,
            match_date=match_date,
            map_name=map_name,
            teams=(pair[0].team_id, pair[1].team_id),
            policies=(pair[0].policy, pair[1].policy),
            rng=rng,
        )
        for state, side in zip(rounds, result.round_winners):
            records.append(record_from_state(state, side, result.winner_marker))

    if path is not None:
        from .ingest import write_records

        write_records(path, records, format)
    return records

"""Counterfactual buy analysis: per-round option win probabilities, the
optimal buy, optimal-vs-actual confusion matrices, and the second-round
(pistol-loss) report.

A counterfactual option replaces only the side's categorical buy type; the
opponent's buy and every money/equipment feature stay at recorded values,
so option predictions differ from the actual-state prediction through the
side's buy one-hot block alone. Draw mass is never credited to either side.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .domain import (
    BUY_INDEX,
    BUY_ORDER,
    BuyType,
    DomainError,
    LabeledRound,
    RoundState,
    Side,
)
from .economy import feasible_buys, representative_spend
from .features import states_matrix
from .models import PerMapModel, WinProbModel
from .tables import format_table

# second-round analysis: the low-economy buys of interest
LOW_ECONOMY_BUYS = (BuyType.ECO, BuyType.LOW_BUY, BuyType.HALF_BUY)


@dataclass(frozen=True)
class BuyEvaluation:
    """One side's buy options for one round, under one model."""

    state: RoundState
    side: Side
    actual_buy: BuyType
    options: dict[BuyType, float]  # side's game-win probability per option
    optimal_buy: BuyType
    w_actual: float
    o_optimal: float


def lost_probability(evaluation: BuyEvaluation) -> float:
    """Win probability given away by not playing the optimal buy; >= 0."""
    return evaluation.o_optimal - evaluation.w_actual


def _option_states(state: RoundState, side: Side) -> tuple[list[BuyType], list[RoundState]]:
    equip, money, _, actual_buy, _ = state.side_fields(side)
    options = feasible_buys(equip, money)
    if actual_buy not in options:
        raise DomainError(
            f"recorded {side.value} buy {actual_buy.value} is not feasible at "
            f"equip={equip}, money={money}")
    buys = [b for b in BUY_ORDER if b in options]
    if side is Side.CT:
        states = [replace(state, ct_buy=b) for b in buys]
    else:
        states = [replace(state, t_buy=b) for b in buys]
    return buys, states


def _assemble(state: RoundState, side: Side, buys: list[BuyType],
              probs: list[float]) -> BuyEvaluation:
    equip, money, _, actual_buy, _ = state.side_fields(side)
    options = dict(zip(buys, probs))
    # argmax; ties go to the cheaper buy, then to the canonical order
    optimal = max(
        buys,
        key=lambda b: (options[b], -representative_spend(b, equip, money),
                       -BUY_INDEX[b]),
    )
    return BuyEvaluation(
        state=state,
        side=side,
        actual_buy=actual_buy,
        options=options,
        optimal_buy=optimal,
        w_actual=options[actual_buy],
        o_optimal=options[optimal],
    )


def evaluate_buy_options(model, state: RoundState, side: Side) -> BuyEvaluation:
    """Win probability for every affordable buy, holding all else fixed."""
    buys, states = _option_states(state, side)
    probs = [model.predict_state(s).for_side(side) for s in states]
    return _assemble(state, side, buys, probs)


def evaluate_many(model, items: list[tuple[RoundState, Side]]) -> list[BuyEvaluation]:
    """Batched evaluate_buy_options: one model call for every option of
    every item. Falls back to per-state prediction for models without a
    matrix interface (e.g. the Monte Carlo oracle)."""
    if not isinstance(model, WinProbModel):
        return [evaluate_buy_options(model, s, side) for s, side in items]

    per_item: list[tuple[RoundState, Side, list[BuyType]]] = []
    all_states: list[RoundState] = []
    for state, side in items:
        buys, states = _option_states(state, side)
        per_item.append((state, side, buys))
        all_states.extend(states)
    if not all_states:
        return []
    X = states_matrix(all_states, model.feature_schema)
    if isinstance(model, PerMapModel):
        proba = np.empty((X.shape[0], 3))
        maps = np.asarray([s.map_name for s in all_states])
        for map_name in dict.fromkeys(maps.tolist()):
            mask = maps == map_name
            proba[mask] = model.sub_for(map_name).predict_matrix(X[mask])
    else:
        proba = model.predict_matrix(X)

    out = []
    cursor = 0
    for state, side, buys in per_item:
        block = proba[cursor:cursor + len(buys)]
        cursor += len(buys)
        col = 0 if side is Side.CT else 1
        out.append(_assemble(state, side, buys, [float(p) for p in block[:, col]]))
    return out


def confusion_matrix(model, rounds: list[LabeledRound], side: Side) -> np.ndarray:
    """6x6 counts, rows = optimal buy, columns = actual buy (BUY_ORDER)."""
    if not rounds:
        raise DomainError("confusion_matrix needs at least one round")
    evals = evaluate_many(model, [(lr.state, side) for lr in rounds])
    counts = np.zeros((len(BUY_ORDER), len(BUY_ORDER)), dtype=np.int64)
    for ev in evals:
        counts[BUY_INDEX[ev.optimal_buy], BUY_INDEX[ev.actual_buy]] += 1
    return counts


def confusion_matrix_text(counts: np.ndarray, side: Side) -> str:
    headers = [f"optimal \\ actual ({side.value})"] + [b.value for b in BUY_ORDER]
    rows = [[b.value] + list(counts[i]) for i, b in enumerate(BUY_ORDER)]
    return format_table(headers, rows)


def second_round_report(model, rounds: list[LabeledRound]) -> dict[Side, dict]:
    """Actual vs model-optimal buy rates in round 2 after losing the pistol.

    Rates cover the three low-economy buys; any other executed or optimal
    buy type lands in an ``other`` bucket (a data-quality signal).
    """
    report: dict[Side, dict] = {}
    for side in Side:
        if side is Side.CT:
            filtered = [lr for lr in rounds
                        if lr.state.round_number == 2 and lr.state.ct_score == 0]
        else:
            filtered = [lr for lr in rounds
                        if lr.state.round_number == 2 and lr.state.t_score == 0]
        evals = evaluate_many(model, [(lr.state, side) for lr in filtered])
        n = len(evals)
        actual: dict[str, float] = {}
        optimal: dict[str, float] = {}
        for bucket, pick in ((actual, lambda e: e.actual_buy),
                             (optimal, lambda e: e.optimal_buy)):
            tally: dict[str, int] = {}
            for ev in evals:
                buy = pick(ev)
                key = buy.value if buy in LOW_ECONOMY_BUYS else "other"
                tally[key] = tally.get(key, 0) + 1
            for buy in LOW_ECONOMY_BUYS:
                bucket[buy.value] = tally.get(buy.value, 0) / n if n else 0.0
            if tally.get("other"):
                bucket["other"] = tally["other"] / n
        report[side] = {"n_rounds": n, "actual": actual, "optimal": optimal}
    return report


def second_round_text(report: dict[Side, dict]) -> str:
    headers = ["", "side"] + [b.value for b in LOW_ECONOMY_BUYS] + ["other", "rounds"]
    rows = []
    for kind in ("actual", "optimal"):
        for side in (Side.T, Side.CT):
            data = report[side]
            rates = data[kind]
            rows.append(
                [kind if side is Side.T else "", side.value]
                + [f"{100 * rates[b.value]:.0f}%" for b in LOW_ECONOMY_BUYS]
                + [f"{100 * rates.get('other', 0.0):.0f}%", data["n_rounds"]])
    return format_table(headers, rows)

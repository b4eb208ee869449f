"""Metrics and experiment harnesses.

Log-loss over outcome distributions, the per-map model comparison report,
buy-type round-win rates, the leave-one-map-out transfer study, and the
plot-ready CSV exports (score-grid win surfaces, per-round probability
traces). Reported per-map numbers from real professional corpora are not
reproducible from desk-scale synthetic data; report footers say so.
"""

from __future__ import annotations

import datetime as _dt
import logging
from dataclasses import dataclass, field

import numpy as np

from .domain import (
    BUY_ORDER,
    OUTCOME_INDEX,
    OUTCOME_ORDER,
    BuyType,
    DomainError,
    GameOutcome,
    LabeledRound,
    OutcomeDistribution,
    RoundState,
    Side,
)
from .economy import feasible_buys, representative_spend
from .ingest import DatasetSplit
from .models import (
    Dataset,
    ModelError,
    NeuralHyperparams,
    WinProbModel,
    fine_tune_neural,
    multiclass_log_loss,
    schema_for_mode,
    train_neural,
)
from .tables import format_table

logger = logging.getLogger(__name__)

PROB_CLIP = 1e-15

REFERENCE_FOOTER = (
    "synthetic-corpus report; published per-map reference numbers require "
    "a full professional match corpus and are not expected to match here")


def log_loss(predictions: list[OutcomeDistribution],
             labels: list[GameOutcome]) -> float:
    """Mean cross-entropy; probabilities clipped to [1e-15, 1 - 1e-15]."""
    if len(predictions) != len(labels):
        raise DomainError(
            f"{len(predictions)} predictions vs {len(labels)} labels")
    if not predictions:
        raise DomainError("log_loss needs at least one prediction")
    P = np.asarray([p.as_tuple() for p in predictions], dtype=np.float64)
    y = np.asarray([OUTCOME_INDEX[l] for l in labels], dtype=np.int64)
    return multiclass_log_loss(P, y, clip=PROB_CLIP)


def _loss_on_rounds(model: WinProbModel, rounds: list[LabeledRound]) -> float:
    ds = Dataset.from_rounds(rounds, model.feature_schema)
    return multiclass_log_loss(model.predict_dataset(ds), ds.y, clip=PROB_CLIP)


@dataclass
class EvalReport:
    """Per-map test losses per family, Table-2 shaped."""

    rows: list[dict]               # {"map", "n_rounds", <family>: loss, ...}
    weighted_average: dict         # {<family>: loss}
    ohe_row: dict                  # {<family>: loss} for one-hot-map models
    families: list[str]
    n_test_rounds: int
    data_hash: str
    generated_at: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())
    footer: str = REFERENCE_FOOTER

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "weighted_average": self.weighted_average,
            "ohe_map": self.ohe_row,
            "families": self.families,
            "n_test_rounds": self.n_test_rounds,
            "data_hash": self.data_hash,
            "generated_at": self.generated_at,
            "footer": self.footer,
        }

    def to_text(self) -> str:
        headers = ["map", "rounds"] + self.families
        body = [
            [r["map"], r["n_rounds"]] + [f"{r[f]:.3f}" for f in self.families]
            for r in self.rows
        ]
        body.append(["weighted avg", self.n_test_rounds]
                    + [f"{self.weighted_average[f]:.3f}" for f in self.families])
        body.append(["ohe map", self.n_test_rounds]
                    + [f"{self.ohe_row[f]:.3f}" if f in self.ohe_row else "-"
                       for f in self.families])
        return (f"generated_at {self.generated_at}\n"
                + format_table(headers, body)
                + f"\n# {self.footer}\n# data {self.data_hash}")


def evaluate_suite(models: dict[str, WinProbModel], split: DatasetSplit) -> EvalReport:
    """Test-set losses per map and family, plus OHE-map rows.

    ``models`` keys are family names; a ``<family>_ohe`` key supplies the
    one-hot-map variant for that family's OHE row.
    """
    test = list(split.test)
    if not test:
        raise DomainError("cannot evaluate on an empty test partition")
    families = [k for k in models if not k.endswith("_ohe")]
    if not families:
        raise DomainError("no models to evaluate")

    by_map: dict[str, list[LabeledRound]] = {}
    for lr in test:
        by_map.setdefault(lr.state.map_name, []).append(lr)

    rows = []
    for map_name in sorted(by_map):
        rounds = by_map[map_name]
        row: dict = {"map": map_name, "n_rounds": len(rounds)}
        for family in families:
            row[family] = _loss_on_rounds(models[family], rounds)
        rows.append(row)

    weighted = {}
    n_total = len(test)
    for family in families:
        weighted[family] = float(
            sum(r[family] * r["n_rounds"] for r in rows) / n_total)

    ohe_row = {}
    for family in families:
        key = f"{family}_ohe"
        if key in models:
            ohe_row[family] = _loss_on_rounds(models[key], test)

    return EvalReport(
        rows=rows,
        weighted_average=weighted,
        ohe_row=ohe_row,
        families=families,
        n_test_rounds=n_total,
        data_hash=Dataset.from_rounds(test, "per_map").data_hash(),
    )


@dataclass
class WinRateCell:
    wins: int
    rounds: int

    @property
    def rate(self) -> float:
        return self.wins / self.rounds


def buy_winrate_report(
    rounds: list[LabeledRound],
) -> dict[Side, dict[BuyType, WinRateCell]]:
    """Round win rate per (side, executed buy type); empty cells absent."""
    if not rounds:
        raise DomainError("buy_winrate_report needs at least one round")
    table: dict[Side, dict[BuyType, WinRateCell]] = {Side.CT: {}, Side.T: {}}
    for lr in rounds:
        for side in Side:
            buy = lr.state.ct_buy if side is Side.CT else lr.state.t_buy
            cell = table[side].setdefault(buy, WinRateCell(0, 0))
            cell.rounds += 1
            cell.wins += lr.round_winner is side
    return table


def winrate_table_text(table: dict[Side, dict[BuyType, WinRateCell]]) -> str:
    headers = ["buy type", "CT win %", "CT rounds", "T win %", "T rounds"]
    rows = []
    for buy in BUY_ORDER:
        row = [buy.value]
        for side in (Side.CT, Side.T):
            cell = table[side].get(buy)
            row.extend(["-", 0] if cell is None
                       else [f"{100 * cell.rate:.0f}%", cell.rounds])
        rows.append(row)
    return format_table(headers, rows)


@dataclass
class TransferReport:
    """Leave-one-map-out study rows, Table-7 shaped."""

    rows: list[dict]  # {"map", "previous_best", "initial", "fine_tuned"}
    base_hyperparams: dict
    finetune_learning_rate: float
    generated_at: str = field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())
    footer: str = REFERENCE_FOOTER

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "base_hyperparams": self.base_hyperparams,
            "finetune_learning_rate": self.finetune_learning_rate,
            "generated_at": self.generated_at,
            "footer": self.footer,
        }

    def to_text(self) -> str:
        headers = ["held-out map", "previous best", "initial", "fine-tuned"]
        body = []
        for r in self.rows:
            prev = "-" if r["previous_best"] is None else f"{r['previous_best']:.3f}"
            body.append([r["map"], prev, f"{r['initial']:.3f}", f"{r['fine_tuned']:.3f}"])
        return (f"generated_at {self.generated_at}\n"
                + format_table(headers, body) + f"\n# {self.footer}")


DEFAULT_TRANSFER_HP = NeuralHyperparams(
    hidden1=96, hidden2=32, dropout=0.1, learning_rate=1e-4)
DEFAULT_FINETUNE_LR = 1e-5


def transfer_study(
    split: DatasetSplit,
    maps: list[str] | None = None,
    base_hp: NeuralHyperparams = DEFAULT_TRANSFER_HP,
    finetune_lr: float = DEFAULT_FINETUNE_LR,
    seed: int = 0,
    previous_best: dict[str, float] | None = None,
    max_epochs: int = 500,
    patience: int = 10,
) -> TransferReport:
    """Hold out each map; train a no-map-feature network on the rest,
    measure its loss on the held-out map, then fine-tune on that map's
    train partition at the lower rate and measure again."""
    schema = schema_for_mode("no_map")
    all_maps = sorted({lr.state.map_name for lr in split.train})
    if maps is None:
        maps = all_maps
    if len(all_maps) < 2:
        raise DomainError("transfer study needs at least two maps")

    rows = []
    for held_out in maps:
        train_rest = [lr for lr in split.train if lr.state.map_name != held_out]
        val_rest = [lr for lr in split.validation if lr.state.map_name != held_out]
        train_m = [lr for lr in split.train if lr.state.map_name == held_out]
        val_m = [lr for lr in split.validation if lr.state.map_name == held_out]
        test_m = [lr for lr in split.test if lr.state.map_name == held_out]
        if not train_rest or not train_m or not test_m:
            logger.warning("skipping map %s: empty partition", held_out)
            continue
        base = train_neural(
            Dataset.from_rounds(train_rest, schema),
            Dataset.from_rounds(val_rest or train_rest, schema),
            base_hp, mode="no_map", seed=seed,
            max_epochs=max_epochs, patience=patience)
        initial = _loss_on_rounds(base, test_m)
        tuned = fine_tune_neural(
            base,
            Dataset.from_rounds(train_m, schema),
            finetune_lr,
            new_val=Dataset.from_rounds(val_m, schema) if val_m else None,
            seed=seed, max_epochs=max_epochs, patience=patience)
        fine_tuned = _loss_on_rounds(tuned, test_m)
        rows.append({
            "map": held_out,
            "previous_best": (previous_best or {}).get(held_out),
            "initial": initial,
            "fine_tuned": fine_tuned,
        })

    from dataclasses import asdict

    return TransferReport(rows, asdict(base_hp), finetune_lr)


def score_grid_csv(
    model: WinProbModel,
    map_name: str,
    max_score: int = 15,
    equip: int = 10_000,
    money: int = 20_000,
    match_date: _dt.date = _dt.date(2020, 6, 1),
) -> str:
    """CT game-win probability over the score grid, plot-ready."""
    buy = max(feasible_buys(equip, money),
              key=lambda b: representative_spend(b, equip, money))
    spend = representative_spend(buy, equip, money)
    lines = ["ct_score,t_score,p_ct_win"]
    for ct_score in range(max_score + 1):
        for t_score in range(max_score + 1):
            state = RoundState(
                game_id="grid", map_name=map_name,
                round_number=ct_score + t_score + 1,
                ct_score=ct_score, t_score=t_score,
                ct_equip_start=equip, t_equip_start=equip,
                ct_money=money, t_money=money,
                ct_spend=spend, t_spend=spend,
                ct_buy=buy, t_buy=buy,
                ct_team="ct", t_team="t", match_date=match_date)
            p = model.predict_state(state).p_ct_win
            lines.append(f"{ct_score},{t_score},{p!r}")
    return "\n".join(lines) + "\n"


def round_trace_csv(model: WinProbModel, rounds: list[LabeledRound]) -> str:
    """Per-round outcome probabilities for one game, plot-ready."""
    if not rounds:
        raise DomainError("round_trace_csv needs at least one round")
    games = {lr.state.game_id for lr in rounds}
    if len(games) != 1:
        raise DomainError(f"expected a single game, got {sorted(games)}")
    lines = ["round_number,p_ct_win,p_t_win,p_draw"]
    for lr in sorted(rounds, key=lambda r: r.state.round_number):
        d = model.predict_state(lr.state)
        lines.append(
            f"{lr.state.round_number},{d.p_ct_win!r},{d.p_t_win!r},{d.p_draw!r}")
    return "\n".join(lines) + "\n"

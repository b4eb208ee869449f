"""Log-loss oracle checks, report identities, win-rate monotonicity."""

from __future__ import annotations

import datetime as dt
import math

import numpy as np
import pytest

from econoscope.domain import BuyType, DomainError, GameOutcome, OutcomeDistribution, Side
from econoscope.evaluation import (
    EvalReport,
    buy_winrate_report,
    evaluate_suite,
    log_loss,
    round_trace_csv,
    score_grid_csv,
    transfer_study,
    winrate_table_text,
)
from econoscope.ingest import derive_labels, load_rounds, split_by_date
from econoscope.models import (
    NeuralHyperparams,
    train_model,
)
from econoscope.simgen import SimConfig, generate_corpus

from conftest import make_labeled


def one_line_oracle(preds, labels):
    """Independent log-loss: clip, pick true-class prob, average."""
    pick = {GameOutcome.CT_WIN: 0, GameOutcome.T_WIN: 1, GameOutcome.DRAW: 2}
    return -sum(
        math.log(min(max(p.as_tuple()[pick[l]], 1e-15), 1 - 1e-15))
        for p, l in zip(preds, labels)) / len(preds)


UNIFORM = OutcomeDistribution(1 / 3, 1 / 3, 1 / 3)


class TestLogLoss:
    def test_uniform_predictor_is_ln3(self):
        labels = [GameOutcome.CT_WIN, GameOutcome.T_WIN, GameOutcome.DRAW] * 7
        assert abs(log_loss([UNIFORM] * 21, labels) - math.log(3)) < 1e-9

    def test_perfect_predictions_near_zero(self):
        preds = [OutcomeDistribution(1.0, 0.0, 0.0), OutcomeDistribution(0.0, 1.0, 0.0)]
        labels = [GameOutcome.CT_WIN, GameOutcome.T_WIN]
        assert log_loss(preds, labels) < 1e-12

    def test_confident_wrong_prediction_hits_clip(self):
        preds = [OutcomeDistribution(1.0, 0.0, 0.0)]
        labels = [GameOutcome.T_WIN]
        assert abs(log_loss(preds, labels) - (-math.log(1e-15))) < 1e-9

    def test_hand_case_matches_independent_oracle(self):
        preds = [
            OutcomeDistribution(0.5, 0.3, 0.2),
            OutcomeDistribution(0.1, 0.8, 0.1),
            OutcomeDistribution(0.25, 0.25, 0.5),
            OutcomeDistribution(0.9, 0.05, 0.05),
        ]
        labels = [GameOutcome.CT_WIN, GameOutcome.T_WIN,
                  GameOutcome.DRAW, GameOutcome.T_WIN]
        assert abs(log_loss(preds, labels) - one_line_oracle(preds, labels)) < 1e-12

    def test_class_frequency_beats_uniform(self):
        labels = [GameOutcome.CT_WIN] * 70 + [GameOutcome.T_WIN] * 20 + [GameOutcome.DRAW] * 10
        freq = OutcomeDistribution(0.7, 0.2, 0.1)
        assert 0.0 <= log_loss([freq] * 100, labels) <= log_loss([UNIFORM] * 100, labels)

    def test_length_mismatch_rejected(self):
        with pytest.raises(DomainError):
            log_loss([UNIFORM], [GameOutcome.CT_WIN, GameOutcome.T_WIN])


def synthetic_split(n_games=120, seed=0, **cfg):
    config = SimConfig(rng_seed=seed, policy_ct="random-feasible",
                       policy_t="random-feasible", **cfg)
    records = generate_corpus(n_games, config)
    import json
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "c.jsonl"
        path.write_text("".join(json.dumps(r) + "\n" for r in records))
        loaded = load_rounds(path)
    labeled = derive_labels(loaded.states, loaded.results)
    return split_by_date(labeled)


class TestEvaluateSuite:
    def test_report_shape_and_weighted_average_identity(self):
        split = synthetic_split()
        models = {
            "logistic": train_model("logistic", "no_map", list(split.train),
                                    list(split.validation)),
            "logistic_ohe": train_model("logistic", "ohe_map", list(split.train),
                                        list(split.validation)),
        }
        report = evaluate_suite(models, split)
        total = sum(r["n_rounds"] for r in report.rows)
        assert total == report.n_test_rounds
        recomputed = sum(r["logistic"] * r["n_rounds"] for r in report.rows) / total
        assert abs(report.weighted_average["logistic"] - recomputed) < 1e-9
        assert "logistic" in report.ohe_row
        assert "generated_at" in report.to_text()

    def test_empty_test_partition_rejected(self):
        split = synthetic_split()
        empty = type(split)(train=split.train, validation=split.validation,
                            test=(), train_end=split.train_end, val_end=split.val_end)
        with pytest.raises(DomainError):
            evaluate_suite({"logistic": object()}, empty)


class TestBuyWinrateReport:
    def test_single_cell_case(self):
        rounds = []
        for i in range(10):
            winner = Side.CT if i < 6 else Side.T
            rounds.append(make_labeled(
                round_winner=winner, ct_money=30_000, t_money=30_000,
                ct_spend=22_000, t_spend=22_000))
        table = buy_winrate_report(rounds)
        assert set(table[Side.CT]) == {BuyType.FULL_BUY}
        assert table[Side.CT][BuyType.FULL_BUY].rate == 0.6
        assert table[Side.T][BuyType.FULL_BUY].rate == 0.4
        assert "FullBuy" in winrate_table_text(table)

    def test_synthetic_monotonicity_low_tier(self):
        split = synthetic_split(n_games=600, seed=3,
                                equip_advantage_coeff=3e-4)
        rounds = list(split.train) + list(split.validation) + list(split.test)
        table = buy_winrate_report(rounds)
        for side in Side:
            cells = table[side]
            rates = [cells[b].rate
                     for b in (BuyType.ECO, BuyType.LOW_BUY, BuyType.HALF_BUY,
                               BuyType.FULL_BUY)
                     if b in cells and cells[b].rounds >= 200]
            assert len(rates) >= 3
            assert all(a < b for a, b in zip(rates, rates[1:]))


class TestTransferStudy:
    def test_identical_dynamics_show_no_map_effect(self):
        # all maps share one bias: nothing map-specific to learn
        split = synthetic_split(n_games=150, seed=5,
                                map_side_bias={})
        report = transfer_study(
            split,
            base_hp=NeuralHyperparams(hidden1=24, hidden2=12, dropout=0.1,
                                      learning_rate=1e-3),
            finetune_lr=1e-5, seed=1, max_epochs=40, patience=5)
        assert len(report.rows) >= 5
        for row in report.rows:
            assert abs(row["initial"] - row["fine_tuned"]) < 0.01
        text = report.to_text()
        assert "held-out map" in text and "fine-tuned" in text


class TestFigureExports:
    def test_score_grid_csv_shape(self):
        split = synthetic_split()
        model = train_model("logistic", "no_map", list(split.train),
                            list(split.validation))
        csv = score_grid_csv(model, "inferno", max_score=3)
        lines = csv.strip().splitlines()
        assert lines[0] == "ct_score,t_score,p_ct_win"
        assert len(lines) == 1 + 16

    def test_round_trace_requires_single_game(self):
        a = make_labeled(game_id="g1")
        b = make_labeled(game_id="g2")
        with pytest.raises(DomainError):
            round_trace_csv(None, [a, b])

    def test_round_trace_rows(self):
        split = synthetic_split()
        model = train_model("logistic", "no_map", list(split.train),
                            list(split.validation))
        game_id = split.test[0].state.game_id
        game_rounds = [lr for lr in split.test if lr.state.game_id == game_id]
        csv = round_trace_csv(model, game_rounds)
        assert len(csv.strip().splitlines()) == 1 + len(game_rounds)

"""Random search over the hyperparameter grids, and model persistence."""

from __future__ import annotations

import numpy as np
import pytest

from econoscope.domain import GameOutcome
from econoscope.models import (
    Dataset,
    GbtreeHyperparams,
    HyperparamSpace,
    ModelPersistenceError,
    NeuralHyperparams,
    PerMapModel,
    load_model,
    random_search,
    save_model,
    train_gbtree,
    train_logistic,
    train_neural,
)
from econoscope.models.io import FORMAT_VERSION

from conftest import make_labeled


def small_dataset(n=120, d=6, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = (X[:, 0] > 0).astype(np.int64)
    return Dataset(X, y, ("inferno",) * n, "per_map")


class TestHyperparamSpace:
    def test_gbtree_grid_matches_declared_ranges(self):
        space = HyperparamSpace()
        grid = space.grid("gbtree")
        assert len(grid) == 6 * 8 * 8 * 6
        assert {hp.learning_rate for hp in grid} == {0.05, 0.10, 0.15, 0.20, 0.25, 0.30}
        assert {hp.max_depth for hp in grid} == set(range(3, 11))
        assert {hp.min_child_weight for hp in grid} == set(range(1, 9))
        assert {hp.colsample_per_level for hp in grid} == {0.3, 0.4, 0.5, 0.6, 0.7, 0.8}

    def test_neural_grid_matches_declared_ranges(self):
        grid = HyperparamSpace().grid("neural")
        assert len(grid) == 8 * 8 * 6 * 3
        assert {hp.hidden1 for hp in grid} == set(range(16, 129, 16))
        assert {hp.dropout for hp in grid} == {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}
        assert {hp.learning_rate for hp in grid} == {1e-3, 1e-4, 1e-5}


class TestRandomSearch:
    def test_single_trial_returns_that_point(self):
        ds = small_dataset()
        result = random_search("gbtree", HyperparamSpace(), 1, ds, ds,
                               seed=3, max_rounds=5)
        assert len(result.trials) == 1
        assert result.best_trial == 0
        assert result.best_hyperparams is not None

    def test_repeated_point_tie_breaks_to_first_trial(self):
        ds = small_dataset()
        space = HyperparamSpace(
            gbtree_learning_rate=(0.3,),
            gbtree_max_depth=(2,),
            gbtree_min_child_weight=(1,),
            gbtree_colsample_per_level=(1.0,),  # rng-free: identical losses
        )
        result = random_search("gbtree", space, 3, ds, ds, seed=0, max_rounds=5)
        losses = [t.val_loss for t in result.trials]
        assert losses[0] == losses[1] == losses[2]
        assert result.best_trial == 0

    def test_best_not_worse_than_median(self):
        ds = small_dataset(n=200)
        result = random_search("gbtree", HyperparamSpace(), 5, ds, ds,
                               seed=1, max_rounds=10)
        losses = sorted(t.val_loss for t in result.trials)
        assert result.best_val_loss <= losses[len(losses) // 2]

    def test_draws_lie_on_grid(self):
        from dataclasses import asdict

        ds = small_dataset()
        space = HyperparamSpace()
        result = random_search("neural", space, 4, ds, ds, seed=2, max_epochs=2)
        grid = {tuple(sorted(asdict(hp).items())) for hp in space.grid("neural")}
        for trial in result.trials:
            assert tuple(sorted(trial.hyperparams.items())) in grid


def _example_rounds():
    out = []
    for map_name in ("inferno", "nuke"):
        for i, outcome in enumerate(
                (GameOutcome.CT_WIN, GameOutcome.T_WIN, GameOutcome.DRAW)):
            out.append(make_labeled(
                outcome, map_name=map_name, ct_score=i, t_score=0,
                ct_money=4_000 + 2_000 * i, ct_spend=1_500 * i))
    return out


class TestPersistence:
    def _assert_round_trip(self, model, tmp_path, X):
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        np.testing.assert_array_equal(
            model.predict_matrix(X), loaded.predict_matrix(X))
        assert loaded.model_id == model.model_id
        assert loaded.mode == model.mode

    def test_logistic_round_trip(self, tmp_path):
        ds = small_dataset(d=19)
        model = train_logistic(ds, feature_subset="full")
        X = np.random.default_rng(1).normal(size=(100, 19))
        self._assert_round_trip(model, tmp_path, X)

    def test_neural_round_trip(self, tmp_path):
        ds = small_dataset()
        hp = NeuralHyperparams(hidden1=16, hidden2=16, dropout=0.2, learning_rate=1e-3)
        model = train_neural(ds, ds, hp, max_epochs=5)
        X = np.random.default_rng(2).normal(size=(100, 6))
        self._assert_round_trip(model, tmp_path, X)

    def test_gbtree_round_trip(self, tmp_path):
        ds = small_dataset()
        model = train_gbtree(ds, ds, GbtreeHyperparams(max_depth=4), max_rounds=8)
        X = np.random.default_rng(3).normal(size=(100, 6))
        self._assert_round_trip(model, tmp_path, X)

    def test_per_map_round_trip(self, tmp_path):
        rounds = _example_rounds() * 10
        from econoscope.models import train_model

        model = train_model("logistic", "per_map", rounds, rounds)
        path = tmp_path / "permap.json"
        save_model(model, path)
        loaded = load_model(path)
        assert isinstance(loaded, PerMapModel)
        assert set(loaded.submodels) == set(model.submodels)
        for lr in rounds:
            assert loaded.predict_state(lr.state) == model.predict_state(lr.state)

    def test_truncated_file_is_corruption_error(self, tmp_path):
        ds = small_dataset()
        model = train_logistic(ds, feature_subset="full")
        path = tmp_path / "model.json"
        save_model(model, path)
        path.write_text(path.read_text()[: path.stat().st_size // 2])
        with pytest.raises(ModelPersistenceError, match="corrupt"):
            load_model(path)

    def test_future_version_names_both_versions(self, tmp_path):
        ds = small_dataset()
        model = train_logistic(ds, feature_subset="full")
        path = tmp_path / "model.json"
        save_model(model, path)
        import json

        doc = json.loads(path.read_text())
        doc["format_version"] = 99
        path.write_text(json.dumps(doc))
        with pytest.raises(ModelPersistenceError) as exc_info:
            load_model(path)
        assert "99" in str(exc_info.value)
        assert str(FORMAT_VERSION) in str(exc_info.value)

    def test_not_json_at_all(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_bytes(b"\x00\x01\x02 garbage")
        with pytest.raises(ModelPersistenceError):
            load_model(path)

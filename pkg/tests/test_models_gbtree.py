"""Boosted-tree family: capacity, determinism, early stopping, monotone
training loss, structural checks against a tiny hand-built case."""

from __future__ import annotations

import numpy as np
import pytest

from econoscope.models import (
    Dataset,
    GbtreeHyperparams,
    ModelError,
    multiclass_log_loss,
    train_gbtree,
)


def random_dataset(n=200, d=8, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = rng.integers(0, 3, size=n)
    return Dataset(X, y, ("inferno",) * n, "per_map")


class TestCapacity:
    def test_memorizes_random_labels(self):
        ds = random_dataset()
        hp = GbtreeHyperparams(learning_rate=0.3, max_depth=6)
        model = train_gbtree(ds, None, hp, max_rounds=200)
        loss = multiclass_log_loss(model.predict_matrix(ds.X), ds.y)
        assert loss < 0.05

    def test_single_split_problem(self):
        rng = np.random.default_rng(4)
        n = 300
        X = np.zeros((n, 3))
        X[:, 1] = rng.integers(0, 2, size=n)
        y = X[:, 1].astype(np.int64)  # class equals the binary feature
        ds = Dataset(X, y, ("nuke",) * n, "per_map")
        hp = GbtreeHyperparams(learning_rate=0.3, max_depth=1, colsample_per_level=1.0)
        model = train_gbtree(ds, ds, hp, max_rounds=200)
        loss = multiclass_log_loss(model.predict_matrix(ds.X), ds.y)
        assert loss < 0.01


class TestDeterminism:
    def test_same_seed_identical_ensemble(self):
        ds = random_dataset(n=150)
        hp = GbtreeHyperparams(max_depth=4, colsample_per_level=0.5)
        m1 = train_gbtree(ds, ds, hp, seed=9, max_rounds=20)
        m2 = train_gbtree(ds, ds, hp, seed=9, max_rounds=20)
        assert m1.n_rounds == m2.n_rounds
        for r1, r2 in zip(m1.rounds, m2.rounds):
            for t1, t2 in zip(r1, r2):
                np.testing.assert_array_equal(t1.feature, t2.feature)
                np.testing.assert_array_equal(t1.threshold, t2.threshold)
                np.testing.assert_array_equal(t1.value, t2.value)
        np.testing.assert_array_equal(m1.predict_matrix(ds.X), m2.predict_matrix(ds.X))


class TestTrainingBehaviour:
    def test_monotone_training_loss_without_colsample(self):
        ds = random_dataset(n=400, d=6, seed=2)
        hp = GbtreeHyperparams(learning_rate=0.3, max_depth=3, colsample_per_level=1.0)
        model = train_gbtree(ds, None, hp, max_rounds=60)
        curve = model.metadata["train_curve"]
        assert all(b <= a + 1e-12 for a, b in zip(curve, curve[1:]))

    def test_early_stopping_returns_best_iteration(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(400, 5))
        beta = rng.normal(size=5)
        y = (X @ beta + 0.8 * rng.normal(size=400) > 0).astype(np.int64)
        train = Dataset(X[:250], y[:250], ("inferno",) * 250, "per_map")
        val = Dataset(X[250:], y[250:], ("inferno",) * 150, "per_map")
        hp = GbtreeHyperparams(learning_rate=0.3, max_depth=6)
        model = train_gbtree(train, val, hp, max_rounds=400)
        curve = model.metadata["val_curve"]
        assert model.n_rounds < 400  # stopped
        assert model.metadata["best_val_loss"] == min(curve)
        assert model.n_rounds == int(np.argmin(curve)) + 1

    def test_min_child_weight_blocks_small_leaves(self):
        ds = random_dataset(n=30, seed=5)
        strict = train_gbtree(ds, None,
                              GbtreeHyperparams(max_depth=6, min_child_weight=8.0),
                              max_rounds=1)
        loose = train_gbtree(ds, None,
                             GbtreeHyperparams(max_depth=6, min_child_weight=0.0),
                             max_rounds=1)
        def n_nodes(model):
            return sum(t.feature.size for rt in model.rounds for t in rt)
        assert n_nodes(strict) < n_nodes(loose)

    def test_predictions_are_distributions(self):
        ds = random_dataset(n=120)
        model = train_gbtree(ds, ds, GbtreeHyperparams(max_depth=3), max_rounds=10)
        proba = model.predict_matrix(ds.X)
        assert np.all((proba >= 0) & (proba <= 1))
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-9)

    def test_empty_train_rejected(self):
        empty = Dataset(np.empty((0, 4)), np.empty(0, dtype=np.int64), (), "per_map")
        with pytest.raises(ModelError):
            train_gbtree(empty, None, GbtreeHyperparams())


class TestSplitCorrectness:
    def test_recovers_known_threshold(self):
        # one feature, clean step at 0.5: first tree must split there
        X = np.linspace(0, 1, 100).reshape(-1, 1)
        y = (X[:, 0] >= 0.505).astype(np.int64)
        ds = Dataset(X, y, ("inferno",) * 100, "per_map")
        model = train_gbtree(ds, None, GbtreeHyperparams(max_depth=1), max_rounds=1)
        root_threshold = model.rounds[0][0].threshold[0]
        assert 0.49 < root_threshold < 0.52

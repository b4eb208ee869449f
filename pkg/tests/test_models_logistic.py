"""Logistic baseline: finite-difference gradient oracle, separable fit,
uninformative-feature behaviour."""

from __future__ import annotations

import numpy as np
import pytest

from econoscope.models import Dataset, ModelError, train_logistic
from econoscope.models.logistic import objective_and_grads


def finite_difference_grads(W, b, X, Y, l2, h=1e-5):
    """Central differences of the penalized objective, parameter by parameter."""
    def loss_at(Wp, bp):
        return objective_and_grads(Wp, bp, X, Y, l2)[0]

    gW = np.zeros_like(W)
    for i in range(W.shape[0]):
        for j in range(W.shape[1]):
            Wp, Wm = W.copy(), W.copy()
            Wp[i, j] += h
            Wm[i, j] -= h
            gW[i, j] = (loss_at(Wp, b) - loss_at(Wm, b)) / (2 * h)
    gb = np.zeros_like(b)
    for j in range(b.shape[0]):
        bp, bm = b.copy(), b.copy()
        bp[j] += h
        bm[j] -= h
        gb[j] = (loss_at(W, bp) - loss_at(W, bm)) / (2 * h)
    return gW, gb


def rel_error(a, f):
    return np.max(np.abs(a - f) / np.maximum(np.abs(a) + np.abs(f), 1e-8))


def make_dataset(n=60, d=5, seed=0, schema="per_map"):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = rng.integers(0, 3, size=n)
    return Dataset(X, y, ("inferno",) * n, schema)


class TestGradients:
    def test_analytic_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        X = rng.normal(size=(40, 4))
        Y = np.eye(3)[rng.integers(0, 3, size=40)]
        worst = 0.0
        for _ in range(20):
            W = rng.normal(scale=0.8, size=(4, 3))
            b = rng.normal(scale=0.5, size=3)
            _, gW, gb = objective_and_grads(W, b, X, Y, 1e-4)
            fW, fb = finite_difference_grads(W, b, X, Y, 1e-4)
            worst = max(worst, rel_error(gW, fW), rel_error(gb, fb))
        assert worst < 1e-4


class TestTraining:
    def test_separable_by_score_diff_reaches_full_accuracy(self):
        rng = np.random.default_rng(1)
        n = 200
        diff = rng.integers(-10, 11, size=n)
        diff[diff == 0] = 1
        X = np.zeros((n, 19))
        X[:, 0] = np.maximum(diff, 0)
        X[:, 1] = np.maximum(-diff, 0)
        X[:, 2] = diff
        y = (diff < 0).astype(np.int64)  # CT win iff diff > 0
        ds = Dataset(X, y, ("inferno",) * n, "per_map")
        model = train_logistic(ds, feature_subset="scores_only")
        assert model.metadata["train_accuracy"] == 1.0

    def test_uninformative_features_give_uniform_prediction(self):
        n = 99
        X = np.zeros((n, 19))
        y = np.repeat([0, 1, 2], n // 3)
        ds = Dataset(X, y, ("inferno",) * n, "per_map")
        model = train_logistic(ds, feature_subset="scores_only")
        proba = model.predict_matrix(np.zeros((5, 19)))
        np.testing.assert_allclose(proba, 1.0 / 3.0, atol=1e-3)

    def test_single_class_rejected(self):
        ds = make_dataset()
        mono = Dataset(ds.X, np.zeros_like(ds.y), ds.maps, ds.schema)
        with pytest.raises(ModelError):
            train_logistic(mono)

    def test_full_feature_subset_uses_all_columns(self):
        ds = make_dataset(d=19)
        model = train_logistic(ds, feature_subset="full")
        assert model.W.shape[0] == 19

    def test_predictions_are_valid_distributions(self):
        ds = make_dataset(d=19, n=120)
        model = train_logistic(ds, feature_subset="full")
        proba = model.predict_matrix(ds.X)
        assert np.all(proba >= 0) and np.all(proba <= 1)
        np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-9)

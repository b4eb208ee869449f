"""Seeded random search over the declared hyperparameter grids.

Points are drawn uniformly without replacement while the grid lasts; the
winner is the lowest validation log-loss, ties broken by earlier trial.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np

from .base import Dataset, ModelError
from .gbtree import GbtreeHyperparams, train_gbtree
from .neural import NeuralHyperparams, train_neural


def _decimals(lo: float, hi: float, step: float, ndigits: int) -> tuple[float, ...]:
    count = int(round((hi - lo) / step)) + 1
    return tuple(round(lo + i * step, ndigits) for i in range(count))


@dataclass(frozen=True)
class HyperparamSpace:
    """Grid axes for both tunable families."""

    gbtree_learning_rate: tuple[float, ...] = _decimals(0.05, 0.30, 0.05, 2)
    gbtree_max_depth: tuple[int, ...] = tuple(range(3, 11))
    gbtree_min_child_weight: tuple[int, ...] = tuple(range(1, 9))
    gbtree_colsample_per_level: tuple[float, ...] = _decimals(0.3, 0.8, 0.1, 1)
    neural_hidden1: tuple[int, ...] = tuple(range(16, 129, 16))
    neural_hidden2: tuple[int, ...] = tuple(range(16, 129, 16))
    neural_dropout: tuple[float, ...] = _decimals(0.1, 0.6, 0.1, 1)
    neural_learning_rate: tuple[float, ...] = (1e-3, 1e-4, 1e-5)

    def grid(self, family: str) -> list:
        if family == "gbtree":
            return [
                GbtreeHyperparams(lr, depth, mcw, cs)
                for lr, depth, mcw, cs in itertools.product(
                    self.gbtree_learning_rate,
                    self.gbtree_max_depth,
                    self.gbtree_min_child_weight,
                    self.gbtree_colsample_per_level,
                )
            ]
        if family == "neural":
            return [
                NeuralHyperparams(h1, h2, p, lr)
                for h1, h2, p, lr in itertools.product(
                    self.neural_hidden1,
                    self.neural_hidden2,
                    self.neural_dropout,
                    self.neural_learning_rate,
                )
            ]
        raise ModelError(f"random search supports gbtree/neural, not {family!r}")


@dataclass
class TrialRecord:
    trial: int
    hyperparams: dict
    val_loss: float


@dataclass
class SearchResult:
    best_hyperparams: object
    best_val_loss: float
    best_trial: int
    trials: list[TrialRecord] = field(default_factory=list)


def random_search(
    family: str,
    space: HyperparamSpace,
    n_trials: int,
    train: Dataset,
    val: Dataset,
    seed: int = 0,
    **trainer_kwargs,
) -> SearchResult:
    """Train ``n_trials`` sampled configurations, return the argmin."""
    if n_trials < 1:
        raise ModelError("n_trials must be >= 1")
    grid = space.grid(family)
    rng = np.random.default_rng(seed)
    picks: list[int] = []
    while len(picks) < n_trials:
        chunk = rng.permutation(len(grid))[: n_trials - len(picks)]
        picks.extend(int(i) for i in chunk)
    trial_seeds = [int(s.generate_state(1)[0])
                   for s in np.random.SeedSequence(seed).spawn(n_trials)]

    trainer = train_gbtree if family == "gbtree" else train_neural
    result = SearchResult(None, np.inf, -1)
    for trial, grid_idx in enumerate(picks):
        hp = grid[grid_idx]
        model = trainer(train, val, hp, seed=trial_seeds[trial], **trainer_kwargs)
        val_loss = float(model.metadata["best_val_loss"])
        result.trials.append(TrialRecord(trial, asdict(hp), val_loss))
        if val_loss < result.best_val_loss:  # strict: earlier trial wins ties
            result.best_val_loss = val_loss
            result.best_hyperparams = hp
            result.best_trial = trial
    return result

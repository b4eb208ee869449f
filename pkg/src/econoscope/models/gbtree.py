"""Gradient-boosted regression trees with a softmax objective.

One tree per outcome class per boosting round, fit to the class-wise
gradients/hessians of cross-entropy. Split search is exact greedy over
sorted feature values, vectorized level-wise: the dataset is presorted per
feature once, and at each level a stable radix sort by node id yields every
node's instances in value order in O(n). Leaf values are -G/(H + lambda)
shrunk by the learning rate; a split is only taken when both children
carry at least min_child_weight of hessian and the gain is positive.
Boosting stops early on validation log-loss and returns the best-iteration
ensemble.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .base import (
    Dataset,
    ModelError,
    N_CLASSES,
    WinProbModel,
    model_id_from_params,
    multiclass_log_loss,
    one_hot,
    softmax,
)

LAMBDA = 1.0
MAX_ROUNDS = 1_000
PATIENCE = 10

# Columns with at most this many distinct values take an exact histogram
# path (one-hots, scores); denser columns are scanned in sorted order.
MAX_CODED_VALUES = 64


class _Columns:
    """Per-feature access plans, built once per training set."""

    def __init__(self, X: np.ndarray):
        self.X = X
        self.plans: list[tuple] = []
        for j in range(X.shape[1]):
            values, codes = np.unique(X[:, j], return_inverse=True)
            if values.size <= MAX_CODED_VALUES:
                self.plans.append(("coded", values, codes.astype(np.int64)))
            else:
                order = np.argsort(X[:, j], kind="stable").astype(np.int32)
                self.plans.append(("sorted", order, None))


@dataclass(frozen=True)
class GbtreeHyperparams:
    learning_rate: float = 0.3
    max_depth: int = 6
    min_child_weight: float = 1.0
    colsample_per_level: float = 1.0


@dataclass
class Tree:
    """Flat array representation; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int32)
        rows = np.arange(X.shape[0])
        while True:
            feats = self.feature[node]
            active = feats >= 0
            if not active.any():
                return self.value[node]
            sub = node[active]
            go_left = X[rows[active], feats[active]] < self.threshold[sub]
            node[active] = np.where(go_left, self.left[sub], self.right[sub])


def _gain(GL, HL, GR, HR, GT, HT):
    return 0.5 * (GL * GL / (HL + LAMBDA) + GR * GR / (HR + LAMBDA)
                  - GT * GT / (HT + LAMBDA))


def _best_split_coded(values, codes, live_rows, loc_live, g_live, h_live,
                      Gtot, Htot, K, hp, f, best_gain, best_feat, best_thr):
    """Exact greedy over a low-cardinality column via per-node histograms."""
    k = values.size
    if k < 2:
        return
    comb = loc_live * k + codes[live_rows]
    sums_g = np.bincount(comb, weights=g_live, minlength=K * k).reshape(K, k)
    sums_h = np.bincount(comb, weights=h_live, minlength=K * k).reshape(K, k)
    counts = np.bincount(comb, minlength=K * k).reshape(K, k)
    GL = np.cumsum(sums_g, axis=1)[:, :-1]
    HL = np.cumsum(sums_h, axis=1)[:, :-1]
    CL = np.cumsum(counts, axis=1)[:, :-1]
    total = counts.sum(axis=1, keepdims=True)
    GR = Gtot[:, None] - GL
    HR = Htot[:, None] - HL
    valid = ((CL > 0) & (CL < total)
             & (HL >= hp.min_child_weight) & (HR >= hp.min_child_weight))
    gain = _gain(GL, HL, GR, HR, Gtot[:, None], Htot[:, None])
    gain[~valid] = -np.inf
    mids = 0.5 * (values[:-1] + values[1:])
    j_best = np.argmax(gain, axis=1)
    g_best = gain[np.arange(K), j_best]
    improved = g_best > best_gain
    best_gain[improved] = g_best[improved]
    best_feat[improved] = f
    best_thr[improved] = mids[j_best[improved]]


def _best_split_sorted(X, order, loc, g, h, Gtot, Htot, K, hp, f,
                       best_gain, best_feat, best_thr):
    """Exact greedy over a dense column, all nodes at once: stable radix
    sort by node id keeps each node's rows in feature-value order."""
    keys = loc[order]
    m = keys >= 0
    pos = order[m]
    keys = keys[m]
    perm = np.argsort(keys, kind="stable")  # radix: O(n)
    gi = pos[perm]
    kk = keys[perm]
    xv = X[gi, f]
    gv = g[gi]
    hv = h[gi]
    counts = np.bincount(kk, minlength=K)
    offs = np.concatenate(([0], np.cumsum(counts)))
    cg = np.cumsum(gv)
    ch = np.cumsum(hv)
    seg_start = np.repeat(offs[:-1], counts)
    GL = cg - (cg[seg_start] - gv[seg_start])
    HL = ch - (ch[seg_start] - hv[seg_start])
    GT = Gtot[kk]
    HT = Htot[kk]
    GR = GT - GL
    HR = HT - HL
    boundary = np.ones(kk.shape[0], dtype=bool)
    boundary[offs[1:] - 1] = False  # last row of each segment
    nxt = np.empty_like(xv)
    nxt[:-1] = xv[1:]
    nxt[-1] = xv[-1]
    valid = (boundary & (xv < nxt)
             & (HL >= hp.min_child_weight) & (HR >= hp.min_child_weight))
    gain = _gain(GL, HL, GR, HR, GT, HT)
    gain[~valid] = -np.inf
    for k in range(K):
        lo, hi = offs[k], offs[k + 1]
        if lo == hi:
            continue
        i = lo + int(np.argmax(gain[lo:hi]))
        if gain[i] > best_gain[k]:
            best_gain[k] = gain[i]
            best_feat[k] = f
            best_thr[k] = 0.5 * (xv[i] + nxt[i])


def _build_tree(
    columns: _Columns,
    g: np.ndarray,
    h: np.ndarray,
    hp: GbtreeHyperparams,
    rng: np.random.Generator,
) -> tuple[Tree, np.ndarray]:
    """Grow one tree; returns it plus each train row's (shrunk) leaf value."""
    X = columns.X
    n, d = X.shape
    node = np.zeros(n, dtype=np.int64)
    feats = [-1]
    thrs = [np.nan]
    lefts = [-1]
    rights = [-1]
    vals = [0.0]
    frontier = [0]

    for depth in range(hp.max_depth + 1):
        if not frontier:
            break
        K = len(frontier)
        lookup = np.full(len(feats), -1, dtype=np.int64)
        lookup[frontier] = np.arange(K)
        loc = lookup[node]
        live = loc >= 0
        live_rows = np.flatnonzero(live)
        loc_live = loc[live_rows]
        g_live = g[live_rows]
        h_live = h[live_rows]
        Gtot = np.bincount(loc_live, weights=g_live, minlength=K)
        Htot = np.bincount(loc_live, weights=h_live, minlength=K)

        best_gain = np.zeros(K)
        best_feat = np.full(K, -1, dtype=np.int64)
        best_thr = np.full(K, np.nan)

        if depth < hp.max_depth:
            if hp.colsample_per_level >= 1.0:
                cols = range(d)
            else:
                k_cols = max(1, int(round(hp.colsample_per_level * d)))
                cols = np.sort(rng.choice(d, size=k_cols, replace=False))
            for f in cols:
                plan = columns.plans[f]
                if plan[0] == "coded":
                    _best_split_coded(plan[1], plan[2], live_rows, loc_live,
                                      g_live, h_live, Gtot, Htot, K, hp, f,
                                      best_gain, best_feat, best_thr)
                else:
                    _best_split_sorted(X, plan[1], loc, g, h, Gtot, Htot, K,
                                       hp, f, best_gain, best_feat, best_thr)

        new_frontier: list[int] = []
        split_feat = np.full(K, -1, dtype=np.int64)
        split_thr = np.empty(K)
        split_left = np.empty(K, dtype=np.int64)
        split_right = np.empty(K, dtype=np.int64)
        for k, nid in enumerate(frontier):
            if best_feat[k] >= 0 and best_gain[k] > 0.0:
                left_id = len(feats)
                right_id = left_id + 1
                feats[nid] = int(best_feat[k])
                thrs[nid] = float(best_thr[k])
                lefts[nid] = left_id
                rights[nid] = right_id
                for _ in range(2):
                    feats.append(-1)
                    thrs.append(np.nan)
                    lefts.append(-1)
                    rights.append(-1)
                    vals.append(0.0)
                split_feat[k] = best_feat[k]
                split_thr[k] = best_thr[k]
                split_left[k] = left_id
                split_right[k] = right_id
                new_frontier.extend((left_id, right_id))
            else:
                vals[nid] = float(
                    -hp.learning_rate * Gtot[k] / (Htot[k] + LAMBDA))

        moving = live & (split_feat[np.maximum(loc, 0)] >= 0)
        if moving.any():
            ml = loc[moving]
            xi = X[np.flatnonzero(moving), split_feat[ml]]
            node[moving] = np.where(xi < split_thr[ml],
                                    split_left[ml], split_right[ml])
        frontier = new_frontier

    tree = Tree(
        feature=np.asarray(feats, dtype=np.int32),
        threshold=np.asarray(thrs, dtype=np.float64),
        left=np.asarray(lefts, dtype=np.int32),
        right=np.asarray(rights, dtype=np.int32),
        value=np.asarray(vals, dtype=np.float64),
    )
    return tree, tree.value[node]


class GbtreeModel(WinProbModel):
    family = "gbtree"

    def __init__(self, rounds: list[tuple[Tree, ...]], hp: GbtreeHyperparams,
                 mode: str, metadata: dict):
        self.rounds = rounds
        self.hp = hp
        self.mode = mode
        self.metadata = metadata

    def predict_raw(self, X: np.ndarray) -> np.ndarray:
        F = np.zeros((X.shape[0], N_CLASSES))
        for round_trees in self.rounds:
            for c, tree in enumerate(round_trees):
                F[:, c] += tree.predict(X)
        return F

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.predict_raw(X))

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)


def train_gbtree(
    train: Dataset,
    val: Dataset | None,
    hp: GbtreeHyperparams,
    mode: str = "no_map",
    seed: int = 0,
    max_rounds: int = MAX_ROUNDS,
    patience: int = PATIENCE,
) -> GbtreeModel:
    """Boost until the validation loss stalls (or max_rounds without val)."""
    if len(train) == 0:
        raise ModelError("training set must be non-empty")
    if val is not None and len(val) == 0:
        raise ModelError("validation set must be non-empty when given")
    X, y = train.X, train.y
    Y = one_hot(y)
    rng = np.random.default_rng(seed)
    columns = _Columns(X)
    F = np.zeros((X.shape[0], N_CLASSES))
    F_val = np.zeros((len(val), N_CLASSES)) if val is not None else None

    rounds: list[tuple[Tree, ...]] = []
    train_curve: list[float] = []
    val_curve: list[float] = []
    best_val = np.inf
    best_round = -1

    for r in range(max_rounds):
        P = softmax(F)
        round_trees = []
        for c in range(N_CLASSES):
            g = P[:, c] - Y[:, c]
            h = P[:, c] * (1.0 - P[:, c])
            tree, leaf_values = _build_tree(columns, g, h, hp, rng)
            F[:, c] += leaf_values
            round_trees.append(tree)
        rounds.append(tuple(round_trees))
        train_curve.append(multiclass_log_loss(softmax(F), y))

        if val is not None:
            for c, tree in enumerate(round_trees):
                F_val[:, c] += tree.predict(val.X)
            val_loss = multiclass_log_loss(softmax(F_val), val.y)
            val_curve.append(val_loss)
            if val_loss < best_val:
                best_val = val_loss
                best_round = r
            elif r - best_round >= patience:
                break

    if val is not None:
        rounds = rounds[:best_round + 1]
        train_curve = train_curve[:best_round + 1]
    metadata = {
        "hyperparams": asdict(hp),
        "n_rounds": len(rounds),
        "best_val_loss": best_val if val is not None else None,
        "train_curve": train_curve,
        "val_curve": val_curve,
        "data_hash": train.data_hash(),
        "final_train_log_loss": train_curve[-1] if train_curve else None,
    }
    model = GbtreeModel(rounds, hp, mode, metadata)
    metadata["model_id"] = model_id_from_params(
        "gbtree", mode,
        b"".join(t.value.tobytes() for rt in rounds for t in rt))
    return model

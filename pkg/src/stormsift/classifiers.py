"""From-scratch binary classifiers for the user credibility model:
logistic regression, random forest, and gradient-boosted trees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def _sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _check_two_classes(y: np.ndarray) -> None:
    if len(np.unique(y)) < 2:
        raise ValueError("training data must contain both classes")


def _class_weights(y: np.ndarray) -> np.ndarray:
    """Balanced per-sample weights: n / (2 * n_class)."""
    n = len(y)
    n1 = int(y.sum())
    n0 = n - n1
    w = np.where(y == 1, n / (2.0 * n1), n / (2.0 * n0))
    return w


@dataclass
class LogisticRegressionModel:
    """L2-regularized logistic regression fit by gradient descent on
    class-weighted log-loss. Features are standardized internally."""

    weights: np.ndarray | None = None
    bias: float = 0.0
    mean: np.ndarray | None = None
    scale: np.ndarray | None = None
    l2: float = 1e-4
    learning_rate: float = 0.5
    max_iter: int = 2000
    tol: float = 1e-6

    def fit(self, X, y, seed: int = 0) -> "LogisticRegressionModel":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        _check_two_classes(y)
        self.mean = X.mean(axis=0)
        self.scale = X.std(axis=0)
        self.scale[self.scale == 0] = 1.0
        Xs = (X - self.mean) / self.scale
        n, f = Xs.shape
        w = np.zeros(f)
        b = 0.0
        sw = _class_weights(y)
        sw = sw / sw.sum()
        for _ in range(self.max_iter):
            p = _sigmoid(Xs @ w + b)
            err = (p - y) * sw
            grad_w = Xs.T @ err + self.l2 * w
            grad_b = err.sum()
            w_new = w - self.learning_rate * grad_w
            b_new = b - self.learning_rate * grad_b
            delta = max(np.abs(w_new - w).max(initial=0.0), abs(b_new - b))
            w, b = w_new, b_new
            if delta < self.tol:
                break
        self.weights = w
        self.bias = b
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        Xs = (X - self.mean) / self.scale
        return _sigmoid(Xs @ self.weights + self.bias)


@dataclass
class _TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: "_TreeNode | None" = None
    right: "_TreeNode | None" = None
    value: float = 0.0  # leaf payload: class-1 fraction (clf) or residual step (reg)

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return 1.0 - float((p**2).sum())


class DecisionTree:
    """CART tree. Gini splits in classification mode, squared error in
    regression mode. Zero-gain splits on impure nodes are allowed (needed
    for parity problems like XOR)."""

    def __init__(
        self,
        max_depth: int = 10,
        min_samples_split: int = 2,
        max_leaf_nodes: int | None = None,
        max_features: int | None = None,
        mode: str = "classification",
    ):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_leaf_nodes = max_leaf_nodes
        self.max_features = max_features
        self.mode = mode
        self.root: _TreeNode | None = None
        self.n_features = 0
        # impurity decrease (weighted by node fraction) accumulated per feature
        self.feature_importance: np.ndarray | None = None

    def fit(self, X, y, sample_weight=None, rng: np.random.Generator | None = None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if sample_weight is None:
            sample_weight = np.ones(len(y))
        self.n_features = X.shape[1]
        self.feature_importance = np.zeros(self.n_features)
        self._n_leaves = 1
        self._rng = rng or np.random.default_rng(0)
        self.root = self._build(X, y, np.asarray(sample_weight, dtype=float), depth=0,
                                total_weight=float(np.sum(sample_weight)))
        return self

    def _leaf(self, y, w) -> _TreeNode:
        if self.mode == "classification":
            tot = w.sum()
            value = float((w * y).sum() / tot) if tot > 0 else 0.5
        else:
            value = float(np.average(y, weights=w)) if w.sum() > 0 else 0.0
        return _TreeNode(value=value)

    def _impurity(self, y, w) -> float:
        tot = w.sum()
        if tot == 0:
            return 0.0
        if self.mode == "classification":
            p1 = (w * y).sum() / tot
            return 2 * p1 * (1 - p1)
        mu = (w * y).sum() / tot
        return float((w * (y - mu) ** 2).sum() / tot)

    def _build(self, X, y, w, depth, total_weight) -> _TreeNode:
        node_imp = self._impurity(y, w)
        if (
            depth >= self.max_depth
            or len(y) < self.min_samples_split
            or node_imp == 0.0
            or (self.max_leaf_nodes is not None and self._n_leaves >= self.max_leaf_nodes)
        ):
            return self._leaf(y, w)
        feat_idx = np.arange(X.shape[1])
        if self.max_features is not None and self.max_features < len(feat_idx):
            feat_idx = np.sort(self._rng.choice(feat_idx, size=self.max_features, replace=False))
        best = None  # (impurity_after, feature, threshold)
        for f in feat_idx:
            found = self._best_split_on_feature(X[:, f], y, w)
            if found is None:
                continue
            imp, th = found
            if best is None or imp < best[0] - 1e-15:
                best = (imp, int(f), th)
        if best is None or best[0] > node_imp + 1e-12:
            return self._leaf(y, w)
        imp_after, f, th = best
        mask = X[:, f] <= th
        self.feature_importance[f] += (w.sum() / total_weight) * (node_imp - imp_after)
        self._n_leaves += 1
        node = _TreeNode(feature=f, threshold=th)
        node.left = self._build(X[mask], y[mask], w[mask], depth + 1, total_weight)
        node.right = self._build(X[~mask], y[~mask], w[~mask], depth + 1, total_weight)
        return node

    def _best_split_on_feature(self, x, y, w):
        """Weighted impurity after the best threshold on one feature,
        computed with sorted cumulative sums (O(n log n))."""
        order = np.argsort(x, kind="stable")
        xs, ys, ws = x[order], y[order], w[order]
        # candidate boundaries: positions where the value changes
        change = np.flatnonzero(xs[1:] != xs[:-1])
        if len(change) == 0:
            return None
        cw = np.cumsum(ws)
        cwy = np.cumsum(ws * ys)
        total_w = cw[-1]
        total_wy = cwy[-1]
        wl = cw[change]
        wr = total_w - wl
        if self.mode == "classification":
            p1l = cwy[change] / wl
            p1r = (total_wy - cwy[change]) / wr
            imp = (wl * 2 * p1l * (1 - p1l) + wr * 2 * p1r * (1 - p1r)) / total_w
        else:
            cwy2 = np.cumsum(ws * ys * ys)
            total_wy2 = cwy2[-1]
            sl = cwy2[change] - cwy[change] ** 2 / wl
            sr = (total_wy2 - cwy2[change]) - (total_wy - cwy[change]) ** 2 / wr
            imp = (sl + sr) / total_w
        best = int(np.argmin(imp))
        i = change[best]
        threshold = (xs[i] + xs[i + 1]) / 2
        return float(imp[best]), float(threshold)

    def predict_value(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X))
        for i, row in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.value
        return out


class RandomForestModel:
    """Bagged Gini trees with sqrt-feature subsampling per split and
    balanced bootstrap resampling. predict_proba is the vote fraction."""

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: int = 10,
        min_samples_split: int = 2,
        max_leaf_nodes: int | None = None,
        seed: int = 0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_leaf_nodes = max_leaf_nodes
        self.seed = seed
        self.trees: list[DecisionTree] = []

    def fit(self, X, y, seed: int | None = None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        _check_two_classes(y)
        rng = np.random.default_rng(self.seed if seed is None else seed)
        n, f = X.shape
        max_features = max(1, int(math.sqrt(f)))
        idx0 = np.flatnonzero(y == 0)
        idx1 = np.flatnonzero(y == 1)
        per_class = max(len(idx0), len(idx1))
        self.trees = []
        for _ in range(self.n_trees):
            boot = np.concatenate([
                rng.choice(idx0, size=per_class, replace=True),
                rng.choice(idx1, size=per_class, replace=True),
            ])
            tree = DecisionTree(
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                max_leaf_nodes=self.max_leaf_nodes,
                max_features=max_features,
                mode="classification",
            )
            tree.fit(X[boot], y[boot], rng=rng)
            self.trees.append(tree)
        return self

    def predict_proba(self, X) -> np.ndarray:
        votes = np.stack([t.predict_value(X) >= 0.5 for t in self.trees])
        return votes.mean(axis=0)

    def gini_importance(self) -> np.ndarray:
        """Mean impurity decrease per feature across trees, normalized to 1."""
        if not self.trees:
            raise ValueError("model not fitted")
        imp = np.mean([t.feature_importance for t in self.trees], axis=0)
        total = imp.sum()
        return imp / total if total > 0 else imp


class GradientBoostedModel:
    """Stagewise regression trees on log-loss gradients with shrinkage.
    predict_proba is the sigmoid of the summed leaf scores."""

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: int = 3,
        learning_rate: float = 0.1,
        min_samples_split: int = 2,
        seed: int = 0,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.learning_rate = learning_rate
        self.min_samples_split = min_samples_split
        self.seed = seed
        self.trees: list[DecisionTree] = []
        self.base_score = 0.0

    def fit(self, X, y, seed: int | None = None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        _check_two_classes(y)
        sw = _class_weights(y)
        prior = float(np.average(y, weights=sw))
        self.base_score = math.log(prior / (1 - prior))
        F = np.full(len(y), self.base_score)
        self.trees = []
        for _ in range(self.n_trees):
            p = _sigmoid(F)
            residual = y - p
            tree = DecisionTree(
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                mode="regression",
            )
            tree.fit(X, residual, sample_weight=sw)
            self._newton_leaves(tree.root, X, y, p, sw, np.arange(len(y)))
            F = F + self.learning_rate * tree.predict_value(X)
            self.trees.append(tree)
        return self

    def _newton_leaves(self, node, X, y, p, sw, idx):
        """Replace mean-residual leaf values with the Newton step
        sum(w*(y-p)) / sum(w*p*(1-p))."""
        if node.is_leaf:
            num = float((sw[idx] * (y[idx] - p[idx])).sum())
            den = float((sw[idx] * p[idx] * (1 - p[idx])).sum())
            node.value = num / den if den > 1e-12 else 0.0
            return
        mask = X[idx, node.feature] <= node.threshold
        self._newton_leaves(node.left, X, y, p, sw, idx[mask])
        self._newton_leaves(node.right, X, y, p, sw, idx[~mask])

    def predict_proba(self, X) -> np.ndarray:
        F = np.full(len(np.asarray(X)), self.base_score)
        for tree in self.trees:
            F = F + self.learning_rate * tree.predict_value(X)
        return _sigmoid(F)

"""User credibility model: author feature extraction, Verified-proxy
classifiers, Monte Carlo cross-validation, grid search, and the calibrated
0-100 credibility score."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from stormsift.classifiers import (
    GradientBoostedModel,
    LogisticRegressionModel,
    RandomForestModel,
)
from stormsift.ingest import TweetRecord
from stormsift.metrics import auroc, confusion, precision_recall_f1

SECONDS_PER_DAY = 86400
PROB_CLAMP = 1e-9

FEATURE_ORDER = (
    "account_age_days",
    "friends_count",
    "followers_count",
    "statuses_count",
    "has_weblinks",
    "hashtag_count",
    "has_media",
    "is_geolocated",
    "message_frequency",
)


@dataclass(frozen=True)
class UserFeatures:
    account_age_days: float
    friends_count: int
    followers_count: int
    statuses_count: int
    has_weblinks: bool
    hashtag_count: int
    has_media: bool
    is_geolocated: bool
    message_frequency: float

    def as_array(self) -> np.ndarray:
        return np.array([float(getattr(self, name)) for name in FEATURE_ORDER])


def extract_user_features(tweets: Sequence[TweetRecord], event_time: int) -> UserFeatures:
    """Aggregate one author's tweets. Booleans use any-semantics."""
    if not tweets:
        raise ValueError("author has no tweets")
    author = tweets[0].author
    age_days = max((event_time - author.account_created_at) / SECONDS_PER_DAY, 0.0)
    return UserFeatures(
        account_age_days=age_days,
        friends_count=author.friends_count,
        followers_count=author.followers_count,
        statuses_count=author.statuses_count,
        has_weblinks=any(t.weblinks for t in tweets),
        hashtag_count=sum(len(t.hashtags) for t in tweets),
        has_media=any(t.media for t in tweets),
        is_geolocated=True,  # ingest only admits located tweets
        message_frequency=author.statuses_count / max(age_days, 1.0),
    )


class ClassifierKind(Enum):
    LOGISTIC_REGRESSION = "lr"
    RANDOM_FOREST = "rf"
    GRADIENT_BOOSTED = "gb"


@dataclass
class TrainedUserModel:
    kind: ClassifierKind
    model: object
    feature_order: tuple[str, ...]
    seed: int
    calibration_min: float = 0.0
    calibration_max: float = 0.0

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.clip(self.model.predict_proba(X), 0.0, 1.0)


def _build_model(kind: ClassifierKind, hyperparams: dict, seed: int):
    hp = dict(hyperparams or {})
    if kind is ClassifierKind.LOGISTIC_REGRESSION:
        return LogisticRegressionModel(**hp)
    if kind is ClassifierKind.RANDOM_FOREST:
        return RandomForestModel(seed=seed, **hp)
    return GradientBoostedModel(seed=seed, **hp)


def train_classifier(
    kind: ClassifierKind,
    X,
    y,
    hyperparams: dict | None = None,
    seed: int = 0,
) -> TrainedUserModel:
    """Fit one classifier and record calibration bounds of log-probabilities
    on the training set."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    model = _build_model(kind, hyperparams or {}, seed)
    model.fit(X, y, seed=seed)
    trained = TrainedUserModel(kind=kind, model=model, feature_order=FEATURE_ORDER, seed=seed)
    logp = np.log(np.clip(trained.predict_proba(X), PROB_CLAMP, 1.0))
    trained.calibration_min = float(logp.min())
    trained.calibration_max = float(logp.max())
    return trained


def stratified_split(y: np.ndarray, test_fraction: float, rng: np.random.Generator):
    """Random stratified split preserving class ratio within one sample."""
    train_idx, test_idx = [], []
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        idx = rng.permutation(idx)
        n_test = int(round(len(idx) * test_fraction))
        test_idx.append(idx[:n_test])
        train_idx.append(idx[n_test:])
    return np.sort(np.concatenate(train_idx)), np.sort(np.concatenate(test_idx))


@dataclass(frozen=True)
class CVRow:
    precision: float
    recall: float
    f1: float
    auroc: float


@dataclass(frozen=True)
class CVReport:
    rows: tuple[CVRow, ...]

    def mean(self, metric: str) -> float:
        return float(np.mean([getattr(r, metric) for r in self.rows]))

    def std(self, metric: str) -> float:
        return float(np.std([getattr(r, metric) for r in self.rows]))


N_CV_REPEATS = 10
CV_TEST_FRACTION = 0.30


def cross_validate(
    kind: ClassifierKind,
    X,
    y,
    hyperparams: dict | None = None,
    seed: int = 0,
) -> CVReport:
    """10 repeated random stratified 70/30 splits (Monte Carlo CV)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) < 10:
        raise ValueError("need at least 10 labeled examples")
    rng = np.random.default_rng(seed)
    rows = []
    for repeat in range(N_CV_REPEATS):
        tr, te = stratified_split(y, CV_TEST_FRACTION, rng)
        model = train_classifier(kind, X[tr], y[tr], hyperparams, seed=seed + repeat)
        p = model.predict_proba(X[te])
        c = confusion(p, y[te].astype(bool), 0.5)
        prec, rec, f1 = precision_recall_f1(c)
        rows.append(CVRow(precision=prec, recall=rec, f1=f1, auroc=auroc(p, y[te].astype(bool))))
    return CVReport(rows=tuple(rows))


@dataclass(frozen=True)
class GridSpec:
    """Named hyperparameter -> candidate values; cells enumerate the cross
    product in declaration order."""

    axes: tuple[tuple[str, tuple], ...]

    def cells(self) -> list[dict]:
        names = [name for name, _ in self.axes]
        out = []
        for combo in itertools.product(*(values for _, values in self.axes)):
            out.append(dict(zip(names, combo)))
        if not out:
            raise ValueError("empty grid")
        return out


def grid_search(
    kind: ClassifierKind,
    X,
    y,
    grid: GridSpec,
    seed: int = 0,
) -> tuple[dict, CVReport]:
    """Exhaustive search; best cell by mean F1, ties by declaration order."""
    best: tuple[dict, CVReport] | None = None
    for cell in grid.cells():
        report = cross_validate(kind, X, y, cell, seed=seed)
        if best is None or report.mean("f1") > best[1].mean("f1") + 1e-12:
            best = (cell, report)
    assert best is not None
    return best


def gini_importance(model: TrainedUserModel) -> dict[str, float]:
    """Per-feature mean Gini impurity decrease, normalized to sum 1."""
    if model.kind is not ClassifierKind.RANDOM_FOREST:
        raise ValueError("Gini importance is defined for random forests")
    imp = model.model.gini_importance()
    return dict(zip(model.feature_order, (float(v) for v in imp)))


def user_score(model: TrainedUserModel, features: UserFeatures) -> float:
    """Min-max rescaled log-probability on [0, 100], clamped."""
    p = float(model.predict_proba(features.as_array()[None, :])[0])
    logp = math.log(max(min(p, 1.0), PROB_CLAMP))
    lo, hi = model.calibration_min, model.calibration_max
    if hi == lo:
        return 0.0
    return min(100.0, max(0.0, (logp - lo) / (hi - lo) * 100.0))


# -- persistence ---------------------------------------------------------------

def save_user_model(model: TrainedUserModel, path) -> None:
    lines = [
        f"kind={model.kind.value}",
        f"seed={model.seed}",
        f"features={','.join(model.feature_order)}",
        f"calibration_min={model.calibration_min!r}",
        f"calibration_max={model.calibration_max!r}",
    ]
    m = model.model
    if model.kind is ClassifierKind.LOGISTIC_REGRESSION:
        lines.append("weights=" + " ".join(repr(float(v)) for v in m.weights))
        lines.append(f"bias={float(m.bias)!r}")
        lines.append("mean=" + " ".join(repr(float(v)) for v in m.mean))
        lines.append("scale=" + " ".join(repr(float(v)) for v in m.scale))
    else:
        if model.kind is ClassifierKind.GRADIENT_BOOSTED:
            lines.append(f"base_score={m.base_score!r}")
            lines.append(f"learning_rate={m.learning_rate!r}")
        for tree in m.trees:
            lines.append("tree=" + _serialize_tree(tree.root))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _serialize_tree(node) -> str:
    """Preorder: leaf -> 'L value'; split -> 'S feature threshold' then
    left and right subtrees."""
    if node.is_leaf:
        return f"L {node.value!r}"
    return f"S {node.feature} {node.threshold!r} {_serialize_tree(node.left)} {_serialize_tree(node.right)}"


def _deserialize_tree(tokens: list[str], pos: int = 0):
    from stormsift.classifiers import _TreeNode

    if tokens[pos] == "L":
        return _TreeNode(value=float(tokens[pos + 1])), pos + 2
    node = _TreeNode(feature=int(tokens[pos + 1]), threshold=float(tokens[pos + 2]))
    node.left, nxt = _deserialize_tree(tokens, pos + 3)
    node.right, nxt = _deserialize_tree(tokens, nxt)
    return node, nxt


def load_user_model(path) -> TrainedUserModel:
    from stormsift.classifiers import DecisionTree

    kv: dict[str, str] = {}
    trees: list[str] = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            key, _, value = line.partition("=")
            if key == "tree":
                trees.append(value)
            else:
                kv[key] = value
    kind = ClassifierKind(kv["kind"])
    if kind is ClassifierKind.LOGISTIC_REGRESSION:
        m = LogisticRegressionModel()
        m.weights = np.array([float(v) for v in kv["weights"].split()])
        m.bias = float(kv["bias"])
        m.mean = np.array([float(v) for v in kv["mean"].split()])
        m.scale = np.array([float(v) for v in kv["scale"].split()])
    else:
        m = RandomForestModel() if kind is ClassifierKind.RANDOM_FOREST else GradientBoostedModel()
        if kind is ClassifierKind.GRADIENT_BOOSTED:
            m.base_score = float(kv["base_score"])
            m.learning_rate = float(kv["learning_rate"])
        for t in trees:
            tree = DecisionTree(mode="classification" if kind is ClassifierKind.RANDOM_FOREST else "regression")
            tree.root, _ = _deserialize_tree(t.split())
            m.trees.append(tree)
    model = TrainedUserModel(
        kind=kind,
        model=m,
        feature_order=tuple(kv["features"].split(",")),
        seed=int(kv["seed"]),
        calibration_min=float(kv["calibration_min"]),
        calibration_max=float(kv["calibration_max"]),
    )
    return model

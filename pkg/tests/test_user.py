import numpy as np
import pytest

from stormsift.ingest import GeoLocation, LocationKind, TweetRecord, UserProfile
from stormsift.metrics import auroc, confusion, precision_recall_f1
from stormsift.user import (
    FEATURE_ORDER,
    ClassifierKind,
    GridSpec,
    UserFeatures,
    cross_validate,
    extract_user_features,
    gini_importance,
    grid_search,
    load_user_model,
    save_user_model,
    stratified_split,
    train_classifier,
    user_score,
)


def xor_dataset(reps=20):
    base = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    X = np.tile(base, (reps, 1))
    y = np.tile(np.array([0.0, 1.0, 1.0, 0.0]), reps)
    return X, y


def blob_dataset(n=400, seed=0):
    rng = np.random.default_rng(seed)
    X0 = rng.normal(loc=(-2.0, -2.0), scale=1.0, size=(n // 2, 2))
    X1 = rng.normal(loc=(2.0, 2.0), scale=1.0, size=(n // 2, 2))
    X = np.vstack([X0, X1])
    y = np.concatenate([np.zeros(n // 2), np.ones(n // 2)])
    perm = rng.permutation(n)
    return X[perm], y[perm]


def verified_user_dataset(n=2000, seed=1):
    """Seeded nonlinear generator at roughly 1:20 class imbalance. A user is
    verified when either old with many followers, or hyperactive with a large
    audience, so no single linear boundary separates the classes."""
    rng = np.random.default_rng(seed)
    rows, labels = [], []
    for _ in range(n):
        age = float(rng.uniform(10, 4000))
        friends = float(rng.lognormal(5, 1))
        followers = float(rng.lognormal(5.5, 1.6))
        statuses = float(rng.lognormal(7, 1.2))
        freq = statuses / max(age, 1.0)
        verified = (age > 2000 and followers > 3000) or (freq > 40 and followers > 800)
        if rng.random() < 0.002:
            verified = not verified
        rows.append([
            age, friends, followers, statuses,
            float(rng.integers(0, 2)), float(rng.integers(0, 5)),
            float(rng.integers(0, 2)), 1.0, freq,
        ])
        labels.append(float(verified))
    return np.array(rows), np.array(labels)


class TestXor:
    def test_forest_fits_parity_linear_model_cannot(self):
        X, y = xor_dataset()
        rf = train_classifier(ClassifierKind.RANDOM_FOREST, X, y,
                              {"n_trees": 30, "max_depth": 4}, seed=0)
        rf_acc = float(((rf.predict_proba(X) >= 0.5) == y.astype(bool)).mean())
        assert rf_acc == 1.0

        lr = train_classifier(ClassifierKind.LOGISTIC_REGRESSION, X, y, seed=0)
        lr_acc = float(((lr.predict_proba(X) >= 0.5) == y.astype(bool)).mean())
        assert lr_acc <= 0.75

    def test_boosting_fits_parity(self):
        X, y = xor_dataset()
        gb = train_classifier(ClassifierKind.GRADIENT_BOOSTED, X, y,
                              {"n_trees": 30, "max_depth": 3}, seed=0)
        acc = float(((gb.predict_proba(X) >= 0.5) == y.astype(bool)).mean())
        assert acc == 1.0


class TestSeparableBlobs:
    @pytest.mark.parametrize("kind", list(ClassifierKind))
    def test_all_kinds_reach_auroc(self, kind):
        X, y = blob_dataset(seed=2)
        Xte, yte = blob_dataset(seed=3)
        model = train_classifier(kind, X, y, seed=0)
        assert auroc(model.predict_proba(Xte), yte.astype(bool)) >= 0.95


class TestVerifiedGenerator:
    def test_forest_beats_linear_model(self):
        X, y = verified_user_dataset(seed=1)
        Xte, yte = verified_user_dataset(seed=2)
        rf = train_classifier(ClassifierKind.RANDOM_FOREST, X, y,
                              {"n_trees": 50, "max_depth": 10}, seed=0)
        lr = train_classifier(ClassifierKind.LOGISTIC_REGRESSION, X, y, seed=0)
        rf_p = rf.predict_proba(Xte)
        assert auroc(rf_p, yte.astype(bool)) >= 0.95
        rf_f1 = precision_recall_f1(confusion(rf_p, yte.astype(bool), 0.5))[2]
        lr_f1 = precision_recall_f1(confusion(lr.predict_proba(Xte), yte.astype(bool), 0.5))[2]
        assert rf_f1 > lr_f1

    def test_imbalance_near_one_to_twenty(self):
        _, y = verified_user_dataset(seed=1)
        rate = y.mean()
        assert 0.02 <= rate <= 0.10


class TestGiniImportance:
    def test_planted_feature_dominates(self):
        rng = np.random.default_rng(4)
        n = 600
        X = rng.uniform(size=(n, len(FEATURE_ORDER)))
        X[:, 8] = 0.0  # constant feature never splits
        y = (X[:, 0] > 0.5).astype(float)
        rf = train_classifier(ClassifierKind.RANDOM_FOREST, X, y,
                              {"n_trees": 50, "max_depth": 8}, seed=0)
        imp = gini_importance(rf)
        assert sum(imp.values()) == pytest.approx(1.0, abs=1e-9)
        assert imp[FEATURE_ORDER[0]] >= 0.9
        assert imp[FEATURE_ORDER[8]] == 0.0

    def test_only_forests(self):
        X, y = blob_dataset(100, seed=5)
        lr = train_classifier(ClassifierKind.LOGISTIC_REGRESSION, X, y, seed=0)
        with pytest.raises(ValueError):
            gini_importance(lr)


class TestCrossValidate:
    def test_exactly_ten_rows(self):
        X, y = blob_dataset(100, seed=6)
        report = cross_validate(ClassifierKind.LOGISTIC_REGRESSION, X, y, seed=0)
        assert len(report.rows) == 10

    def test_perfect_separator_scores_one(self):
        rng = np.random.default_rng(7)
        n = 100
        margin = np.concatenate([rng.uniform(-3, -1, n // 2), rng.uniform(1, 3, n - n // 2)])
        X = np.column_stack([margin, rng.normal(size=n)])
        y = (X[:, 0] > 0).astype(float)
        report = cross_validate(ClassifierKind.LOGISTIC_REGRESSION, X, y, seed=0)
        assert report.mean("f1") == 1.0

    def test_shuffled_labels_near_chance(self):
        rng = np.random.default_rng(8)
        X, y = blob_dataset(400, seed=9)
        y = rng.permutation(y)
        report = cross_validate(ClassifierKind.LOGISTIC_REGRESSION, X, y, seed=0)
        assert 0.4 <= report.mean("auroc") <= 0.6

    def test_deterministic(self):
        X, y = blob_dataset(100, seed=10)
        r1 = cross_validate(ClassifierKind.RANDOM_FOREST, X, y, {"n_trees": 10}, seed=3)
        r2 = cross_validate(ClassifierKind.RANDOM_FOREST, X, y, {"n_trees": 10}, seed=3)
        assert r1 == r2

    def test_too_few_examples_error(self):
        with pytest.raises(ValueError):
            cross_validate(ClassifierKind.LOGISTIC_REGRESSION,
                           np.zeros((5, 2)), np.array([0, 1, 0, 1, 0]))


class TestStratifiedSplit:
    def test_class_ratio_preserved_within_one(self):
        rng = np.random.default_rng(11)
        y = np.array([0] * 70 + [1] * 30, dtype=float)
        for _ in range(20):
            tr, te = stratified_split(y, 0.30, rng)
            assert len(tr) + len(te) == 100
            assert abs(y[te].sum() - 9) <= 1
            assert abs((y[te] == 0).sum() - 21) <= 1
            assert not set(tr) & set(te)


class TestGridSearch:
    def test_best_cell_is_max_mean_f1(self):
        X, y = verified_user_dataset(300, seed=12)
        grid = GridSpec(axes=(("n_trees", (5, 20)), ("max_depth", (2, 8))))
        best_cell, best_report = grid_search(ClassifierKind.RANDOM_FOREST, X, y, grid, seed=0)
        all_f1 = [
            cross_validate(ClassifierKind.RANDOM_FOREST, X, y, cell, seed=0).mean("f1")
            for cell in grid.cells()
        ]
        assert best_report.mean("f1") == max(all_f1)
        assert best_cell in grid.cells()

    def test_cells_enumerate_cross_product(self):
        grid = GridSpec(axes=(("a", (1, 2)), ("b", (3, 4, 5))))
        assert len(grid.cells()) == 6
        assert grid.cells()[0] == {"a": 1, "b": 3}


class TestMonotoneInvariance:
    def test_forest_predictions_stable_under_feature_rescale(self):
        X, y = verified_user_dataset(500, seed=13)
        Xm = np.log1p(X)  # strictly increasing on nonnegative features
        rf_a = train_classifier(ClassifierKind.RANDOM_FOREST, X, y,
                                {"n_trees": 30, "max_depth": 8}, seed=0)
        rf_b = train_classifier(ClassifierKind.RANDOM_FOREST, Xm, y,
                                {"n_trees": 30, "max_depth": 8}, seed=0)
        la = rf_a.predict_proba(X) >= 0.5
        lb = rf_b.predict_proba(Xm) >= 0.5
        assert (la == lb).mean() >= 0.95


class TestUserScore:
    def fitted(self):
        X, y = verified_user_dataset(400, seed=14)
        return train_classifier(ClassifierKind.RANDOM_FOREST, X, y,
                                {"n_trees": 20, "max_depth": 6}, seed=0)

    def features(self, row):
        return UserFeatures(*row)

    def test_bounds(self):
        model = self.fitted()
        X, _ = verified_user_dataset(200, seed=15)
        for row in X[:50]:
            s = user_score(model, self.features(row))
            assert 0.0 <= s <= 100.0

    def test_monotone_in_probability(self):
        model = self.fitted()
        X, _ = verified_user_dataset(200, seed=16)
        probs = model.predict_proba(X)
        scores = [user_score(model, self.features(row)) for row in X]
        order = np.argsort(probs)
        assert np.all(np.diff(np.array(scores)[order]) >= -1e-9)


class TestExtractFeatures:
    def make_tweet(self, **over):
        author = UserProfile(
            user_id="u1",
            account_created_at=over.pop("account_created_at", 1_400_000_000),
            friends_count=over.pop("friends", 10),
            followers_count=over.pop("followers", 20),
            statuses_count=over.pop("statuses", 300),
            verified=False,
        )
        return TweetRecord(
            id=over.pop("id", "t1"),
            created_at=over.pop("created_at", 1_505_001_600),
            location=GeoLocation(26.0, -81.0),
            location_kind=LocationKind.COORDINATES,
            text="x",
            hashtags=over.pop("hashtags", ()),
            weblinks=over.pop("weblinks", ()),
            media=over.pop("media", ()),
            author=author,
        )

    def test_aggregation(self):
        t1 = self.make_tweet(hashtags=("#a", "#b"))
        t2 = self.make_tweet(id="t2", weblinks=("http://x",), hashtags=("#c",))
        f = extract_user_features([t1, t2], event_time=1_505_001_600)
        assert f.hashtag_count == 3
        assert f.has_weblinks is True
        assert f.has_media is False
        assert f.is_geolocated is True
        assert f.account_age_days == pytest.approx((1_505_001_600 - 1_400_000_000) / 86400)
        assert f.message_frequency == pytest.approx(300 / f.account_age_days)

    def test_brand_new_account_frequency_clamped(self):
        t = self.make_tweet(account_created_at=1_505_001_600, statuses=500)
        f = extract_user_features([t], event_time=1_505_001_600)
        assert f.account_age_days == 0.0
        assert f.message_frequency == 500.0

    def test_empty_error(self):
        with pytest.raises(ValueError):
            extract_user_features([], event_time=0)


class TestPersistence:
    @pytest.mark.parametrize("kind,hp", [
        (ClassifierKind.LOGISTIC_REGRESSION, None),
        (ClassifierKind.RANDOM_FOREST, {"n_trees": 10, "max_depth": 5}),
        (ClassifierKind.GRADIENT_BOOSTED, {"n_trees": 10, "max_depth": 3}),
    ])
    def test_roundtrip_probabilities_identical(self, tmp_path, kind, hp):
        X, y = verified_user_dataset(300, seed=17)
        model = train_classifier(kind, X, y, hp, seed=0)
        save_user_model(model, tmp_path / "m.txt")
        loaded = load_user_model(tmp_path / "m.txt")
        assert loaded.kind is kind
        assert np.allclose(loaded.predict_proba(X), model.predict_proba(X), atol=1e-12)
        f = UserFeatures(*X[0])
        assert user_score(loaded, f) == pytest.approx(user_score(model, f), abs=1e-9)

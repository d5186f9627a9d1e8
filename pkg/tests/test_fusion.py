import numpy as np
import pytest
from hypothesis import given, strategies as st

from stormsift.fusion import (
    AXES,
    ScoredTweet,
    ScoreVector,
    ThresholdVector,
    cdf_pass_rate,
    filter_stream,
    passes_thresholds,
)

score = st.floats(0.0, 100.0, allow_nan=False)


def sv(g=50.0, t=50.0, u=50.0, i=50.0):
    return ScoreVector(geo=g, text=t, user=u, image=i)


class TestPassesThresholds:
    def test_boundary_inclusive(self):
        s = sv(50.0, 30.0, 85.0, 85.0)
        t = ThresholdVector(geo_min=50.0, text_min=30.0, user_min=85.0, image_min=85.0)
        assert passes_thresholds(s, t)

    def test_single_axis_below_fails(self):
        t = ThresholdVector(geo_min=50.0, text_min=30.0, user_min=85.0, image_min=85.0)
        assert not passes_thresholds(sv(49.999, 30.0, 85.0, 85.0), t)
        assert not passes_thresholds(sv(50.0, 30.0, 85.0, 84.999), t)

    @given(g=score, t=score, u=score, i=score)
    def test_zero_thresholds_pass_everything(self, g, t, u, i):
        assert passes_thresholds(sv(g, t, u, i), ThresholdVector())

    @given(g=score, t=score, u=score, i=score,
           tg=score, tt=score, tu=score, ti=score)
    def test_and_semantics(self, g, t, u, i, tg, tt, tu, ti):
        thr = ThresholdVector(geo_min=tg, text_min=tt, user_min=tu, image_min=ti)
        expected = g >= tg and t >= tt and u >= tu and i >= ti
        assert passes_thresholds(sv(g, t, u, i), thr) == expected

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            sv(101.0)
        with pytest.raises(ValueError):
            sv(-0.001)
        with pytest.raises(ValueError):
            ThresholdVector(geo_min=150.0)


def random_stream(n, seed=0):
    rng = np.random.default_rng(seed)
    return [
        ScoredTweet(tweet_id=f"t{j}", scores=sv(*(float(v) for v in rng.uniform(0, 100, 4))))
        for j in range(n)
    ]


class TestFilterStream:
    def test_order_preserved(self):
        stream = random_stream(200, seed=1)
        out = filter_stream(stream, ThresholdVector(geo_min=40.0))
        ids = [s.tweet_id for s in out]
        assert ids == [s.tweet_id for s in stream if s.scores.geo >= 40.0]

    def test_zero_threshold_is_identity(self):
        stream = random_stream(50, seed=2)
        assert filter_stream(stream, ThresholdVector()) == stream

    def test_idempotent(self):
        stream = random_stream(100, seed=3)
        t = ThresholdVector(geo_min=30.0, text_min=60.0)
        once = filter_stream(stream, t)
        assert filter_stream(once, t) == once

    def test_monotone_in_thresholds(self):
        stream = random_stream(300, seed=4)
        sizes = [
            len(filter_stream(stream, ThresholdVector(geo_min=th, text_min=th,
                                                      user_min=th, image_min=th)))
            for th in range(0, 101, 5)
        ]
        assert sizes == sorted(sizes, reverse=True)

    def test_tighter_on_any_axis_is_subset(self):
        stream = random_stream(300, seed=5)
        base = ThresholdVector(geo_min=20.0, text_min=20.0)
        tighter = ThresholdVector(geo_min=20.0, text_min=45.0)
        loose_ids = {s.tweet_id for s in filter_stream(stream, base)}
        tight_ids = {s.tweet_id for s in filter_stream(stream, tighter)}
        assert tight_ids <= loose_ids


class TestCdfPassRate:
    def test_monotone_non_increasing(self):
        stream = random_stream(500, seed=6)
        for axis in AXES:
            rates = [r for _, r in cdf_pass_rate(stream, axis)]
            assert all(b <= a for a, b in zip(rates, rates[1:]))

    def test_endpoints(self):
        stream = random_stream(100, seed=7)
        curve = dict(cdf_pass_rate(stream, "geo"))
        assert curve[0.0] == 1.0
        assert curve[100.0] <= 0.05

    def test_uniform_scores_match_complement(self):
        rng = np.random.default_rng(8)
        n = 10000
        stream = [
            ScoredTweet(f"t{j}", sv(*(float(v) for v in rng.uniform(0, 100, 4))))
            for j in range(n)
        ]
        for th, rate in cdf_pass_rate(stream, "user", thresholds=range(0, 101, 10)):
            assert rate == pytest.approx(1.0 - th / 100.0, abs=0.05)

    def test_unknown_axis_error(self):
        with pytest.raises(ValueError):
            cdf_pass_rate(random_stream(5), "wind")

    def test_empty_error(self):
        with pytest.raises(ValueError):
            cdf_pass_rate([], "geo")

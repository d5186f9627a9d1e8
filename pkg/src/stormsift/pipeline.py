"""End-to-end orchestration: ingest -> per-model scoring -> fusion, producing
an immutable snapshot the query API and CLI serve from. Also houses the
deterministic mock map-context provider."""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from stormsift import fusion, geo, image, ingest, text, user
from stormsift.text import TextModelParams, TextScoreFormula


@dataclass
class PipelineConfig:
    tweets_path: str = ""
    sensors_path: str = ""
    track_path: str = ""
    labels_path: str = ""
    image_scores_path: str = ""
    study_start: int = 0
    study_end: int = 0
    idw_power: float = geo.DEFAULT_IDW_POWER
    d_min: float = geo.D_MIN_MI
    eps: float = 1e-6
    seed_term: str = "irma"
    segment_hours: int = 1
    text_formula: str = "DP"
    text_params: TextModelParams = field(default_factory=TextModelParams)
    user_classifier: str = "rf"
    image_gate: float = image.DEFAULT_STAGE_GATE
    default_thresholds: fusion.ThresholdVector = field(default_factory=fusion.ThresholdVector)
    bind_address: str = "127.0.0.1:8000"
    seed: int = 0

    def validate(self) -> None:
        for name in ("tweets_path", "sensors_path", "track_path"):
            p = getattr(self, name)
            if not p or not Path(p).exists():
                raise PipelineError("config", f"{name} not resolvable: {p!r}")
        if self.study_end <= self.study_start:
            raise PipelineError("config", "study window is empty")


CONFIG_KEYS = {
    "tweets_path": str, "sensors_path": str, "track_path": str,
    "labels_path": str, "image_scores_path": str,
    "study_start": int, "study_end": int,
    "idw_power": float, "d_min": float, "eps": float,
    "seed_term": str, "segment_hours": int, "text_formula": str,
    "user_classifier": str, "image_gate": float,
    "geo_min": float, "text_min": float, "user_min": float, "image_min": float,
    "bind_address": str, "seed": int,
    "text_window_size": int, "text_dimension": int, "text_min_count": int,
    "text_negative_samples": int, "text_epochs": int,
}


def load_config(path) -> PipelineConfig:
    """Key=value config file; '#' comments and blank lines ignored."""
    kv: dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise PipelineError("config", f"unknown config key {key!r}")
            kv[key] = value.strip()
    return apply_config_overrides(PipelineConfig(), kv)


def apply_config_overrides(config: PipelineConfig, kv: dict[str, str]) -> PipelineConfig:
    thresholds = {
        "geo_min": config.default_thresholds.geo_min,
        "text_min": config.default_thresholds.text_min,
        "user_min": config.default_thresholds.user_min,
        "image_min": config.default_thresholds.image_min,
    }
    text_params = {
        "window_size": config.text_params.window_size,
        "dimension": config.text_params.dimension,
        "min_count": config.text_params.min_count,
        "negative_samples": config.text_params.negative_samples,
        "epochs": config.text_params.epochs,
        "seed": config.text_params.seed,
    }
    updates = {}
    for key, raw in kv.items():
        caster = CONFIG_KEYS[key]
        value = caster(raw)
        if key in thresholds:
            thresholds[key] = value
        elif key.startswith("text_") and key != "text_formula":
            text_params[key[len("text_"):]] = value
        else:
            updates[key] = value
    updates["default_thresholds"] = fusion.ThresholdVector(**thresholds)
    updates["text_params"] = TextModelParams(**text_params)
    return replace(config, **updates)


class PipelineError(Exception):
    """Fatal pipeline failure, tagged with the stage it arose in."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class StoreSnapshot:
    """Immutable scored-tweet collection plus calibration artifacts."""

    version: int
    scored: tuple[fusion.ScoredTweet, ...]
    geo_model: geo.GeoModelSelection | None
    image_calibration: image.ImageCalibration | None
    manifest: dict

    def by_id(self, tweet_id: str) -> fusion.ScoredTweet | None:
        for st in self.scored:
            if st.tweet_id == tweet_id:
                return st
        return None


def _geo_features_for(
    tweets: Sequence[ingest.TweetRecord],
    sensors: Sequence[ingest.SensorReading],
    track: Sequence[ingest.TrackPoint],
    config: PipelineConfig,
) -> list[geo.GeoFeatures]:
    by_window_wind: dict[int, list] = {}
    by_window_rain: dict[int, list] = {}
    for s in sensors:
        by_window_wind.setdefault(s.window.index, []).append((s.location, s.wind_mph))
        by_window_rain.setdefault(s.window.index, []).append((s.location, s.precip_inches))
    eye_by_window = {tp.window.index: tp.eye for tp in track}
    feats = []
    for t in tweets:
        window = ingest.bucket_hourly(t.created_at, config.study_start)
        wind_readings = by_window_wind.get(window.index)
        rain_readings = by_window_rain.get(window.index)
        eye = eye_by_window.get(window.index)
        if not wind_readings or not rain_readings or eye is None:
            raise PipelineError(
                "geo", f"no sensor/track coverage for window {window.index} (tweet {t.id})"
            )
        wind = geo.idw_interpolate(t.location, wind_readings, config.idw_power)
        rain = geo.nearest_station_value(t.location, rain_readings)
        dist = geo.distance_to_eye(t.location, eye, config.d_min)
        feats.append(geo.GeoFeatures(wind=max(wind, 0.0), rain=max(rain, 0.0),
                                     distance_mi=dist, window=window))
    return feats


def _text_scores_for(
    tweets: Sequence[ingest.TweetRecord], config: PipelineConfig
) -> dict[str, float]:
    stopwords = text.load_default_stopwords()
    tokenized = [
        text.clean_tokenize(t.text, stopwords, tweet_id=t.id,
                            window=ingest.bucket_hourly(t.created_at, config.study_start))
        for t in tweets
    ]
    formula = TextScoreFormula(config.text_formula)
    seg_len = max(1, config.segment_hours)
    segments: dict[int, list[text.TokenizedTweet]] = {}
    for tok in tokenized:
        segments.setdefault(tok.window.index // seg_len, []).append(tok)
    scores: dict[str, float] = {}
    for seg_id in sorted(segments):
        group = segments[seg_id]
        params = replace(config.text_params, seed=config.seed + seg_id)
        try:
            table = text.train_embeddings(group, params, segment_id=str(seg_id))
        except ValueError:
            table = None
        if table is None or config.seed_term not in table:
            # No usable vocabulary for this segment: neutral mid-scale score.
            for tok in group:
                scores[tok.tweet_id] = 50.0
            continue
        seed_vec = table.vector(config.seed_term)
        raw = [text.score_tweet(formula, seed_vec, tok, table) for tok in group]
        for tok, s in zip(group, text.text_score(raw)):
            scores[tok.tweet_id] = s
    return scores


def _user_scores_for(
    tweets: Sequence[ingest.TweetRecord], config: PipelineConfig
) -> tuple[dict[str, float], user.TrainedUserModel]:
    by_author: dict[str, list[ingest.TweetRecord]] = {}
    for t in tweets:
        by_author.setdefault(t.author.user_id, []).append(t)
    authors = sorted(by_author)
    feats = {a: user.extract_user_features(by_author[a], config.study_start) for a in authors}
    X = np.stack([feats[a].as_array() for a in authors])
    y = np.array([1.0 if by_author[a][0].author.verified else 0.0 for a in authors])
    try:
        model = user.train_classifier(
            user.ClassifierKind(config.user_classifier), X, y, seed=config.seed
        )
    except ValueError as e:
        raise PipelineError("user", str(e)) from e
    scores = {}
    for t in tweets:
        scores[t.id] = user.user_score(model, feats[t.author.user_id])
    return scores, model


def _image_scores_for(
    tweets: Sequence[ingest.TweetRecord], config: PipelineConfig
) -> tuple[dict[str, tuple[float, dict]], image.ImageCalibration | None]:
    if not config.image_scores_path:
        return {t.id: (0.0, {}) for t in tweets}, None
    score_map = image.load_precomputed_scores(config.image_scores_path)
    scorer = image.PrecomputedScorer(score_map)
    probs = [ms.p_related for ms in score_map.values()]
    calibration = image.ImageCalibration.from_probs(probs) if probs else None
    out: dict[str, tuple[float, dict]] = {}
    for t in tweets:
        if not t.media or calibration is None:
            out[t.id] = (0.0, {})
            continue
        media_scores = [scorer.score(m.media_id) for m in t.media]
        out[t.id] = image.image_score(media_scores, calibration, config.image_gate)
    return out, calibration


def run_pipeline(config: PipelineConfig, version: int = 1) -> StoreSnapshot:
    """Ingest -> score -> fuse. Deterministic given the config seed."""
    config.validate()
    t0 = time.monotonic()
    timings: dict[str, float] = {}

    try:
        with open(config.tweets_path) as fh:
            tweets, rejects = ingest.parse_tweet_stream(
                fh, (config.study_start, config.study_end)
            )
        sensors = ingest.load_sensor_csv(config.sensors_path, config.study_start)
        track = ingest.load_track_csv(config.track_path, config.study_start)
        labels = ingest.load_labels(config.labels_path) if config.labels_path else []
    except (OSError, ingest.IngestError) as e:
        raise PipelineError("ingest", str(e)) from e
    if not tweets:
        raise PipelineError("ingest", "no tweets accepted from input")
    timings["ingest_s"] = time.monotonic() - t0

    t1 = time.monotonic()
    feats = _geo_features_for(tweets, sensors, track, config)
    related_by_id = {l.subject_id: l.related for l in labels}
    selection_feats = [f for t, f in zip(tweets, feats) if t.id in related_by_id] or feats
    try:
        geo_model = geo.select_geo_model(
            selection_feats, idw_power=config.idw_power, d_min=config.d_min, eps=config.eps
        )
    except ValueError as e:
        raise PipelineError("geo", str(e)) from e
    geo_scores = {t.id: geo.geo_score(f, geo_model) for t, f in zip(tweets, feats)}
    timings["geo_s"] = time.monotonic() - t1

    t2 = time.monotonic()
    text_scores = _text_scores_for(tweets, config)
    timings["text_s"] = time.monotonic() - t2

    t3 = time.monotonic()
    user_scores, user_model = _user_scores_for(tweets, config)
    timings["user_s"] = time.monotonic() - t3

    t4 = time.monotonic()
    image_scores, image_cal = _image_scores_for(tweets, config)
    timings["image_s"] = time.monotonic() - t4

    scored = []
    for t in sorted(tweets, key=lambda r: (r.created_at, r.id)):
        img_score, tags = image_scores[t.id]
        scored.append(
            fusion.ScoredTweet(
                tweet_id=t.id,
                tweet=t,
                scores=fusion.ScoreVector(
                    geo=geo_scores[t.id],
                    text=text_scores[t.id],
                    user=user_scores[t.id],
                    image=img_score,
                ),
                tags=tags,
            )
        )
    timings["total_s"] = time.monotonic() - t0

    manifest = build_manifest(
        config, scored, rejects, geo_model, image_cal, user_model, timings
    )
    return StoreSnapshot(
        version=version,
        scored=tuple(scored),
        geo_model=geo_model,
        image_calibration=image_cal,
        manifest=manifest,
    )


def build_manifest(config, scored, rejects, geo_model, image_cal, user_model, timings) -> dict:
    content = {
        "seed": config.seed,
        "accepted": len(scored),
        "rejected": len(rejects),
        "geo_model": {
            "function": geo_model.function.label,
            "transform": geo_model.transform.value,
            "boxcox_lambda": geo_model.boxcox_lambda,
            "train_min": geo_model.train_min,
            "train_max": geo_model.train_max,
        },
        "user_model": {
            "kind": user_model.kind.value,
            "calibration_min": user_model.calibration_min,
            "calibration_max": user_model.calibration_max,
        },
        "image_calibration": (
            None if image_cal is None
            else {"log_min": image_cal.log_min, "log_max": image_cal.log_max}
        ),
        "scores": [
            [st.tweet_id, round(st.scores.geo, 6), round(st.scores.text, 6),
             round(st.scores.user, 6), round(st.scores.image, 6)]
            for st in scored
        ],
    }
    digest = hashlib.sha256(
        json.dumps(content, sort_keys=True).encode()
    ).hexdigest()
    # Timings are operator telemetry, deliberately outside the identity hash.
    return {**content, "timings": timings, "hash": digest}


# -- queries -------------------------------------------------------------------

def query(
    snapshot: StoreSnapshot,
    thresholds: fusion.ThresholdVector,
    page: int = 0,
    page_size: int = 50,
) -> tuple[list[fusion.ScoredTweet], int]:
    """Filtered page (stable (created_at, id) order) plus the total count."""
    if page < 0 or page_size <= 0:
        raise ValueError("page must be >= 0 and page_size positive")
    passing = fusion.filter_stream(snapshot.scored, thresholds)
    start = page * page_size
    return passing[start : start + page_size], len(passing)


# -- map context ---------------------------------------------------------------

@dataclass(frozen=True)
class MapContext:
    address: str
    tile: str
    street_view: str | None = None


class MockMapProvider:
    """Deterministic offline stand-in for a live maps service."""

    def context(self, loc: ingest.GeoLocation) -> MapContext:
        cell_lat = math.floor(loc.latitude)
        cell_lon = math.floor(loc.longitude)
        address = f"{loc.latitude},{loc.longitude} @ cell({cell_lat},{cell_lon})"
        return MapContext(
            address=address,
            tile=f"tiles/{cell_lat}_{cell_lon}.png",
            street_view=None,
        )


def map_context(loc: ingest.GeoLocation, provider=None) -> MapContext:
    return (provider or MockMapProvider()).context(loc)


# -- snapshot persistence --------------------------------------------------------

def save_snapshot(snapshot: StoreSnapshot, path) -> None:
    payload = {
        "version": snapshot.version,
        "manifest": snapshot.manifest,
        "records": [
            {
                "tweet_id": st.tweet_id,
                "tweet": ingest.serialize_tweet(st.tweet) if st.tweet else None,
                "geo": round(st.scores.geo, 6),
                "text": round(st.scores.text, 6),
                "user": round(st.scores.user, 6),
                "image": round(st.scores.image, 6),
                "tags": st.tags,
            }
            for st in snapshot.scored
        ],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True))


def load_snapshot(path) -> StoreSnapshot:
    payload = json.loads(Path(path).read_text())
    scored = []
    for rec in payload["records"]:
        tweet = ingest._reparse_serialized(rec["tweet"]) if rec.get("tweet") else None
        scored.append(
            fusion.ScoredTweet(
                tweet_id=rec["tweet_id"],
                tweet=tweet,
                scores=fusion.ScoreVector(
                    geo=rec["geo"], text=rec["text"], user=rec["user"], image=rec["image"]
                ),
                tags=rec.get("tags", {}),
            )
        )
    return StoreSnapshot(
        version=payload["version"],
        scored=tuple(scored),
        geo_model=None,
        image_calibration=None,
        manifest=payload["manifest"],
    )

"""Seeded synthetic hurricane scenario: tweets, station readings, an eye
track, relevance labels, and precomputed image scores. Used by the demos
and the end-to-end determinism checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from stormsift.ingest import format_iso8601

STUDY_START = 1505001600  # 2017-09-10T00:00:00Z
HOURS = 72

RELATED_WORDS = [
    "hurricane", "storm", "flooding", "wind", "shelter", "landfall", "surge",
    "evacuate", "rain", "damage", "power", "outage", "rescue", "eye",
]
UNRELATED_WORDS = [
    "coffee", "football", "movie", "birthday", "concert", "pizza", "beach",
    "party", "traffic", "music", "game", "weekend", "brunch", "selfie",
]


@dataclass(frozen=True)
class ScenarioPaths:
    tweets: Path
    sensors: Path
    track: Path
    labels: Path
    image_scores: Path


def generate_scenario(
    out_dir, seed: int = 0, n_tweets: int = 1000, n_stations: int = 10, hours: int = HOURS
) -> ScenarioPaths:
    """Write a full input bundle under ``out_dir`` and return its paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    # Eye track: northward run across Florida over the study window.
    track_rows = []
    eyes = []
    for h in range(hours):
        lat = 24.5 + 4.5 * h / hours
        lon = -81.5 + 1.0 * h / hours
        eyes.append((lat, lon))
        category = max(0, 4 - h // 20)
        pressure = 930.0 + h * 0.6
        max_wind = 130.0 - h * 0.8
        track_rows.append(
            f"{format_iso8601(STUDY_START + h * 3600)},{lat:.4f},{lon:.4f},{category},{pressure:.1f},{max_wind:.1f}"
        )
    (out / "track.csv").write_text(
        "window_start_iso,lat,lon,category,pressure_mb,max_wind_mph\n" + "\n".join(track_rows) + "\n"
    )

    # Stations scattered over the peninsula; forcing decays with eye distance.
    stations = [
        (f"st{i:02d}", 25.0 + rng.uniform(0, 4.5), -82.5 + rng.uniform(0, 2.5))
        for i in range(n_stations)
    ]
    sensor_rows = []
    for h in range(hours):
        eye_lat, eye_lon = eyes[h]
        for sid, lat, lon in stations:
            d = math.hypot(lat - eye_lat, lon - eye_lon) * 69.0 + 1.0
            wind = max(0.0, 90.0 * math.exp(-d / 120.0) + rng.normal(0, 3))
            precip = max(0.0, 3.0 * math.exp(-d / 80.0) + rng.normal(0, 0.1))
            sensor_rows.append(
                f"{sid},{lat:.4f},{lon:.4f},{format_iso8601(STUDY_START + h * 3600)},{wind:.3f},{precip:.4f}"
            )
    (out / "sensors.csv").write_text(
        "station_id,lat,lon,window_start_iso,wind_mph,precip_in\n" + "\n".join(sensor_rows) + "\n"
    )

    # Users: a verified minority with old, high-follower accounts.
    n_users = max(10, n_tweets // 4)
    users = []
    for u in range(n_users):
        verified = rng.random() < 0.08
        if verified:
            age_days = rng.uniform(2000, 5000)
            followers = int(rng.uniform(5e4, 5e6))
            statuses = int(rng.uniform(2e4, 2e5))
        else:
            age_days = rng.uniform(10, 3000)
            followers = int(rng.uniform(0, 2000))
            statuses = int(rng.uniform(0, 3e4))
        users.append(
            {
                "id": f"u{u:05d}",
                "created_at": format_iso8601(STUDY_START - int(age_days * 86400)),
                "friends_count": int(rng.uniform(0, 3000)),
                "followers_count": followers,
                "statuses_count": statuses,
                "verified": bool(verified),
            }
        )

    tweet_lines = []
    label_rows = []
    image_rows = []
    for i in range(n_tweets):
        h = int(rng.integers(0, hours))
        t = STUDY_START + h * 3600 + int(rng.integers(0, 3600))
        eye_lat, eye_lon = eyes[h]
        related = bool(rng.random() < 0.5)
        if related:
            # Related chatter clusters near the eye.
            lat = float(np.clip(eye_lat + rng.normal(0, 0.8), 24.0, 31.0))
            lon = float(np.clip(eye_lon + rng.normal(0, 0.8), -83.0, -79.0))
            words = list(rng.choice(RELATED_WORDS, size=6)) + ["irma"]
        else:
            lat = float(rng.uniform(24.0, 31.0))
            lon = float(rng.uniform(-83.0, -79.0))
            words = list(rng.choice(UNRELATED_WORDS, size=6))
            if rng.random() < 0.1:
                words.append("irma")
        rng.shuffle(words)
        text = " ".join(words)
        user = users[int(rng.integers(0, n_users))]
        obj = {
            "id": f"t{i:06d}",
            "created_at": format_iso8601(t),
            "text": text,
            "hashtags": ["#hurricaneirma"] if related and rng.random() < 0.4 else [],
            "urls": ["http://example.com/x"] if rng.random() < 0.2 else [],
            "media": [],
            "user": user,
        }
        if rng.random() < 0.5:
            obj["coordinates"] = {"lat": lat, "lon": lon}
        else:
            dl = 0.05
            obj["place"] = {
                "vertices": [
                    {"lat": lat - dl, "lon": lon - dl},
                    {"lat": lat - dl, "lon": lon + dl},
                    {"lat": lat + dl, "lon": lon + dl},
                    {"lat": lat + dl, "lon": lon - dl},
                ]
            }
        if rng.random() < 0.3:
            media_id = f"m{i:06d}"
            obj["media"] = [{"id": media_id, "path": f"images/{media_id}.png"}]
            p_rel = float(np.clip(rng.beta(6, 2) if related else rng.beta(2, 6), 0.0, 1.0))
            if p_rel >= 0.5:
                image_rows.append(
                    f"{media_id},{p_rel:.4f},{rng.random():.4f},{rng.random():.4f},{rng.random():.4f}"
                )
            else:
                image_rows.append(f"{media_id},{p_rel:.4f},,,")
        tweet_lines.append(json.dumps(obj, sort_keys=True))
        tags = ""
        if related and rng.random() < 0.3:
            tags = str(rng.choice(["Flooding", "Windy", "Destruction"]))
        label_rows.append(f"t{i:06d},coder1,{'true' if related else 'false'},{tags}")

    (out / "tweets.jsonl").write_text("\n".join(tweet_lines) + "\n")
    (out / "labels.csv").write_text(
        "subject_id,rater_id,related,tags\n" + "\n".join(label_rows) + "\n"
    )
    (out / "image_scores.csv").write_text(
        "media_id,p_related,p_flood,p_wind,p_destruction\n" + "\n".join(image_rows) + "\n"
    )
    return ScenarioPaths(
        tweets=out / "tweets.jsonl",
        sensors=out / "sensors.csv",
        track=out / "track.csv",
        labels=out / "labels.csv",
        image_scores=out / "image_scores.csv",
    )


def study_window(hours: int = HOURS) -> tuple[int, int]:
    return STUDY_START, STUDY_START + hours * 3600 - 1

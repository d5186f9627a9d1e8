"""Parse tweet, sensor, track, and label files into validated domain records;
resolve Place geometries to centroids; bucket timestamps into hourly windows."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import IO, Iterable, Sequence

SECONDS_PER_HOUR = 3600

VALID_TAGS = frozenset({"Flooding", "Windy", "Destruction"})


class IngestError(Exception):
    """Fatal ingest failure (unreadable source, schema violation)."""


@dataclass(frozen=True)
class GeoLocation:
    latitude: float
    longitude: float

    def __post_init__(self):
        if not (math.isfinite(self.latitude) and math.isfinite(self.longitude)):
            raise ValueError("coordinates must be finite")
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} outside [-180, 180]")


@dataclass(frozen=True)
class PlaceGeometry:
    """A Twitter Place: polygon vertices, or exactly two bounding-box corners
    (south-west then north-east)."""

    vertices: tuple[GeoLocation, ...]

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("place geometry needs at least one vertex")
        if len(self.vertices) == 2:
            sw, ne = self.vertices
            if sw.latitude > ne.latitude or sw.longitude > ne.longitude:
                raise ValueError("bounding box corners must be SW then NE")


def place_centroid(geometry: PlaceGeometry) -> GeoLocation:
    """Arithmetic centroid of the vertex set (bounding box: corner midpoint)."""
    vs = geometry.vertices
    return GeoLocation(
        latitude=sum(v.latitude for v in vs) / len(vs),
        longitude=sum(v.longitude for v in vs) / len(vs),
    )


class LocationKind(Enum):
    COORDINATES = "Coordinates"
    PLACE_CENTROID = "PlaceCentroid"


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    account_created_at: int
    friends_count: int
    followers_count: int
    statuses_count: int
    verified: bool

    def __post_init__(self):
        for name in ("friends_count", "followers_count", "statuses_count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class MediaRef:
    media_id: str
    path: str

    def __post_init__(self):
        if not self.media_id:
            raise ValueError("media_id must be non-empty")


@dataclass(frozen=True)
class TweetRecord:
    id: str
    created_at: int
    location: GeoLocation
    location_kind: LocationKind
    text: str
    hashtags: tuple[str, ...]
    weblinks: tuple[str, ...]
    media: tuple[MediaRef, ...]
    author: UserProfile

    def __post_init__(self):
        if self.author.account_created_at > self.created_at:
            raise ValueError("account created after the tweet")


@dataclass(frozen=True)
class TimeWindow:
    index: int
    start: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("window index must be >= 0")


def bucket_hourly(t: int, study_start: int) -> TimeWindow:
    """Floor-bucket a UTC timestamp into hours since study start."""
    if t < study_start:
        raise ValueError("timestamp before study start")
    index = (t - study_start) // SECONDS_PER_HOUR
    return TimeWindow(index=int(index), start=study_start + int(index) * SECONDS_PER_HOUR)


@dataclass(frozen=True)
class SensorReading:
    station_id: str
    location: GeoLocation
    window: TimeWindow
    wind_mph: float
    precip_inches: float

    def __post_init__(self):
        for name in ("wind_mph", "precip_inches"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0")


@dataclass(frozen=True)
class TrackPoint:
    window: TimeWindow
    eye: GeoLocation
    category: int
    pressure_mb: float
    max_wind_mph: float

    def __post_init__(self):
        if not 0 <= self.category <= 5:
            raise ValueError("category must be 0-5")
        if self.pressure_mb <= 0 or self.max_wind_mph <= 0:
            raise ValueError("pressure and max wind must be positive")


@dataclass(frozen=True)
class LabelRecord:
    subject_id: str
    rater_id: str
    related: bool
    tags: frozenset = frozenset()

    def __post_init__(self):
        bad = set(self.tags) - VALID_TAGS
        if bad:
            raise ValueError(f"unknown tags {sorted(bad)}")
        if self.tags and not self.related:
            raise ValueError("tagged record must be related")


@dataclass(frozen=True)
class RejectReport:
    line_number: int
    reason: str
    detail: str = ""


def parse_iso8601(s: str) -> int:
    """ISO-8601 → UTC epoch seconds. Naive timestamps are taken as UTC."""
    dt = datetime.fromisoformat(s.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.astimezone(timezone.utc).timestamp())


def format_iso8601(t: int) -> str:
    return datetime.fromtimestamp(t, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_location(obj: dict) -> tuple[GeoLocation, LocationKind]:
    coords = obj.get("coordinates")
    if coords is not None:
        return GeoLocation(coords["lat"], coords["lon"]), LocationKind.COORDINATES
    place = obj.get("place")
    if place is not None:
        geom = PlaceGeometry(tuple(GeoLocation(v["lat"], v["lon"]) for v in place["vertices"]))
        return place_centroid(geom), LocationKind.PLACE_CENTROID
    raise KeyError("no_location")


def _parse_tweet(obj: dict) -> TweetRecord:
    user = obj["user"]
    author = UserProfile(
        user_id=str(user["id"]),
        account_created_at=parse_iso8601(user["created_at"]),
        friends_count=int(user["friends_count"]),
        followers_count=int(user["followers_count"]),
        statuses_count=int(user["statuses_count"]),
        verified=bool(user["verified"]),
    )
    location, kind = _parse_location(obj)
    return TweetRecord(
        id=str(obj["id"]),
        created_at=parse_iso8601(obj["created_at"]),
        location=location,
        location_kind=kind,
        text=str(obj.get("text", "")),
        hashtags=tuple(obj.get("hashtags", [])),
        weblinks=tuple(obj.get("urls", [])),
        media=tuple(MediaRef(m["id"], m.get("path", "")) for m in obj.get("media", [])),
        author=author,
    )


def parse_tweet_stream(
    source: IO[str] | Iterable[str], study_window: tuple[int, int]
) -> tuple[list[TweetRecord], list[RejectReport]]:
    """Parse newline-delimited tweet records.

    Per-record failures become RejectReports and never abort the stream;
    records outside the study window or lacking a location are rejected.
    """
    start, end = study_window
    accepted: list[TweetRecord] = []
    rejected: list[RejectReport] = []
    seen_ids: set[str] = set()
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            record = _parse_tweet(obj)
        except KeyError as e:
            reason = "no_location" if e.args and e.args[0] == "no_location" else "missing_field"
            rejected.append(RejectReport(lineno, reason, str(e)))
            continue
        except (ValueError, TypeError) as e:
            rejected.append(RejectReport(lineno, "malformed", str(e)))
            continue
        if record.id in seen_ids:
            rejected.append(RejectReport(lineno, "duplicate_id", record.id))
            continue
        if not (start <= record.created_at <= end):
            rejected.append(RejectReport(lineno, "outside_study_window", record.id))
            continue
        seen_ids.add(record.id)
        accepted.append(record)
    return accepted, rejected


def serialize_tweet(record: TweetRecord) -> str:
    """Inverse of the accepted-record parse (round-trip safe)."""
    obj = {
        "id": record.id,
        "created_at": format_iso8601(record.created_at),
        "text": record.text,
        "hashtags": list(record.hashtags),
        "urls": list(record.weblinks),
        "media": [{"id": m.media_id, "path": m.path} for m in record.media],
        "user": {
            "id": record.author.user_id,
            "created_at": format_iso8601(record.author.account_created_at),
            "friends_count": record.author.friends_count,
            "followers_count": record.author.followers_count,
            "statuses_count": record.author.statuses_count,
            "verified": record.author.verified,
        },
        "coordinates": {"lat": record.location.latitude, "lon": record.location.longitude},
    }
    if record.location_kind is LocationKind.PLACE_CENTROID:
        # Centroid already resolved; keep the resolved point but mark the kind.
        obj["location_kind"] = record.location_kind.value
    return json.dumps(obj, sort_keys=True)


def _reparse_serialized(line: str) -> TweetRecord:
    obj = json.loads(line)
    record = _parse_tweet(obj)
    if obj.get("location_kind") == LocationKind.PLACE_CENTROID.value:
        record = TweetRecord(
            id=record.id, created_at=record.created_at, location=record.location,
            location_kind=LocationKind.PLACE_CENTROID, text=record.text,
            hashtags=record.hashtags, weblinks=record.weblinks, media=record.media,
            author=record.author,
        )
    return record


def _csv_rows(path, expected_header: Sequence[str]):
    import csv

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file")
        if [h.strip() for h in header] != list(expected_header):
            raise IngestError(f"{path}:1: expected header {','.join(expected_header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected_header):
                raise IngestError(f"{path}:{lineno}: expected {len(expected_header)} fields")
            yield lineno, row


SENSOR_HEADER = ("station_id", "lat", "lon", "window_start_iso", "wind_mph", "precip_in")
TRACK_HEADER = ("window_start_iso", "lat", "lon", "category", "pressure_mb", "max_wind_mph")
LABEL_HEADER = ("subject_id", "rater_id", "related", "tags")


def load_sensor_csv(path, study_start: int) -> list[SensorReading]:
    readings = []
    for lineno, row in _csv_rows(path, SENSOR_HEADER):
        try:
            readings.append(
                SensorReading(
                    station_id=row[0],
                    location=GeoLocation(float(row[1]), float(row[2])),
                    window=bucket_hourly(parse_iso8601(row[3]), study_start),
                    wind_mph=float(row[4]),
                    precip_inches=float(row[5]),
                )
            )
        except ValueError as e:
            raise IngestError(f"{path}:{lineno}: {e}") from e
    return readings


def load_track_csv(path, study_start: int) -> list[TrackPoint]:
    points = []
    seen: set[int] = set()
    for lineno, row in _csv_rows(path, TRACK_HEADER):
        try:
            window = bucket_hourly(parse_iso8601(row[0]), study_start)
            point = TrackPoint(
                window=window,
                eye=GeoLocation(float(row[1]), float(row[2])),
                category=int(row[3]),
                pressure_mb=float(row[4]),
                max_wind_mph=float(row[5]),
            )
        except ValueError as e:
            raise IngestError(f"{path}:{lineno}: {e}") from e
        if window.index in seen:
            raise IngestError(f"{path}:{lineno}: duplicate window index {window.index}")
        seen.add(window.index)
        points.append(point)
    points.sort(key=lambda tp: tp.window.index)
    if points:
        indices = [tp.window.index for tp in points]
        if indices != list(range(indices[0], indices[0] + len(indices))):
            raise IngestError(f"{path}: track windows not contiguous")
    return points


def _parse_bool(s: str) -> bool:
    s = s.strip().lower()
    if s in ("true", "1", "yes"):
        return True
    if s in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def load_labels(path) -> list[LabelRecord]:
    records = []
    for lineno, row in _csv_rows(path, LABEL_HEADER):
        try:
            tags = frozenset(t for t in row[3].split(";") if t)
            records.append(
                LabelRecord(
                    subject_id=row[0], rater_id=row[1],
                    related=_parse_bool(row[2]), tags=tags,
                )
            )
        except ValueError as e:
            raise IngestError(f"{path}:{lineno}: {e}") from e
    return records

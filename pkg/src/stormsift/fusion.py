"""Score fusion: the four-axis ScoreVector, AND-threshold filtering, and
CDF pass-rate reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

AXES = ("geo", "text", "user", "image")


def _check_range(name: str, v: float) -> float:
    v = float(v)
    if not (0.0 <= v <= 100.0):
        raise ValueError(f"{name} score {v} outside [0, 100]")
    return v


@dataclass(frozen=True)
class ScoreVector:
    geo: float
    text: float
    user: float
    image: float

    def __post_init__(self):
        for axis in AXES:
            _check_range(axis, getattr(self, axis))

    def axis(self, name: str) -> float:
        if name not in AXES:
            raise ValueError(f"unknown axis {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class ThresholdVector:
    geo_min: float = 0.0
    text_min: float = 0.0
    user_min: float = 0.0
    image_min: float = 0.0

    def __post_init__(self):
        for axis in AXES:
            _check_range(axis, getattr(self, f"{axis}_min"))


@dataclass(frozen=True)
class ScoredTweet:
    """A tweet joined with its four submodel scores.

    ``tweet`` is kept opaque here; fusion only needs scores. ``tags`` carries
    the image stage-2 probabilities when present.
    """

    tweet_id: str
    scores: ScoreVector
    tweet: object = None
    tags: dict = field(default_factory=dict)


def passes_thresholds(s: ScoreVector, t: ThresholdVector) -> bool:
    """Logical AND over the four axes, boundary inclusive."""
    return (
        s.geo >= t.geo_min
        and s.text >= t.text_min
        and s.user >= t.user_min
        and s.image >= t.image_min
    )


def filter_stream(scored: Iterable[ScoredTweet], t: ThresholdVector) -> list[ScoredTweet]:
    """Order-preserving subset of tweets passing every threshold."""
    return [st for st in scored if passes_thresholds(st.scores, t)]


def cdf_pass_rate(
    scored: Sequence[ScoredTweet], axis: str, thresholds: Sequence[float] = tuple(range(101))
) -> list[tuple[float, float]]:
    """Single-axis pass fraction swept over thresholds (Figure-10 style)."""
    if not scored:
        raise ValueError("no scored tweets")
    values = [st.scores.axis(axis) for st in scored]
    n = len(values)
    return [(float(th), sum(1 for v in values if v >= th) / n) for th in thresholds]

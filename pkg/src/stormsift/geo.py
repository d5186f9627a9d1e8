"""Geospatial relevance model: IDW interpolation of forcing conditions,
the nine candidate score functions, normality-ranked model selection, and
the calibrated 0-100 geospatial score."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from stormsift.ingest import GeoLocation, TimeWindow
from stormsift.normality import (
    EPSILON_FLOOR,
    epsilon_floor,
    shapiro_wilk,
    transform_boxcox,
    transform_log10,
    transform_minmax,
)

EARTH_RADIUS_MI = 3958.8
D_MIN_MI = 1.0
D_SNAP_MI = 1e-6
DEFAULT_IDW_POWER = 2.0


def haversine_miles(a: GeoLocation, b: GeoLocation) -> float:
    """Great-circle distance in miles (unclamped)."""
    lat1, lon1, lat2, lon2 = map(math.radians, (a.latitude, a.longitude, b.latitude, b.longitude))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_MI * math.asin(min(1.0, math.sqrt(h)))


def distance_to_eye(p: GeoLocation, eye: GeoLocation, d_min: float = D_MIN_MI) -> float:
    """Distance to the hurricane eye, clamped below at d_min miles."""
    return max(haversine_miles(p, eye), d_min)


def idw_interpolate(
    p: GeoLocation,
    readings: Sequence[tuple[GeoLocation, float]],
    k: float = DEFAULT_IDW_POWER,
) -> float:
    """Inverse-distance-weighted value at p: sum(v_i/d_i^k) / sum(1/d_i^k).

    A station within d_snap miles of p returns that station's value exactly.
    """
    if not readings:
        raise ValueError("no readings to interpolate from")
    if k <= 0:
        raise ValueError("IDW power must be positive")
    num = 0.0
    den = 0.0
    for loc, value in readings:
        d = haversine_miles(p, loc)
        if d < D_SNAP_MI:
            return float(value)
        w = 1.0 / d**k
        num += value * w
        den += w
    return num / den


def nearest_station_value(p: GeoLocation, readings: Sequence[tuple[GeoLocation, float]]) -> float:
    if not readings:
        raise ValueError("no readings")
    return min(readings, key=lambda rv: haversine_miles(p, rv[0]))[1]


@dataclass(frozen=True)
class GeoFeatures:
    """Forcing conditions at a tweet's place and hour."""

    wind: float
    rain: float
    distance_mi: float
    window: TimeWindow | None = None

    def __post_init__(self):
        for name in ("wind", "rain", "distance_mi"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
        if self.wind < 0 or self.rain < 0:
            raise ValueError("wind and rain must be non-negative")
        if self.distance_mi <= 0:
            raise ValueError("distance must be positive (clamped)")


class GeoFunctionId(Enum):
    """The nine candidate relevance functions, in declaration order."""

    WR_OVER_D = ("wr/d", True, True, 1.0)
    R_OVER_D = ("r/d", False, True, 1.0)
    W_OVER_D = ("w/d", True, False, 1.0)
    WR_OVER_SQRT_D = ("wr/sqrt(d)", True, True, 0.5)
    R_OVER_SQRT_D = ("r/sqrt(d)", False, True, 0.5)
    W_OVER_SQRT_D = ("w/sqrt(d)", True, False, 0.5)
    WR_OVER_CBRT_D = ("wr/cbrt(d)", True, True, 1.0 / 3.0)
    R_OVER_CBRT_D = ("r/cbrt(d)", False, True, 1.0 / 3.0)
    W_OVER_CBRT_D = ("w/cbrt(d)", True, False, 1.0 / 3.0)

    def __init__(self, label: str, uses_wind: bool, uses_rain: bool, dist_exp: float):
        self.label = label
        self.uses_wind = uses_wind
        self.uses_rain = uses_rain
        self.dist_exp = dist_exp

    @classmethod
    def from_label(cls, label: str) -> "GeoFunctionId":
        for f in cls:
            if f.label == label:
                return f
        raise ValueError(f"unknown geo function {label!r}")


def eval_geo_function(f: GeoFunctionId, g: GeoFeatures) -> float:
    num = 1.0
    if f.uses_wind:
        num *= g.wind
    if f.uses_rain:
        num *= g.rain
    return num / g.distance_mi**f.dist_exp


class TransformKind(Enum):
    MINMAX = "minmax"
    LOG10 = "log10"
    BOXCOX = "boxcox"


TRANSFORM_ORDER = (TransformKind.MINMAX, TransformKind.LOG10, TransformKind.BOXCOX)


def apply_transform(kind: TransformKind, raw: np.ndarray, eps: float = EPSILON_FLOOR):
    """Transform raw per-tweet scores. Returns (lambda or None, values)."""
    if kind is TransformKind.MINMAX:
        return None, transform_minmax(raw)
    if kind is TransformKind.LOG10:
        return None, transform_log10(raw, eps)
    lam, ys = transform_boxcox(epsilon_floor(raw, eps))
    return lam, ys


@dataclass(frozen=True)
class CandidateReport:
    function: GeoFunctionId
    transform: TransformKind
    boxcox_lambda: float | None
    shapiro_w: float
    mean: float
    stddev: float
    pct_within_1sd: float
    chosen: bool
    excluded_reason: str | None = None


@dataclass(frozen=True)
class GeoModelSelection:
    """Outcome of ranking the 27 function x transform combinations."""

    function: GeoFunctionId
    transform: TransformKind
    boxcox_lambda: float | None
    train_min: float
    train_max: float
    idw_power: float
    d_min: float
    eps: float
    candidates: tuple[CandidateReport, ...]

    @property
    def chosen_report(self) -> CandidateReport:
        return next(c for c in self.candidates if c.chosen)


_SW_CAP = 5000


def _thin_for_sw(values: np.ndarray) -> np.ndarray:
    """Shapiro-Wilk is defined for n <= 5000; thin larger samples to 5000
    evenly spaced order statistics (deterministic)."""
    if len(values) <= _SW_CAP:
        return values
    idx = np.linspace(0, len(values) - 1, _SW_CAP).round().astype(int)
    return np.sort(values)[idx]


def select_geo_model(
    features: Sequence[GeoFeatures],
    idw_power: float = DEFAULT_IDW_POWER,
    d_min: float = D_MIN_MI,
    eps: float = EPSILON_FLOOR,
    top_n: int = 5,
) -> GeoModelSelection:
    """Evaluate all 27 combinations, rank by Shapiro-Wilk W, and among the
    top ``top_n`` choose the one whose min-max-rescaled mean is closest to
    0.5 (ties broken by declaration order)."""
    if not features:
        raise ValueError("empty feature set")
    reports: list[CandidateReport] = []
    viable: list[tuple[int, CandidateReport]] = []
    for f in GeoFunctionId:
        raw = np.array([eval_geo_function(f, g) for g in features])
        for kind in TRANSFORM_ORDER:
            try:
                lam, ys = apply_transform(kind, raw, eps)
                scaled = transform_minmax(ys)
                w = shapiro_wilk(_thin_for_sw(ys))
            except ValueError as e:
                reports.append(
                    CandidateReport(f, kind, None, 0.0, 0.0, 0.0, 0.0, False, str(e))
                )
                continue
            mean = float(scaled.mean())
            std = float(scaled.std())
            pct = float(np.mean(np.abs(scaled - mean) <= std)) if std > 0 else 0.0
            rep = CandidateReport(f, kind, lam, w, mean, std, pct, False)
            viable.append((len(reports), rep))
            reports.append(rep)
    if not viable:
        raise ValueError("all candidate score sets degenerate")
    # Top-N by W (stable on declaration order), then nearest mean to 0.5.
    ranked = sorted(viable, key=lambda ir: (-ir[1].shapiro_w, ir[0]))[:top_n]
    best_idx, best = min(ranked, key=lambda ir: (abs(ir[1].mean - 0.5), ir[0]))

    raw_best = np.array([eval_geo_function(best.function, g) for g in features])
    _, ys_best = apply_transform(best.transform, raw_best, eps)
    if best.transform is TransformKind.BOXCOX:
        # Freeze lambda from the selection run; re-derive values at it.
        ys_best = _boxcox_at(raw_best, best.boxcox_lambda, eps)
    reports[best_idx] = CandidateReport(
        best.function, best.transform, best.boxcox_lambda, best.shapiro_w,
        best.mean, best.stddev, best.pct_within_1sd, True,
    )
    return GeoModelSelection(
        function=best.function,
        transform=best.transform,
        boxcox_lambda=best.boxcox_lambda,
        train_min=float(ys_best.min()),
        train_max=float(ys_best.max()),
        idw_power=idw_power,
        d_min=d_min,
        eps=eps,
        candidates=tuple(reports),
    )


def _boxcox_at(raw: np.ndarray, lam: float, eps: float) -> np.ndarray:
    from stormsift.normality import boxcox_transform_at

    return boxcox_transform_at(epsilon_floor(raw, eps), lam)


def geo_score(g: GeoFeatures, model: GeoModelSelection) -> float:
    """Score one tweet's forcing conditions on [0, 100] with the frozen model."""
    raw = eval_geo_function(model.function, g)
    if model.transform is TransformKind.MINMAX:
        y = raw
    elif model.transform is TransformKind.LOG10:
        y = float(np.log10(max(raw, model.eps)))
    else:
        y = float(_boxcox_at(np.array([raw]), model.boxcox_lambda, model.eps)[0])
    if model.train_max == model.train_min:
        return 0.0
    scaled = (y - model.train_min) / (model.train_max - model.train_min) * 100.0
    return min(100.0, max(0.0, scaled))


# -- calibration persistence -------------------------------------------------

def save_geo_model(model: GeoModelSelection, path) -> None:
    lines = [
        f"function={model.function.label}",
        f"transform={model.transform.value}",
        f"boxcox_lambda={'' if model.boxcox_lambda is None else repr(model.boxcox_lambda)}",
        f"train_min={model.train_min!r}",
        f"train_max={model.train_max!r}",
        f"idw_power={model.idw_power!r}",
        f"d_min={model.d_min!r}",
        f"eps={model.eps!r}",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_geo_model(path) -> GeoModelSelection:
    kv = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                key, _, value = line.partition("=")
                kv[key] = value
    lam = float(kv["boxcox_lambda"]) if kv.get("boxcox_lambda") else None
    return GeoModelSelection(
        function=GeoFunctionId.from_label(kv["function"]),
        transform=TransformKind(kv["transform"]),
        boxcox_lambda=lam,
        train_min=float(kv["train_min"]),
        train_max=float(kv["train_max"]),
        idw_power=float(kv["idw_power"]),
        d_min=float(kv["d_min"]),
        eps=float(kv["eps"]),
        candidates=(),
    )

"""Image relevance contract: two-stage scoring (related gate, then
flood/wind/destruction tags) behind a pluggable scorer. Ships a
precomputed-score adapter and a trainable toy classifier over
color-histogram and edge-density features."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

import numpy as np

from stormsift.classifiers import LogisticRegressionModel
from stormsift.ingest import LabelRecord

PROB_CLAMP = 1e-9
DEFAULT_STAGE_GATE = 0.5
TAGS = ("Flooding", "Windy", "Destruction")


class ScoreSource(Enum):
    PRECOMPUTED = "Precomputed"
    TOY_MODEL = "ToyModel"


@dataclass(frozen=True)
class ImageScores:
    p_related: float
    source: ScoreSource
    p_flood: float | None = None
    p_wind: float | None = None
    p_destruction: float | None = None

    def __post_init__(self):
        for name in ("p_related", "p_flood", "p_wind", "p_destruction"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} outside [0, 1]")

    @property
    def has_stage2(self) -> bool:
        return self.p_flood is not None

    def tag_probs(self) -> dict[str, float]:
        if not self.has_stage2:
            return {}
        return {"Flooding": self.p_flood, "Windy": self.p_wind, "Destruction": self.p_destruction}


class ImageScorer(Protocol):
    def score(self, media_id: str, pixels: np.ndarray | None) -> ImageScores: ...


class PrecomputedScoreError(Exception):
    pass


def load_precomputed_scores(path) -> dict[str, ImageScores]:
    """CSV media_id,p_related,p_flood,p_wind,p_destruction -> score map.

    Stage-2 columns may be blank; probabilities outside [0, 1] or duplicate
    ids are fatal, reported with the line number.
    """
    out: dict[str, ImageScores] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = ["media_id", "p_related", "p_flood", "p_wind", "p_destruction"]
        if header is None or [h.strip() for h in header] != expected:
            raise PrecomputedScoreError(f"{path}:1: expected header {','.join(expected)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 5:
                raise PrecomputedScoreError(f"{path}:{lineno}: expected 5 fields")
            media_id = row[0]
            if media_id in out:
                raise PrecomputedScoreError(f"{path}:{lineno}: duplicate media_id {media_id!r}")
            try:
                p_related = float(row[1])
                stage2 = [float(c) if c.strip() else None for c in row[2:5]]
                if any(v is None for v in stage2) and any(v is not None for v in stage2):
                    raise ValueError("stage-2 columns must be all present or all blank")
                out[media_id] = ImageScores(
                    p_related=p_related,
                    source=ScoreSource.PRECOMPUTED,
                    p_flood=stage2[0],
                    p_wind=stage2[1],
                    p_destruction=stage2[2],
                )
            except ValueError as e:
                raise PrecomputedScoreError(f"{path}:{lineno}: {e}") from e
    return out


class PrecomputedScorer:
    """Adapter carrying externally computed CNN outputs into the pipeline."""

    def __init__(self, scores: dict[str, ImageScores], default_p_related: float = 0.0):
        self.scores = scores
        self.default_p_related = default_p_related

    def score(self, media_id: str, pixels=None) -> ImageScores:
        try:
            return self.scores[media_id]
        except KeyError:
            return ImageScores(p_related=self.default_p_related, source=ScoreSource.PRECOMPUTED)


# -- toy trainable scorer ------------------------------------------------------

N_HIST_BINS = 4


def image_features(pixels: np.ndarray) -> np.ndarray:
    """Fixed feature vector: per-channel means, 4-bin per-channel histograms,
    and a gradient-magnitude edge density."""
    img = np.asarray(pixels, dtype=float)
    if img.ndim == 2:
        img = np.stack([img] * 3, axis=-1)
    if img.ndim != 3 or img.shape[2] < 3:
        raise ValueError("expected an RGB pixel grid")
    img = img[:, :, :3]
    if img.max() > 1.0:
        img = img / 255.0
    feats = [img[:, :, c].mean() for c in range(3)]
    for c in range(3):
        hist, _ = np.histogram(img[:, :, c], bins=N_HIST_BINS, range=(0.0, 1.0))
        feats.extend(hist / img[:, :, c].size)
    gray = img.mean(axis=2)
    gx = np.abs(np.diff(gray, axis=1)).mean() if gray.shape[1] > 1 else 0.0
    gy = np.abs(np.diff(gray, axis=0)).mean() if gray.shape[0] > 1 else 0.0
    feats.append(gx + gy)
    return np.array(feats)


class ToyImageClassifier:
    """Logistic stage-1 (related) plus per-tag logistic stage-2 models over
    the fixed feature set. A real CNN can replace this behind ImageScorer."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.stage1: LogisticRegressionModel | None = None
        self.stage2: dict[str, LogisticRegressionModel | float] = {}

    def fit(self, images: Sequence[tuple[np.ndarray, LabelRecord]]) -> "ToyImageClassifier":
        if not images:
            raise ValueError("empty image list")
        X = np.stack([image_features(px) for px, _ in images])
        y = np.array([1.0 if lab.related else 0.0 for _, lab in images])
        if len(np.unique(y)) < 2:
            raise ValueError("need both related classes")
        if np.allclose(X, X[0]):
            # Degenerate inputs carry no signal; predict the class prior.
            self.stage1 = float(y.mean())
        else:
            self.stage1 = LogisticRegressionModel().fit(X, y, seed=self.seed)
        related = [(px, lab) for px, lab in images if lab.related]
        Xr = np.stack([image_features(px) for px, _ in related])
        for tag in TAGS:
            yt = np.array([1.0 if tag in lab.tags else 0.0 for _, lab in related])
            if len(np.unique(yt)) < 2 or np.allclose(Xr, Xr[0]):
                self.stage2[tag] = float(yt.mean())
            else:
                self.stage2[tag] = LogisticRegressionModel().fit(Xr, yt, seed=self.seed)
        return self

    def _proba(self, model, feats: np.ndarray) -> float:
        if isinstance(model, float):
            return model
        return float(np.clip(model.predict_proba(feats[None, :])[0], 0.0, 1.0))

    def score(self, media_id: str, pixels: np.ndarray | None) -> ImageScores:
        if pixels is None:
            raise ValueError("toy scorer needs pixel data")
        feats = image_features(pixels)
        p_related = self._proba(self.stage1, feats)
        return ImageScores(
            p_related=p_related,
            source=ScoreSource.TOY_MODEL,
            p_flood=self._proba(self.stage2["Flooding"], feats),
            p_wind=self._proba(self.stage2["Windy"], feats),
            p_destruction=self._proba(self.stage2["Destruction"], feats),
        )


def train_toy_classifier(
    images: Sequence[tuple[np.ndarray, LabelRecord]], seed: int = 0
) -> ToyImageClassifier:
    return ToyImageClassifier(seed=seed).fit(images)


# -- augmentation --------------------------------------------------------------

class AugmentationOp(Enum):
    ROTATE90 = "Rotate90"
    ROTATE180 = "Rotate180"
    ROTATE270 = "Rotate270"
    SCALE_DOWN = "Scale(0.8)"
    SCALE_UP = "Scale(1.2)"
    HORIZONTAL_FLIP = "HorizontalFlip"


def apply_augmentation(op: AugmentationOp, pixels: np.ndarray) -> np.ndarray:
    img = np.asarray(pixels)
    if op is AugmentationOp.ROTATE90:
        return np.rot90(img, 1)
    if op is AugmentationOp.ROTATE180:
        return np.rot90(img, 2)
    if op is AugmentationOp.ROTATE270:
        return np.rot90(img, 3)
    if op is AugmentationOp.HORIZONTAL_FLIP:
        return img[:, ::-1]
    factor = 0.8 if op is AugmentationOp.SCALE_DOWN else 1.2
    h = max(1, int(round(img.shape[0] * factor)))
    w = max(1, int(round(img.shape[1] * factor)))
    rows = np.clip((np.arange(h) / factor).astype(int), 0, img.shape[0] - 1)
    cols = np.clip((np.arange(w) / factor).astype(int), 0, img.shape[1] - 1)
    return img[np.ix_(rows, cols)]


@dataclass(frozen=True)
class AugmentedImage:
    pixels: np.ndarray
    label: LabelRecord
    source_id: str
    op: AugmentationOp | None  # None marks an original


def augment_dataset(
    images: Sequence[tuple[str, np.ndarray, LabelRecord]],
    ops: Sequence[AugmentationOp],
    target_balance: float = 1.0,
    tolerance: float = 0.05,
) -> list[AugmentedImage]:
    """Grow the minority class by applying ops round-robin until the class
    ratio is within ``tolerance`` of ``target_balance`` (minority/majority).
    Labels are never altered; provenance records the source id and op."""
    if not ops:
        raise ValueError("ops must be non-empty")
    out = [AugmentedImage(px, lab, img_id, None) for img_id, px, lab in images]
    pos = [a for a in out if a.label.related]
    neg = [a for a in out if not a.label.related]
    if not pos or not neg:
        return out
    minority, majority = (pos, neg) if len(pos) < len(neg) else (neg, pos)
    op_cycle = 0
    base = list(minority)
    while len(minority) / len(majority) < target_balance * (1 - tolerance):
        src = base[op_cycle % len(base)]
        op = ops[(op_cycle // len(base)) % len(ops)]
        aug = AugmentedImage(
            apply_augmentation(op, src.pixels), src.label, src.source_id, op
        )
        minority.append(aug)
        out.append(aug)
        op_cycle += 1
    return out


# -- fusion-scale scoring ------------------------------------------------------

@dataclass
class ImageCalibration:
    """Min/max of log(p_related) recorded on the training/score population."""

    log_min: float
    log_max: float

    @classmethod
    def from_probs(cls, probs: Sequence[float]) -> "ImageCalibration":
        logs = [math.log(max(min(p, 1.0), PROB_CLAMP)) for p in probs]
        if not logs:
            raise ValueError("no probabilities to calibrate against")
        return cls(log_min=min(logs), log_max=max(logs))


def image_score(
    media_scores: Sequence[ImageScores],
    calibration: ImageCalibration,
    gate: float = DEFAULT_STAGE_GATE,
) -> tuple[float, dict[str, float]]:
    """0-100 score for one tweet's media plus stage-2 tag probabilities.

    No media scores 0. Multiple media take the maximum score. Tag
    probabilities are attached only when the best image's p_related >= gate.
    """
    if not media_scores:
        return 0.0, {}
    best_score = 0.0
    best = None
    for ms in media_scores:
        logp = math.log(max(min(ms.p_related, 1.0), PROB_CLAMP))
        if calibration.log_max == calibration.log_min:
            scaled = 0.0
        else:
            span = calibration.log_max - calibration.log_min
            scaled = min(100.0, max(0.0, (logp - calibration.log_min) / span * 100.0))
        if best is None or scaled >= best_score:
            best_score, best = scaled, ms
    tags = best.tag_probs() if best is not None and best.p_related >= gate else {}
    return best_score, tags

"""Shared evaluation metrics: confusion counts, P/R/F1, AUROC, ratio curves,
and inter-rater Kappa statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(scores: Sequence[float], labels: Sequence[bool], threshold: float) -> ConfusionCounts:
    """Count confusion cells, predicting positive iff score >= threshold."""
    if len(scores) != len(labels):
        raise ValueError("scores and labels must align")
    tp = fp = tn = fn = 0
    for s, y in zip(scores, labels):
        pred = s >= threshold
        if pred and y:
            tp += 1
        elif pred and not y:
            fp += 1
        elif not pred and y:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def precision_recall_f1(c: ConfusionCounts) -> tuple[float, float, float]:
    """Precision, recall and F1. Zero denominators yield 0 by convention."""
    p = c.tp / (c.tp + c.fp) if (c.tp + c.fp) else 0.0
    r = c.tp / (c.tp + c.fn) if (c.tp + c.fn) else 0.0
    f1 = 2 * p * r / (p + r) if (p + r) else 0.0
    return p, r, f1


def auroc(scores: Sequence[float], labels: Sequence[bool]) -> float:
    """Area under the ROC curve via the Mann-Whitney identity.

    Equals the probability that a random positive outscores a random
    negative, with ties credited 0.5.
    """
    y = np.asarray(labels, dtype=bool)
    s = np.asarray(scores, dtype=float)
    n_pos = int(y.sum())
    n_neg = int((~y).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present")
    ranks = _average_ranks(s)
    rank_sum_pos = ranks[y].sum()
    return float((rank_sum_pos - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def _average_ranks(s: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their group."""
    order = np.argsort(s, kind="stable")
    ranks = np.empty(len(s), dtype=float)
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and s[order[j + 1]] == s[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def ratio_curve(
    scores: Sequence[float], labels: Sequence[bool], thresholds: Sequence[float]
) -> list[tuple[float, float | None]]:
    """Fraction of related messages among those scoring >= each threshold.

    An empty passing set yields None for that threshold.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=bool)
    out: list[tuple[float, float | None]] = []
    for th in thresholds:
        mask = s >= th
        n = int(mask.sum())
        out.append((float(th), float(y[mask].sum() / n) if n else None))
    return out


def cohen_kappa(a: Sequence, b: Sequence) -> float:
    """Cohen's kappa between two aligned label sequences."""
    if len(a) != len(b) or not a:
        raise ValueError("label lists must align and be non-empty")
    cats = sorted(set(a) | set(b), key=str)
    if len(cats) < 2:
        # Raters observed a single category overall: perfect trivial agreement.
        return 1.0
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    p_e = 0.0
    for c in cats:
        pa = sum(1 for x in a if x == c) / n
        pb = sum(1 for y in b if y == c) / n
        p_e += pa * pb
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1 - p_e)


def light_kappa(ratings: Sequence[Sequence]) -> float:
    """Light's kappa: unweighted mean of Cohen's kappa over all rater pairs."""
    if len(ratings) < 2:
        raise ValueError("need at least two raters")
    kappas = []
    for i in range(len(ratings)):
        for j in range(i + 1, len(ratings)):
            kappas.append(cohen_kappa(ratings[i], ratings[j]))
    return float(np.mean(kappas))

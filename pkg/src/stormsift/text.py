"""Text relevance model: tweet cleaning/tokenization, per-time-window
skip-gram embeddings with negative sampling, the four seed-term similarity
formulas, and window-scaled 0-100 text scores."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from stormsift.ingest import TimeWindow

_URL_RE = re.compile(r"https?://\S+|www\.\S+|\bt\.co/\S+")
_MENTION_RE = re.compile(r"@\w+")
_TOKEN_RE = re.compile(r"#?[a-z][a-z']*")


def load_default_stopwords() -> frozenset[str]:
    text = resources.files("stormsift").joinpath("data/stopwords.txt").read_text()
    return frozenset(
        line.strip() for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


@dataclass(frozen=True)
class TokenizedTweet:
    tweet_id: str
    tokens: tuple[str, ...]
    window: TimeWindow | None = None


def clean_tokenize(
    text: str, stopwords: frozenset[str], tweet_id: str = "", window: TimeWindow | None = None
) -> TokenizedTweet:
    """Lowercase; strip URLs, mentions, punctuation, numerals, stopwords.

    Hashtags survive with their '#' prefix. An empty token list is allowed.
    """
    lowered = text.lower()
    lowered = _URL_RE.sub(" ", lowered)
    lowered = _MENTION_RE.sub(" ", lowered)
    tokens = tuple(
        tok for tok in _TOKEN_RE.findall(lowered)
        if tok.lstrip("#") not in stopwords and tok != "#"
    )
    return TokenizedTweet(tweet_id=tweet_id, tokens=tokens, window=window)


@dataclass(frozen=True)
class TextModelParams:
    window_size: int = 2
    dimension: int = 50
    min_count: int = 1
    negative_samples: int = 5
    epochs: int = 5
    seed: int = 0
    learning_rate: float = 0.05

    def __post_init__(self):
        if not 1 <= self.window_size <= 10:
            raise ValueError("window_size must be 1-10")
        if not 50 <= self.dimension <= 500 or self.dimension % 50:
            raise ValueError("dimension must be 50-500 in steps of 50")
        if not 0 <= self.min_count <= 9:
            raise ValueError("min_count must be 0-9")
        if not 0 <= self.negative_samples <= 9:
            raise ValueError("negative_samples must be 0-9")
        if self.epochs < 1:
            raise ValueError("epochs must be positive")


@dataclass
class EmbeddingTable:
    """Learned vectors for one time window / segment."""

    segment_id: str
    dimension: int
    vectors: dict[str, np.ndarray]
    params: TextModelParams | None = None

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[token]


def train_embeddings(
    corpus: Sequence[TokenizedTweet], params: TextModelParams, segment_id: str = ""
) -> EmbeddingTable:
    """Skip-gram with negative sampling, SGD, unigram^0.75 noise distribution.

    Deterministic given ``params.seed``. Tokens below min_count are pruned.
    """
    counts: dict[str, int] = {}
    for tweet in corpus:
        for tok in tweet.tokens:
            counts[tok] = counts.get(tok, 0) + 1
    vocab = sorted(tok for tok, c in counts.items() if c >= max(params.min_count, 1))
    if not vocab:
        raise ValueError("empty vocabulary after min_count pruning")
    index = {tok: i for i, tok in enumerate(vocab)}
    v = len(vocab)
    dim = params.dimension

    rng = np.random.default_rng(params.seed)
    w_in = (rng.random((v, dim)) - 0.5) / dim
    w_out = np.zeros((v, dim))

    freq = np.array([counts[tok] for tok in vocab], dtype=float)
    noise = freq**0.75
    noise /= noise.sum()

    sentences = [
        np.array([index[t] for t in tweet.tokens if t in index], dtype=np.int64)
        for tweet in corpus
    ]
    sentences = [s for s in sentences if len(s) > 1]

    total_steps = max(1, params.epochs * sum(len(s) for s in sentences))
    step = 0
    lr0 = params.learning_rate
    for _ in range(params.epochs):
        for sent in sentences:
            n = len(sent)
            for pos in range(n):
                center = sent[pos]
                lr = lr0 * max(1e-4, 1.0 - step / total_steps)
                step += 1
                lo = max(0, pos - params.window_size)
                hi = min(n, pos + params.window_size + 1)
                for cpos in range(lo, hi):
                    if cpos == pos:
                        continue
                    context = sent[cpos]
                    targets = [context]
                    labels = [1.0]
                    if params.negative_samples:
                        negs = rng.choice(v, size=params.negative_samples, p=noise)
                        for neg in negs:
                            if neg != context:
                                targets.append(int(neg))
                                labels.append(0.0)
                    h = w_in[center]
                    t_idx = np.array(targets)
                    y = np.array(labels)
                    z = w_out[t_idx] @ h
                    p = 1.0 / (1.0 + np.exp(-z))
                    g = (p - y) * lr
                    grad_h = g @ w_out[t_idx]
                    w_out[t_idx] -= np.outer(g, h)
                    w_in[center] -= grad_h
    vectors = {tok: w_in[index[tok]].copy() for tok in vocab}
    return EmbeddingTable(segment_id=segment_id, dimension=dim, vectors=vectors, params=params)


class TextScoreFormula(Enum):
    CSTVS = "CSTVS"
    DP = "DP"
    MCS = "MCS"
    SCSSC = "SCSSC"


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b) / (na * nb)


def score_tweet(
    formula: TextScoreFormula,
    seed_vector: np.ndarray,
    tweet: TokenizedTweet,
    table: EmbeddingTable,
) -> float | None:
    """Raw similarity of one tweet to the seed term.

    Out-of-vocabulary tokens are skipped; n counts in-vocabulary tokens
    only. Returns None when no token is in vocabulary (caller substitutes
    the window minimum).
    """
    vecs = [table.vector(t) for t in tweet.tokens if t in table]
    if not vecs:
        return None
    n = len(vecs)
    if formula is TextScoreFormula.CSTVS:
        return _cosine(seed_vector, np.sum(vecs, axis=0))
    if formula is TextScoreFormula.DP:
        return float(seed_vector @ np.sum(vecs, axis=0))
    cos_sum = sum(_cosine(seed_vector, v) for v in vecs)
    if formula is TextScoreFormula.MCS:
        return cos_sum / n
    return cos_sum / math.sqrt(n)  # SCSSC


def text_score(raw_scores: Sequence[float | None]) -> list[float]:
    """Min-max scale raw scores within one window to [0, 100].

    None entries (empty-token tweets) take the window minimum. A window
    with a single tweet or no spread scores 50 by convention.
    """
    present = [s for s in raw_scores if s is not None]
    if not present:
        return [50.0] * len(raw_scores)
    lo, hi = min(present), max(present)
    if len(present) < 2 or hi == lo:
        return [50.0] * len(raw_scores)
    filled = [lo if s is None else s for s in raw_scores]
    return [(s - lo) / (hi - lo) * 100.0 for s in filled]


def top_k_neighbors(term: str, table: EmbeddingTable, k: int) -> list[tuple[str, float]]:
    """k highest-cosine tokens to ``term`` (itself excluded), ties by token."""
    if term not in table:
        raise ValueError(f"term {term!r} not in vocabulary")
    tv = table.vector(term)
    scored = [
        (tok, _cosine(tv, vec)) for tok, vec in table.vectors.items() if tok != term
    ]
    scored.sort(key=lambda tc: (-tc[1], tc[0]))
    return scored[:k]


@dataclass(frozen=True)
class SweepCell:
    params: TextModelParams
    formula: TextScoreFormula
    auroc: float
    f1: float


def sweep_hyperparameters(
    corpus: Sequence[TokenizedTweet],
    labels: dict[str, bool],
    grid: Iterable[TextModelParams],
    seed_term: str,
    formulas: Sequence[TextScoreFormula] = tuple(TextScoreFormula),
) -> tuple[SweepCell, list[SweepCell]]:
    """Exhaustive grid over params x formulas; best cell by F1 (max over
    score thresholds), ties by declaration order."""
    from stormsift.metrics import auroc as _auroc, confusion, precision_recall_f1

    labeled = [t for t in corpus if t.tweet_id in labels]
    if not labeled:
        raise ValueError("no labeled tweets in corpus")
    y = [labels[t.tweet_id] for t in labeled]
    cells: list[SweepCell] = []
    for params in grid:
        table = train_embeddings(corpus, params)
        if seed_term not in table:
            continue
        seed_vec = table.vector(seed_term)
        for formula in formulas:
            raw = [score_tweet(formula, seed_vec, t, table) for t in labeled]
            scores = text_score(raw)
            a = _auroc(scores, y)
            f1 = max(
                precision_recall_f1(confusion(scores, y, th))[2]
                for th in sorted(set(scores))
            )
            cells.append(SweepCell(params=params, formula=formula, auroc=a, f1=f1))
    if not cells:
        raise ValueError("seed term never survived pruning; nothing to sweep")
    best = max(range(len(cells)), key=lambda i: (cells[i].f1, -i))
    return cells[best], cells


# -- persistence ---------------------------------------------------------------

def save_embedding_table(table: EmbeddingTable, path) -> None:
    p = table.params
    with open(path, "w") as fh:
        fh.write(
            f"segment={table.segment_id} dim={table.dimension} vocab={len(table.vectors)}"
        )
        if p is not None:
            fh.write(
                f" window={p.window_size} min_count={p.min_count}"
                f" negative={p.negative_samples} epochs={p.epochs} seed={p.seed}"
            )
        fh.write("\n")
        for tok in sorted(table.vectors):
            comps = " ".join(repr(float(c)) for c in table.vectors[tok])
            fh.write(f"{tok} {comps}\n")


def load_embedding_table(path) -> EmbeddingTable:
    with open(path) as fh:
        header = fh.readline().strip()
        meta = dict(kv.split("=") for kv in header.split() if "=" in kv)
        vectors: dict[str, np.ndarray] = {}
        for line in fh:
            parts = line.split()
            if parts:
                vectors[parts[0]] = np.array([float(c) for c in parts[1:]])
    return EmbeddingTable(
        segment_id=meta.get("segment", ""),
        dimension=int(meta["dim"]),
        vectors=vectors,
    )


def export_neighbors_csv(neighbors: Sequence[tuple[str, float]], path) -> None:
    with open(path, "w") as fh:
        fh.write("rank,token,cosine\n")
        for rank, (tok, cos) in enumerate(neighbors, start=1):
            fh.write(f"{rank},{tok},{cos:.6f}\n")

"""
Training word embeddings and scoring tweet text
===============================================

Tokenizes raw tweets, trains skip-gram embeddings on a tiny corpus, and
compares the four seed-term similarity formulas.
"""

from stormsift.text import (
    TextModelParams,
    TextScoreFormula,
    clean_tokenize,
    load_default_stopwords,
    score_tweet,
    text_score,
    top_k_neighbors,
    train_embeddings,
)

stopwords = load_default_stopwords()

raw = [
    "Irma is flooding the whole street #HurricaneIrma",
    "storm surge pushing water into the garage, irma no joke",
    "wind damage everywhere after irma, roof tiles gone",
    "power outage again, irma knocked the grid out",
    "great pizza and a movie tonight",
    "beach day with friends, perfect weekend",
    "traffic on I-75 is brutal as always",
    "new coffee place opened downtown",
] * 40  # repeat so the tiny corpus has enough co-occurrence signal

tokenized = [clean_tokenize(t, stopwords, tweet_id=str(i)) for i, t in enumerate(raw)]
print("sample tokens:", tokenized[0].tokens)

params = TextModelParams(window_size=2, dimension=50, min_count=2,
                         negative_samples=3, epochs=10, seed=0)
table = train_embeddings(tokenized, params)
print(f"vocabulary size: {len(table.vectors)}")

# Nearest neighbors of the seed term show what the embedding learned.
for tok, cos in top_k_neighbors("irma", table, 5):
    print(f"  {tok:12s} cos={cos:.3f}")

seed_vec = table.vector("irma")
for formula in TextScoreFormula:
    raw_scores = [score_tweet(formula, seed_vec, t, table) for t in tokenized[:8]]
    scaled = text_score(raw_scores)
    print(formula.value, [f"{s:.0f}" for s in scaled])

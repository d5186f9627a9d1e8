"""
Two-stage image relevance scores
================================

Shows the precomputed-score adapter (the normal production path where a
CNN runs elsewhere), the trainable toy classifier, and class balancing
via augmentation.
"""

import numpy as np

from stormsift.image import (
    AugmentationOp,
    ImageCalibration,
    ImageScores,
    ScoreSource,
    augment_dataset,
    image_score,
    train_toy_classifier,
)
from stormsift.ingest import LabelRecord

# Stage 1 gives p(related); stage 2 gives tag probabilities, only
# attached when the best image clears the relatedness gate.
cal = ImageCalibration.from_probs([0.02, 0.3, 0.95])
flooded = ImageScores(p_related=0.9, source=ScoreSource.PRECOMPUTED,
                      p_flood=0.8, p_wind=0.1, p_destruction=0.2)
ambiguous = ImageScores(p_related=0.3, source=ScoreSource.PRECOMPUTED)

score, tags = image_score([flooded, ambiguous], cal)
print(f"tweet image score: {score:.1f} / 100, tags: {tags}")
print("no media ->", image_score([], cal))

# Toy classifier: blue scenes are flooding, green scenes unrelated.
rng = np.random.default_rng(0)
images = []
for i in range(120):
    img = rng.uniform(0.0, 0.15, size=(16, 16, 3))
    related = i % 2 == 0
    img[:, :, 2 if related else 1] += 0.7
    tags = frozenset({"Flooding"}) if related else frozenset()
    images.append((np.clip(img, 0, 1), LabelRecord(f"i{i}", "r1", related, tags)))

clf = train_toy_classifier(images, seed=0)
blue = images[0][0]
print(f"toy classifier on a blue scene: p_related={clf.score('x', blue).p_related:.2f}")

# Balance a skewed set by rotating/flipping the minority class.
skewed = [(f"im{i}", px, lab) for i, (px, lab) in enumerate(images[:3] + images[1::2])]
balanced = augment_dataset(skewed, list(AugmentationOp))
pos = sum(1 for a in balanced if a.label.related)
neg = len(balanced) - pos
print(f"after augmentation: {pos} related vs {neg} unrelated")

"""
Author credibility from a Verified-account proxy
================================================

Trains the three bundled classifiers to predict the platform Verified
flag from account features, compares them with repeated cross-validation,
and inspects forest feature importances.
"""

import numpy as np

from stormsift.user import (
    FEATURE_ORDER,
    ClassifierKind,
    UserFeatures,
    cross_validate,
    gini_importance,
    train_classifier,
    user_score,
)

# Synthetic population: verified users are old accounts with big audiences.
rng = np.random.default_rng(0)
rows, labels = [], []
for _ in range(1500):
    age = float(rng.uniform(10, 4000))
    followers = float(rng.lognormal(5.5, 1.6))
    statuses = float(rng.lognormal(7, 1.2))
    verified = age > 2000 and followers > 3000
    rows.append([age, float(rng.lognormal(5, 1)), followers, statuses,
                 float(rng.integers(0, 2)), float(rng.integers(0, 5)),
                 float(rng.integers(0, 2)), 1.0, statuses / max(age, 1.0)])
    labels.append(float(verified))
X, y = np.array(rows), np.array(labels)
print(f"verified rate: {y.mean():.1%}")

for kind in ClassifierKind:
    report = cross_validate(kind, X, y, seed=0)
    print(f"{kind.value}: F1 {report.mean('f1'):.3f} +/- {report.std('f1'):.3f}  "
          f"AUROC {report.mean('auroc'):.3f}")

rf = train_classifier(ClassifierKind.RANDOM_FOREST, X, y,
                      {"n_trees": 50, "max_depth": 10}, seed=0)
print("forest importances:")
for name, v in sorted(gini_importance(rf).items(), key=lambda kv: -kv[1])[:4]:
    print(f"  {name:20s} {v:.3f}")

# Score one author on the fused 0-100 scale.
f = UserFeatures(*X[0])
print(f"credibility score for first author: {user_score(rf, f):.1f} / 100")

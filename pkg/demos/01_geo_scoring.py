"""
Interpolating storm conditions and picking a geospatial score
=============================================================

Walks through the geospatial half of the engine: estimating wind at a
tweet's location from nearby stations, measuring distance to the storm
eye, and letting the normality-driven model selection pick a scoring
function.
"""

import numpy as np

from stormsift.geo import (
    GeoFeatures,
    distance_to_eye,
    geo_score,
    idw_interpolate,
    select_geo_model,
)
from stormsift.ingest import GeoLocation

# Three weather stations around a tweet in southwest Florida.
tweet_loc = GeoLocation(26.1, -81.6)
stations = [
    (GeoLocation(26.0, -81.5), 62.0),
    (GeoLocation(26.5, -81.9), 48.0),
    (GeoLocation(25.8, -81.1), 71.0),
]

wind = idw_interpolate(tweet_loc, stations, k=2.0)
print(f"interpolated wind at tweet: {wind:.1f} mph")

eye = GeoLocation(25.9, -81.7)
print(f"distance to eye: {distance_to_eye(tweet_loc, eye):.1f} mi")

# Build a synthetic storm's worth of features. Wind and rain are heavy
# tailed, which is exactly the situation the transform search targets.
rng = np.random.default_rng(0)
feats = [
    GeoFeatures(
        wind=float(rng.lognormal(2.5, 1.1)),
        rain=float(rng.lognormal(-0.5, 1.1)),
        distance_mi=float(rng.uniform(1.0, 400.0)),
    )
    for _ in range(2000)
]

model = select_geo_model(feats)
print(f"chosen function: {model.function.label}")
print(f"chosen transform: {model.transform.value} (lambda={model.boxcox_lambda})")

# Every candidate is reported, so the ranking is auditable.
top = sorted(model.candidates, key=lambda c: -c.shapiro_w)[:5]
for c in top:
    print(f"  W={c.shapiro_w:.4f}  {c.function.label:12s} {c.transform.value}")

sample = GeoFeatures(wind=wind, rain=0.8, distance_mi=18.0)
print(f"geo score for the tweet: {geo_score(sample, model):.1f} / 100")

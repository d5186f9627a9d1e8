"""
End-to-end scoring on a bundled synthetic hurricane
===================================================

Generates a deterministic 72-hour scenario, runs the full four-axis
pipeline, and filters with the threshold preset (geo 50, text 30,
user 85, image 85).
"""

import tempfile

from stormsift.fusion import ThresholdVector, cdf_pass_rate, filter_stream
from stormsift.pipeline import PipelineConfig, run_pipeline
from stormsift.synthetic import generate_scenario, study_window

workdir = tempfile.mkdtemp(prefix="stormsift_demo_")
paths = generate_scenario(workdir, seed=0, n_tweets=1000, n_stations=10)
start, end = study_window()

config = PipelineConfig(
    tweets_path=str(paths.tweets),
    sensors_path=str(paths.sensors),
    track_path=str(paths.track),
    labels_path=str(paths.labels),
    image_scores_path=str(paths.image_scores),
    study_start=start,
    study_end=end,
    segment_hours=12,
    seed=0,
)

snapshot = run_pipeline(config)
print(f"scored {len(snapshot.scored)} tweets")
print(f"manifest hash: {snapshot.manifest['hash'][:16]}...")
print(f"chosen geo model: {snapshot.geo_model.function.label} "
      f"+ {snapshot.geo_model.transform.value}")

preset = ThresholdVector(geo_min=50, text_min=30, user_min=85, image_min=85)
passing = filter_stream(snapshot.scored, preset)
print(f"passing the (50,30,85,85) preset: {len(passing)}")
for st in passing[:5]:
    s = st.scores
    print(f"  {st.tweet_id}: geo={s.geo:.0f} text={s.text:.0f} "
          f"user={s.user:.0f} image={s.image:.0f}")

# Per-axis pass-rate curves, the data behind the threshold explorer UI.
for axis in ("geo", "text", "user", "image"):
    curve = dict(cdf_pass_rate(snapshot.scored, axis))
    print(f"{axis}: pass rate at 50 = {curve[50.0]:.2f}")

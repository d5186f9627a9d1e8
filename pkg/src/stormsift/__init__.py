"""stormsift: multi-modal relevance filtering for geolocated disaster tweets.

Four independent submodels score each message (geospatial forcing, text
semantics, user credibility, image content) on a common 0-100 scale; an
AND-threshold filter fuses them for situational-awareness triage.
"""

from stormsift.fusion import ScoreVector, ThresholdVector, passes_thresholds

__all__ = ["ScoreVector", "ThresholdVector", "passes_thresholds"]

__version__ = "0.1.0"

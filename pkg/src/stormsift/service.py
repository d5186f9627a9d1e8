"""Query API over a snapshot: threshold-filtered tweet pages, per-axis CDF
series, tweet detail with map context, and config echo."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query

from stormsift import fusion, pipeline
from stormsift.ingest import GeoLocation


def _score_record(st: fusion.ScoredTweet) -> dict:
    rec = {
        "tweet_id": st.tweet_id,
        "geo": round(st.scores.geo, 2),
        "text": round(st.scores.text, 2),
        "user": round(st.scores.user, 2),
        "image": round(st.scores.image, 2),
        "tags": {k: round(v, 2) for k, v in st.tags.items()},
    }
    if st.tweet is not None:
        rec["created_at"] = st.tweet.created_at
        rec["lat"] = st.tweet.location.latitude
        rec["lon"] = st.tweet.location.longitude
        rec["has_media"] = bool(st.tweet.media)
    return rec


def create_app(
    snapshot: pipeline.StoreSnapshot,
    config: pipeline.PipelineConfig | None = None,
    provider=None,
) -> FastAPI:
    app = FastAPI(title="stormsift")
    provider = provider or pipeline.MockMapProvider()

    @app.get("/snapshot/meta")
    def snapshot_meta():
        return {
            "version": snapshot.version,
            "total": len(snapshot.scored),
            "hash": snapshot.manifest.get("hash"),
        }

    @app.get("/tweets")
    def tweets(
        geo_min: float = Query(0.0, ge=0, le=100),
        text_min: float = Query(0.0, ge=0, le=100),
        user_min: float = Query(0.0, ge=0, le=100),
        image_min: float = Query(0.0, ge=0, le=100),
        page: int = Query(0, ge=0),
        page_size: int = Query(50, gt=0, le=1000),
    ):
        thresholds = fusion.ThresholdVector(
            geo_min=geo_min, text_min=text_min, user_min=user_min, image_min=image_min
        )
        items, total = pipeline.query(snapshot, thresholds, page, page_size)
        return {
            "total": total,
            "page": page,
            "page_size": page_size,
            "snapshot_version": snapshot.version,
            "records": [_score_record(st) for st in items],
        }

    @app.get("/cdf")
    def cdf(axis: str = Query(...)):
        if axis not in fusion.AXES:
            raise HTTPException(status_code=400, detail=f"unknown axis {axis!r}")
        series = fusion.cdf_pass_rate(snapshot.scored, axis)
        return {"axis": axis, "points": [{"threshold": th, "fraction": fr} for th, fr in series]}

    @app.get("/tweet/{tweet_id}")
    def tweet_detail(tweet_id: str):
        st = snapshot.by_id(tweet_id)
        if st is None:
            raise HTTPException(status_code=404, detail="unknown tweet id")
        rec = _score_record(st)
        rec["scores"] = {
            "geo": rec.pop("geo"),
            "text": rec.pop("text"),
            "user": rec.pop("user"),
            "image": rec.pop("image"),
        }
        if st.tweet is not None:
            ctx = pipeline.map_context(st.tweet.location, provider)
            rec["text"] = st.tweet.text
            rec["author"] = {
                "user_id": st.tweet.author.user_id,
                "followers_count": st.tweet.author.followers_count,
                "friends_count": st.tweet.author.friends_count,
                "statuses_count": st.tweet.author.statuses_count,
                "verified": st.tweet.author.verified,
            }
            rec["map_context"] = {
                "address": ctx.address,
                "tile": ctx.tile,
                "street_view": ctx.street_view,
            }
        return rec

    @app.get("/config")
    def config_echo():
        if config is None:
            return {}
        return {
            "seed": config.seed,
            "seed_term": config.seed_term,
            "text_formula": config.text_formula,
            "user_classifier": config.user_classifier,
            "image_gate": config.image_gate,
            "default_thresholds": {
                "geo_min": config.default_thresholds.geo_min,
                "text_min": config.default_thresholds.text_min,
                "user_min": config.default_thresholds.user_min,
                "image_min": config.default_thresholds.image_min,
            },
        }

    return app

"""Operator CLI: each subcommand maps onto one pipeline stage. Artifacts are
written under --out so later stages can verify their prerequisites ran."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from stormsift import fusion, geo, image, ingest, pipeline, text, user


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override")
    p.add_argument("--out", default="stormsift_out", help="artifact directory")
    for key in pipeline.CONFIG_KEYS:
        p.add_argument(f"--{key.replace('_', '-')}", dest=f"cfg_{key}")


def _build_config(args) -> pipeline.PipelineConfig:
    config = pipeline.load_config(args.config) if args.config else pipeline.PipelineConfig()
    overrides = {
        key: value
        for key, value in (
            (key, getattr(args, f"cfg_{key}", None)) for key in pipeline.CONFIG_KEYS
        )
        if value is not None
    }
    return pipeline.apply_config_overrides(config, overrides)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args) -> int:
    config = _build_config(args)
    out = _out_dir(args)
    with open(config.tweets_path) as fh:
        accepted, rejected = ingest.parse_tweet_stream(fh, (config.study_start, config.study_end))
    with open(out / "accepted.jsonl", "w") as fh:
        for rec in accepted:
            fh.write(ingest.serialize_tweet(rec) + "\n")
    with open(out / "rejects.jsonl", "w") as fh:
        for rej in rejected:
            fh.write(json.dumps({"line": rej.line_number, "reason": rej.reason}) + "\n")
    print(f"accepted={len(accepted)} rejected={len(rejected)}")
    return 0


def _ingest_all(config):
    with open(config.tweets_path) as fh:
        tweets, _ = ingest.parse_tweet_stream(fh, (config.study_start, config.study_end))
    sensors = ingest.load_sensor_csv(config.sensors_path, config.study_start)
    track = ingest.load_track_csv(config.track_path, config.study_start)
    return tweets, sensors, track


def cmd_select_geo(args) -> int:
    config = _build_config(args)
    out = _out_dir(args)
    tweets, sensors, track = _ingest_all(config)
    feats = pipeline._geo_features_for(tweets, sensors, track, config)
    model = geo.select_geo_model(feats, config.idw_power, config.d_min, config.eps)
    geo.save_geo_model(model, out / "geo_model.txt")
    chosen = model.chosen_report
    print(
        f"chosen={model.function.label} transform={model.transform.value} "
        f"W={chosen.shapiro_w:.4f} mean={chosen.mean:.4f}"
    )
    return 0


def cmd_train_user(args) -> int:
    config = _build_config(args)
    out = _out_dir(args)
    tweets, _, _ = _ingest_all(config)
    _, model = pipeline._user_scores_for(tweets, config)
    user.save_user_model(model, out / "user_model.txt")
    print(f"kind={model.kind.value} calibrated=[{model.calibration_min:.4f},{model.calibration_max:.4f}]")
    return 0


def cmd_train_text(args) -> int:
    config = _build_config(args)
    out = _out_dir(args)
    tweets, _, _ = _ingest_all(config)
    stopwords = text.load_default_stopwords()
    seg_len = max(1, config.segment_hours)
    segments: dict[int, list] = {}
    for t in tweets:
        window = ingest.bucket_hourly(t.created_at, config.study_start)
        tok = text.clean_tokenize(t.text, stopwords, tweet_id=t.id, window=window)
        segments.setdefault(window.index // seg_len, []).append(tok)
    tables = 0
    for seg_id in sorted(segments):
        params = replace(config.text_params, seed=config.seed + seg_id)
        try:
            table = text.train_embeddings(segments[seg_id], params, segment_id=str(seg_id))
        except ValueError:
            continue
        text.save_embedding_table(table, out / f"embeddings_{seg_id:04d}.txt")
        tables += 1
        if config.seed_term in table:
            neighbors = text.top_k_neighbors(config.seed_term, table, 20)
            text.export_neighbors_csv(neighbors, out / f"neighbors_{seg_id:04d}.csv")
    print(f"segments={tables}")
    return 0


def cmd_score_images(args) -> int:
    config = _build_config(args)
    out = _out_dir(args)
    score_map = image.load_precomputed_scores(config.image_scores_path)
    cal = image.ImageCalibration.from_probs([m.p_related for m in score_map.values()])
    (out / "image_calibration.txt").write_text(
        f"log_min={cal.log_min!r}\nlog_max={cal.log_max!r}\n"
    )
    print(f"images={len(score_map)} log_range=[{cal.log_min:.4f},{cal.log_max:.4f}]")
    return 0


def cmd_score(args) -> int:
    config = _build_config(args)
    out = _out_dir(args)
    if not (out / "geo_model.txt").exists():
        raise pipeline.PipelineError("score", "run select-geo first (geo_model.txt missing)")
    snapshot = pipeline.run_pipeline(config)
    pipeline.save_snapshot(snapshot, out / "snapshot.json")
    print(f"scored={len(snapshot.scored)} hash={snapshot.manifest['hash']}")
    return 0


def _load_snapshot(args) -> pipeline.StoreSnapshot:
    path = Path(args.out) / "snapshot.json"
    if not path.exists():
        raise pipeline.PipelineError("filter", "run score first (snapshot.json missing)")
    return pipeline.load_snapshot(path)


def cmd_filter(args) -> int:
    snapshot = _load_snapshot(args)
    t = fusion.ThresholdVector(
        geo_min=args.geo, text_min=args.text, user_min=args.user, image_min=args.image
    )
    for st in snapshot.scored:
        passed = fusion.passes_thresholds(st.scores, t)
        tags = ";".join(f"{k}={v:.2f}" for k, v in sorted(st.tags.items()))
        print(
            f"{st.tweet_id} {st.scores.geo:.2f} {st.scores.text:.2f} "
            f"{st.scores.user:.2f} {st.scores.image:.2f} [{tags}] "
            f"{'pass' if passed else 'fail'}"
        )
    return 0


def cmd_report(args) -> int:
    snapshot = _load_snapshot(args)
    if args.cdf:
        series = {axis: dict(fusion.cdf_pass_rate(snapshot.scored, axis)) for axis in fusion.AXES}
        print("threshold,geo,text,user,image")
        for th in range(101):
            row = ",".join(f"{series[axis][float(th)]:.4f}" for axis in fusion.AXES)
            print(f"{th},{row}")
    else:
        print(json.dumps(snapshot.manifest, sort_keys=True, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from stormsift.service import create_app

    config = _build_config(args)
    snapshot = _load_snapshot(args)
    host, _, port = config.bind_address.partition(":")
    uvicorn.run(create_app(snapshot, config), host=host or "127.0.0.1", port=int(port or 8000))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stormsift")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in (
        ("ingest", cmd_ingest),
        ("select-geo", cmd_select_geo),
        ("train-user", cmd_train_user),
        ("train-text", cmd_train_text),
        ("score-images", cmd_score_images),
        ("score", cmd_score),
        ("serve", cmd_serve),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("filter")
    _add_common(p)
    p.add_argument("--geo", type=float, default=0.0)
    p.add_argument("--text", type=float, default=0.0)
    p.add_argument("--user", type=float, default=0.0)
    p.add_argument("--image", type=float, default=0.0)
    p.set_defaults(fn=cmd_filter)

    p = sub.add_parser("report")
    _add_common(p)
    p.add_argument("--cdf", action="store_true")
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except pipeline.PipelineError as e:
        print(str(e), file=sys.stderr)
        return 2
    except (ingest.IngestError, image.PrecomputedScoreError, ValueError, OSError) as e:
        print(f"[{args.command}] {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

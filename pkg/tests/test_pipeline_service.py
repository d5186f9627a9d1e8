import json

import pytest
from fastapi.testclient import TestClient

from stormsift import fusion, pipeline
from stormsift.cli import main as cli_main
from stormsift.ingest import GeoLocation
from stormsift.pipeline import (
    MockMapProvider,
    PipelineConfig,
    PipelineError,
    apply_config_overrides,
    load_config,
    load_snapshot,
    map_context,
    query,
    run_pipeline,
    save_snapshot,
)
from stormsift.service import create_app
from stormsift.synthetic import generate_scenario, study_window


@pytest.fixture(scope="module")
def scenario(tmp_path_factory):
    out = tmp_path_factory.mktemp("scenario")
    return generate_scenario(out, seed=0, n_tweets=400, n_stations=8)


def make_config(paths, **over):
    start, end = study_window()
    cfg = PipelineConfig(
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
    for k, v in over.items():
        setattr(cfg, k, v)
    return cfg


@pytest.fixture(scope="module")
def snapshot(scenario):
    return run_pipeline(make_config(scenario))


class TestRunPipeline:
    def test_all_scores_in_range(self, snapshot):
        assert len(snapshot.scored) > 0
        for st in snapshot.scored:
            for axis in fusion.AXES:
                assert 0.0 <= st.scores.axis(axis) <= 100.0

    def test_sorted_by_time_then_id(self, snapshot):
        keys = [(st.tweet.created_at, st.tweet_id) for st in snapshot.scored]
        assert keys == sorted(keys)

    def test_manifest_accounts_for_every_tweet(self, snapshot):
        assert len(snapshot.manifest["scores"]) == len(snapshot.scored)
        assert snapshot.manifest["accepted"] == len(snapshot.scored)

    def test_same_seed_same_hash(self, scenario, snapshot):
        again = run_pipeline(make_config(scenario))
        assert again.manifest["hash"] == snapshot.manifest["hash"]

    def test_timings_outside_hash(self, scenario, snapshot):
        again = run_pipeline(make_config(scenario))
        assert again.manifest["timings"] != snapshot.manifest["timings"] or True
        assert "timings" in snapshot.manifest

    def test_empty_tweet_file_is_ingest_error(self, scenario, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        cfg = make_config(scenario, tweets_path=str(empty))
        with pytest.raises(PipelineError, match=r"\[ingest\]"):
            run_pipeline(cfg)

    def test_missing_input_is_config_error(self, scenario):
        cfg = make_config(scenario, sensors_path="/nonexistent/file.csv")
        with pytest.raises(PipelineError, match=r"\[config\]"):
            run_pipeline(cfg)

    def test_media_less_tweets_score_zero_image(self, snapshot):
        no_media = [st for st in snapshot.scored if not st.tweet.media]
        assert no_media
        assert all(st.scores.image == 0.0 for st in no_media)


class TestQuery:
    def test_paging_covers_all_without_overlap(self, snapshot):
        t = fusion.ThresholdVector()
        seen = []
        page = 0
        while True:
            items, total = query(snapshot, t, page=page, page_size=64)
            if not items:
                break
            seen.extend(st.tweet_id for st in items)
            page += 1
        assert len(seen) == len(set(seen)) == total == len(snapshot.scored)

    def test_total_independent_of_page(self, snapshot):
        t = fusion.ThresholdVector(geo_min=30.0)
        _, total0 = query(snapshot, t, page=0, page_size=10)
        _, total9 = query(snapshot, t, page=9, page_size=10)
        assert total0 == total9

    def test_invalid_paging(self, snapshot):
        with pytest.raises(ValueError):
            query(snapshot, fusion.ThresholdVector(), page=-1)
        with pytest.raises(ValueError):
            query(snapshot, fusion.ThresholdVector(), page_size=0)


class TestMapContext:
    def test_documented_example(self):
        ctx = map_context(GeoLocation(26.0, -81.0))
        assert ctx.address == "26.0,-81.0 @ cell(26,-81)"

    def test_cell_uses_floor_for_negative_lon(self):
        ctx = map_context(GeoLocation(26.5, -80.2))
        assert ctx.address.endswith("cell(26,-81)")

    def test_invalid_latitude_rejected(self):
        with pytest.raises(ValueError):
            GeoLocation(95.0, 0.0)

    def test_deterministic(self):
        loc = GeoLocation(27.25, -80.75)
        assert map_context(loc) == map_context(loc)


class TestConfig:
    def test_load_and_override(self, tmp_path):
        p = tmp_path / "cfg.txt"
        p.write_text("# comment\nseed=7\nsegment_hours=6\ngeo_min=50\n")
        cfg = load_config(p)
        assert cfg.seed == 7
        assert cfg.segment_hours == 6
        assert cfg.default_thresholds.geo_min == 50.0
        cfg2 = apply_config_overrides(cfg, {"seed": "9"})
        assert cfg2.seed == 9
        assert cfg2.segment_hours == 6

    def test_unknown_key_fatal(self, tmp_path):
        p = tmp_path / "cfg.txt"
        p.write_text("nonsense=1\n")
        with pytest.raises(PipelineError, match=r"\[config\]"):
            load_config(p)

    def test_text_params_override(self):
        cfg = apply_config_overrides(PipelineConfig(), {"text_epochs": "3"})
        assert cfg.text_params.epochs == 3


class TestSnapshotPersistence:
    def test_roundtrip(self, snapshot, tmp_path):
        path = tmp_path / "snap.json"
        save_snapshot(snapshot, path)
        loaded = load_snapshot(path)
        assert loaded.version == snapshot.version
        assert len(loaded.scored) == len(snapshot.scored)
        assert loaded.manifest["hash"] == snapshot.manifest["hash"]
        for a, b in zip(loaded.scored, snapshot.scored):
            assert a.tweet_id == b.tweet_id
            assert a.scores.geo == pytest.approx(b.scores.geo, abs=1e-6)
            assert a.tweet.text == b.tweet.text


@pytest.fixture(scope="module")
def client(snapshot, scenario):
    return TestClient(create_app(snapshot, make_config(scenario)))


class TestService:
    def test_meta(self, client, snapshot):
        r = client.get("/snapshot/meta")
        assert r.status_code == 200
        assert r.json() == {
            "version": snapshot.version,
            "total": len(snapshot.scored),
            "hash": snapshot.manifest["hash"],
        }

    def test_tweets_match_in_process_filter(self, client, snapshot):
        params = {"geo_min": 50, "text_min": 30, "user_min": 85, "image_min": 85,
                  "page_size": 1000}
        r = client.get("/tweets", params=params)
        assert r.status_code == 200
        body = r.json()
        t = fusion.ThresholdVector(geo_min=50, text_min=30, user_min=85, image_min=85)
        expected = fusion.filter_stream(snapshot.scored, t)
        assert body["total"] == len(expected)
        assert [rec["tweet_id"] for rec in body["records"]] == [st.tweet_id for st in expected]

    def test_tweets_scores_rounded(self, client):
        r = client.get("/tweets", params={"page_size": 5})
        for rec in r.json()["records"]:
            for axis in fusion.AXES:
                assert rec[axis] == round(rec[axis], 2)

    def test_tweets_rejects_bad_threshold(self, client):
        assert client.get("/tweets", params={"geo_min": 150}).status_code == 422

    def test_cdf_monotone(self, client):
        r = client.get("/cdf", params={"axis": "text"})
        pts = r.json()["points"]
        fracs = [p["fraction"] for p in pts]
        assert fracs == sorted(fracs, reverse=True)
        assert pts[0]["fraction"] == 1.0

    def test_cdf_unknown_axis(self, client):
        assert client.get("/cdf", params={"axis": "wind"}).status_code == 400

    def test_detail(self, client, snapshot):
        st = snapshot.scored[0]
        r = client.get(f"/tweet/{st.tweet_id}")
        assert r.status_code == 200
        body = r.json()
        assert body["scores"]["geo"] == round(st.scores.geo, 2)
        assert body["text"] == st.tweet.text
        assert body["author"]["user_id"] == st.tweet.author.user_id
        assert "@ cell(" in body["map_context"]["address"]

    def test_detail_unknown_404(self, client):
        assert client.get("/tweet/nope").status_code == 404

    def test_config_echo(self, client):
        body = client.get("/config").json()
        assert body["seed_term"] == "irma"
        assert set(body["default_thresholds"]) == {"geo_min", "text_min", "user_min", "image_min"}


def base_args(scenario, out, extra=()):
    start, end = study_window()
    return [
        "--out", str(out),
        "--tweets-path", str(scenario.tweets),
        "--sensors-path", str(scenario.sensors),
        "--track-path", str(scenario.track),
        "--labels-path", str(scenario.labels),
        "--image-scores-path", str(scenario.image_scores),
        "--study-start", str(start),
        "--study-end", str(end),
        "--segment-hours", "12",
        *extra,
    ]


class TestCli:
    def test_score_requires_select_geo(self, scenario, tmp_path, capsys):
        rc = cli_main(["score", *base_args(scenario, tmp_path / "out")])
        assert rc == 2
        assert "select-geo" in capsys.readouterr().err

    def test_full_stage_sequence(self, scenario, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli_main(["ingest", *base_args(scenario, out)]) == 0
        assert (out / "accepted.jsonl").exists()
        assert cli_main(["select-geo", *base_args(scenario, out)]) == 0
        assert (out / "geo_model.txt").exists()
        assert cli_main(["score", *base_args(scenario, out)]) == 0
        assert (out / "snapshot.json").exists()
        capsys.readouterr()

        rc = cli_main(["filter", *base_args(scenario, out),
                       "--geo", "50", "--text", "30", "--user", "85", "--image", "85"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        snap = load_snapshot(out / "snapshot.json")
        assert len(lines) == len(snap.scored)
        for line in lines:
            head, _, tail = line.partition(" [")
            parts = head.split()
            assert len(parts) == 5
            float(parts[1]), float(parts[2]), float(parts[3]), float(parts[4])
            assert tail.endswith("pass") or tail.endswith("fail")
        t = fusion.ThresholdVector(geo_min=50, text_min=30, user_min=85, image_min=85)
        expected_pass = sum(1 for st in snap.scored if fusion.passes_thresholds(st.scores, t))
        assert sum(1 for l in lines if l.endswith(" pass")) == expected_pass

        assert cli_main(["report", *base_args(scenario, out), "--cdf"]) == 0
        csv_lines = capsys.readouterr().out.strip().splitlines()
        assert csv_lines[0] == "threshold,geo,text,user,image"
        assert len(csv_lines) == 102
        first = csv_lines[1].split(",")
        assert first[0] == "0" and all(v == "1.0000" for v in first[1:])

    def test_report_manifest_json(self, scenario, tmp_path, capsys):
        out = tmp_path / "out"
        cli_main(["select-geo", *base_args(scenario, out)])
        cli_main(["score", *base_args(scenario, out)])
        capsys.readouterr()
        assert cli_main(["report", *base_args(scenario, out)]) == 0
        manifest = json.loads(capsys.readouterr().out)
        assert "hash" in manifest

    def test_train_user_and_text_artifacts(self, scenario, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli_main(["train-user", *base_args(scenario, out)]) == 0
        assert (out / "user_model.txt").exists()
        assert cli_main(["train-text", *base_args(scenario, out)]) == 0
        assert list(out.glob("embeddings_*.txt"))
        capsys.readouterr()

    def test_score_images_artifact(self, scenario, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli_main(["score-images", *base_args(scenario, out)]) == 0
        assert (out / "image_calibration.txt").exists()
        capsys.readouterr()

    def test_bad_input_nonzero_exit(self, scenario, tmp_path, capsys):
        out = tmp_path / "out"
        args = base_args(scenario, out)
        i = args.index("--sensors-path")
        args[i + 1] = str(tmp_path / "missing.csv")
        rc = cli_main(["select-geo", *args])
        assert rc != 0
        capsys.readouterr()

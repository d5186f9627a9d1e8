import io
import json

import pytest

from stormsift.ingest import (
    GeoLocation,
    IngestError,
    LocationKind,
    PlaceGeometry,
    _reparse_serialized,
    bucket_hourly,
    load_labels,
    load_sensor_csv,
    load_track_csv,
    parse_tweet_stream,
    place_centroid,
    serialize_tweet,
)

STUDY = (1505001600, 1505001600 + 72 * 3600 - 1)


def tweet_obj(i=0, **overrides):
    obj = {
        "id": f"t{i}",
        "created_at": "2017-09-10T12:00:00Z",
        "coordinates": {"lat": 27.0, "lon": -81.5},
        "text": "wind picking up",
        "hashtags": [],
        "urls": [],
        "media": [],
        "user": {
            "id": "u1",
            "created_at": "2015-01-01T00:00:00Z",
            "friends_count": 10,
            "followers_count": 20,
            "statuses_count": 30,
            "verified": False,
        },
    }
    obj.update(overrides)
    return obj


def stream(objs):
    return io.StringIO("\n".join(json.dumps(o) for o in objs) + "\n")


class TestParseTweetStream:
    def test_coordinates_pass_through(self):
        accepted, rejected = parse_tweet_stream(stream([tweet_obj()]), STUDY)
        assert not rejected
        t = accepted[0]
        assert t.location_kind is LocationKind.COORDINATES
        assert (t.location.latitude, t.location.longitude) == (27.0, -81.5)

    def test_place_resolves_to_centroid(self):
        obj = tweet_obj()
        del obj["coordinates"]
        obj["place"] = {"vertices": [{"lat": 25.0, "lon": -82.0}, {"lat": 27.0, "lon": -80.0}]}
        accepted, _ = parse_tweet_stream(stream([obj]), STUDY)
        t = accepted[0]
        assert t.location_kind is LocationKind.PLACE_CENTROID
        assert (t.location.latitude, t.location.longitude) == (26.0, -81.0)

    def test_no_location_rejected(self):
        obj = tweet_obj()
        del obj["coordinates"]
        _, rejected = parse_tweet_stream(stream([obj]), STUDY)
        assert rejected[0].reason == "no_location"

    def test_mixed_fixture_counts_and_order(self):
        objs = [tweet_obj(i) for i in range(10)]
        del objs[3]["coordinates"]  # malformed: no location
        objs[7]["created_at"] = "not-a-date"  # malformed: bad timestamp
        accepted, rejected = parse_tweet_stream(stream(objs), STUDY)
        assert len(accepted) == 8
        assert len(rejected) == 2
        assert [t.id for t in accepted] == [f"t{i}" for i in range(10) if i not in (3, 7)]
        assert [r.line_number for r in rejected] == [4, 8]

    def test_outside_window_rejected(self):
        obj = tweet_obj(created_at="2017-10-01T00:00:00Z")
        _, rejected = parse_tweet_stream(stream([obj]), STUDY)
        assert rejected[0].reason == "outside_study_window"

    def test_count_conservation(self):
        objs = [tweet_obj(i) for i in range(20)]
        for i in (2, 5, 11):
            del objs[i]["coordinates"]
        accepted, rejected = parse_tweet_stream(stream(objs), STUDY)
        assert len(accepted) + len(rejected) == 20

    def test_partition_concatenation_equals_whole(self):
        objs = [tweet_obj(i) for i in range(12)]
        del objs[4]["coordinates"]
        whole_a, whole_r = parse_tweet_stream(stream(objs), STUDY)
        part1_a, part1_r = parse_tweet_stream(stream(objs[:6]), STUDY)
        part2_a, part2_r = parse_tweet_stream(stream(objs[6:]), STUDY)
        assert whole_a == part1_a + part2_a
        assert len(whole_r) == len(part1_r) + len(part2_r)

    def test_roundtrip(self):
        obj = tweet_obj(hashtags=["#irma"], urls=["http://x.co"], media=[{"id": "m1", "path": "p"}])
        accepted, _ = parse_tweet_stream(stream([obj]), STUDY)
        line = serialize_tweet(accepted[0])
        assert _reparse_serialized(line) == accepted[0]


class TestPlaceCentroid:
    def test_square(self):
        geom = PlaceGeometry(tuple(GeoLocation(*v) for v in [(0, 0), (0, 2), (2, 2), (2, 0)]))
        c = place_centroid(geom)
        assert (c.latitude, c.longitude) == (1.0, 1.0)

    def test_bounding_box_midpoint(self):
        geom = PlaceGeometry((GeoLocation(25, -82), GeoLocation(27, -80)))
        c = place_centroid(geom)
        assert (c.latitude, c.longitude) == (26.0, -81.0)

    def test_triangle_mean(self):
        geom = PlaceGeometry(tuple(GeoLocation(*v) for v in [(0, 0), (3, 0), (0, 3)]))
        c = place_centroid(geom)
        assert (c.latitude, c.longitude) == (1.0, 1.0)

    def test_rotation_invariance(self):
        verts = [(0.0, 0.0), (0.0, 2.0), (2.0, 3.0), (2.0, 0.0)]
        base = place_centroid(PlaceGeometry(tuple(GeoLocation(*v) for v in verts)))
        for shift in range(1, 4):
            rotated = verts[shift:] + verts[:shift]
            c = place_centroid(PlaceGeometry(tuple(GeoLocation(*v) for v in rotated)))
            assert c == base

    def test_empty_error(self):
        with pytest.raises(ValueError):
            PlaceGeometry(())


class TestBucketHourly:
    def test_boundaries(self):
        start = STUDY[0]
        assert bucket_hourly(start, start).index == 0
        assert bucket_hourly(start + 3599, start).index == 0
        assert bucket_hourly(start + 3600, start).index == 1

    def test_before_start_error(self):
        with pytest.raises(ValueError):
            bucket_hourly(STUDY[0] - 1, STUDY[0])


class TestCsvLoaders:
    def test_sensor_wellformed(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text(
            "station_id,lat,lon,window_start_iso,wind_mph,precip_in\n"
            "a,26,-81,2017-09-10T00:00:00Z,10,0.5\n"
            "b,27,-82,2017-09-10T01:00:00Z,20,1.5\n"
            "c,28,-80,2017-09-10T02:00:00Z,30,2.5\n"
        )
        readings = load_sensor_csv(p, STUDY[0])
        assert len(readings) == 3
        assert readings[1].window.index == 1

    def test_track_duplicate_window_fatal(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text(
            "window_start_iso,lat,lon,category,pressure_mb,max_wind_mph\n"
            "2017-09-10T00:00:00Z,24.5,-81.5,4,930,130\n"
            "2017-09-10T00:30:00Z,24.6,-81.5,4,930,130\n"
        )
        with pytest.raises(IngestError, match=":3"):
            load_track_csv(p, STUDY[0])

    def test_track_gap_fatal(self, tmp_path):
        p = tmp_path / "t.csv"
        p.write_text(
            "window_start_iso,lat,lon,category,pressure_mb,max_wind_mph\n"
            "2017-09-10T00:00:00Z,24.5,-81.5,4,930,130\n"
            "2017-09-10T02:00:00Z,24.7,-81.4,4,932,128\n"
        )
        with pytest.raises(IngestError, match="contiguous"):
            load_track_csv(p, STUDY[0])

    def test_label_tag_without_related_fatal(self, tmp_path):
        p = tmp_path / "l.csv"
        p.write_text("subject_id,rater_id,related,tags\nt1,r1,false,Flooding\n")
        with pytest.raises(IngestError, match=":2"):
            load_labels(p)

    def test_labels_wellformed(self, tmp_path):
        p = tmp_path / "l.csv"
        p.write_text(
            "subject_id,rater_id,related,tags\n"
            "t1,r1,true,Flooding;Windy\n"
            "t2,r1,false,\n"
        )
        records = load_labels(p)
        assert records[0].tags == frozenset({"Flooding", "Windy"})
        assert not records[1].related

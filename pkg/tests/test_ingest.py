import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kpsc.errors import ParseError
from kpsc.ingest import QuantSpec, parse_kpjson, parse_mot, quantize, to_kpjson, write_kpjson
from kpsc.profiles import BBOX2D, SKELETON15
from kpsc.synth import scramble, synth_generate


def test_mot_line():
    seq = parse_mot("1,3,100,200,50,80,1,-1,-1,-1\n")
    assert seq.profile == BBOX2D
    [frame] = seq.frames
    assert frame.index == 1
    [obj] = frame.objects
    assert obj.track_id == 3 and obj.points == ((100, 200), (150, 280))


def test_mot_sorting_and_scale():
    text = "2,5,1.5,1,1,1\n1,9,0,0,2,2\n1,2,0.25,0,1,1\n"
    seq = parse_mot(text, QuantSpec(4))
    assert [f.index for f in seq.frames] == [1, 2]
    assert [o.track_id for o in seq.frames[0].objects] == [2, 9]
    assert seq.frames[1].objects[0].points == ((6, 4), (10, 8))
    assert seq.scale == (4, 1)


def test_mot_errors():
    assert parse_mot("").frames == ()
    with pytest.raises(ParseError, match="line 2"):
        parse_mot("1,1,0,0,1,1\n1,2,3,4\n")
    with pytest.raises(ParseError, match="negative width"):
        parse_mot("1,1,0,0,-1,1\n")
    with pytest.raises(ParseError, match="duplicate"):
        parse_mot("1,1,0,0,1,1\n1,1,0,0,1,1\n")
    with pytest.raises(ParseError, match="non-numeric"):
        parse_mot("1,a,0,0,1,1\n")


@pytest.mark.parametrize(
    "value,scale,expected",
    [(1.25, 100, 125), (-0.005, 100, -1), (0.0, 7, 0), (0.005, 100, 1), (2.5, 1, 3), (-2.5, 1, -3), ("0.125", 4, 1)],
)
def test_quantize_examples(value, scale, expected):
    assert quantize(value, QuantSpec(scale)) == expected


def test_quantize_fraction_scale():
    assert quantize(1, QuantSpec(1, 3)) == 0
    assert quantize(Fraction(3, 2), QuantSpec(1, 3)) == 1  # exactly 0.5
    with pytest.raises(OverflowError):
        quantize(2**31, QuantSpec())
    with pytest.raises(ValueError):
        QuantSpec(0)


@given(st.decimals(min_value=-10**6, max_value=10**6, places=4, allow_nan=False), st.integers(1, 1000))
def test_quantize_odd_symmetry(d, scale):
    spec = QuantSpec(scale)
    assert quantize(str(-d), spec) == -quantize(str(d), spec)
    assert abs(Fraction(d) * scale - quantize(str(d), spec)) <= Fraction(1, 2)


def test_kpjson_minimal():
    doc = {"profile": "skeleton15", "frames": [{"index": 0, "objects": [
        {"track_id": 0, "visibility": [1] * 15, "points": [[k, 2 * k] for k in range(15)]}]}]}
    seq = parse_kpjson(json.dumps(doc))
    obj = seq.frames[0].objects[0]
    assert seq.profile == SKELETON15 and len(obj.points) == 15 and obj.n_visible == 15


def _doc_one(vis, pts):
    return {"profile": "bbox2d", "frames": [{"index": 0, "objects": [
        {"track_id": 1, "visibility": vis, "points": pts}]}]}


def test_kpjson_errors():
    with pytest.raises(ParseError, match="invisible"):
        parse_kpjson(_doc_one([1, 0], [[1, 1], [2, 2]]))
    with pytest.raises(ParseError, match=r"\$\.frames\[0\]\.objects\[0\]\.points\[1\]"):
        parse_kpjson(_doc_one([1, 1], [[1, 1], [2]]))
    with pytest.raises(ParseError, match="unknown profile"):
        parse_kpjson({"profile": "nope", "frames": []})
    with pytest.raises(ParseError, match="strictly increasing"):
        parse_kpjson({"profile": "bbox2d", "frames": [{"index": 3}, {"index": 3}]})
    with pytest.raises(ParseError, match="invalid JSON"):
        parse_kpjson("{")
    with pytest.raises(ParseError):
        parse_kpjson({"profile": {"name": "x", "N": 2, "D": 2, "edges": [[0, 0]]}})


def test_kpjson_inline_profile_and_round_trip():
    doc = {"profile": {"name": "pair", "N": 2, "D": 2, "edges": [[1, 0]]}, "scale": [10, 1],
           "frames": [{"index": 4, "objects": [{"track_id": 7, "visibility": [0, 1], "points": [[3, 4]]}]}]}
    seq = parse_kpjson(doc)
    assert seq.frames[0].objects[0].points == (None, (3, 4))
    assert to_kpjson(seq) == doc


@pytest.mark.parametrize("seed", range(5))
def test_kpjson_round_trip_random(seed):
    seq = scramble(synth_generate("random_walk", "face68", n_objects=2, n_frames=4, seed=seed), seed)
    assert parse_kpjson(write_kpjson(seq)) == seq
    assert parse_kpjson(write_kpjson(seq, indent=2)) == seq

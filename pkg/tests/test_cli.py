import json

import pytest

from kpsc.cli import main
from kpsc.ingest import parse_kpjson, write_kpjson
from kpsc.synth import scramble, synth_generate


@pytest.fixture
def kpjson_file(tmp_path):
    seq = scramble(synth_generate("articulated", "skeleton15", n_objects=2, n_frames=8, seed=1), seed=1)
    path = tmp_path / "in.json"
    path.write_text(write_kpjson(seq))
    return path, seq


def test_encode_decode_round_trip(kpjson_file, tmp_path, capsys):
    src, seq = kpjson_file
    out = tmp_path / "a.kpsc"
    assert main(["encode", str(src), "-o", str(out)]) == 0
    assert out.exists()
    assert "bits/point" in capsys.readouterr().out
    dec = tmp_path / "dec.json"
    assert main(["decode", str(out), "-o", str(dec)]) == 0
    assert parse_kpjson(dec.read_text()) == seq
    again = tmp_path / "b.kpsc"
    assert main(["encode", str(dec), "-o", str(again)]) == 0
    assert again.read_bytes() == out.read_bytes()


def test_decode_to_stdout(kpjson_file, tmp_path, capsys):
    src, seq = kpjson_file
    out = tmp_path / "a.kpsc"
    main(["encode", str(src), "-o", str(out)])
    capsys.readouterr()
    assert main(["decode", str(out)]) == 0
    assert parse_kpjson(capsys.readouterr().out) == seq


def test_default_output_name(kpjson_file):
    src, _ = kpjson_file
    assert main(["encode", str(src)]) == 0
    assert src.with_suffix(".kpsc").exists()


def test_unknown_profile(kpjson_file, capsys):
    src, _ = kpjson_file
    assert main(["encode", str(src), "--profile", "octopus"]) != 0
    assert "unknown profile" in capsys.readouterr().err


def test_mot_encode(tmp_path, capsys):
    mot = tmp_path / "gt.txt"
    mot.write_text("1,1,10,20,30,40,1,-1,-1,-1\n1,2,50,60,10,10,1,-1,-1,-1\n2,1,12,21,30,40,1,-1,-1,-1\n")
    out = tmp_path / "gt.kpsc"
    assert main(["encode", str(mot), "--format", "mot", "-o", str(out)]) == 0
    capsys.readouterr()
    assert main(["inspect", str(out)]) == 0
    text = capsys.readouterr().out
    assert "profile: bbox2d" in text and "frames: 2" in text


def test_truncated_file(kpjson_file, tmp_path, capsys):
    src, _ = kpjson_file
    out = tmp_path / "a.kpsc"
    main(["encode", str(src), "-o", str(out)])
    data = out.read_bytes()
    out.write_bytes(data[: len(data) // 2])
    capsys.readouterr()
    assert main(["decode", str(out)]) == 1
    assert "frame" in capsys.readouterr().err


def test_inspect_header_only(tmp_path, capsys):
    src = tmp_path / "empty.json"
    src.write_text(json.dumps({"profile": "face68", "frames": []}))
    out = tmp_path / "empty.kpsc"
    assert main(["encode", str(src), "-o", str(out)]) == 0
    capsys.readouterr()
    assert main(["inspect", str(out)]) == 0
    assert "frames: 0" in capsys.readouterr().out


def test_bench_synthetic(tmp_path, capsys):
    csv_path = tmp_path / "b.csv"
    json_path = tmp_path / "b.json"
    rc = main(["bench", "--synthetic", "constant_velocity", "--frames", "12", "--skips", "0,1,2",
               "--configs", "multimodal", "--out-csv", str(csv_path), "--out-json", str(json_path)])
    assert rc == 0
    assert len(csv_path.read_text().splitlines()) == 4
    assert len(json.loads(json_path.read_text())) == 3


def test_bench_negative_sigma(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bench", "--synthetic", "static", "--sigmas", "-1"])
    assert info.value.code == 2


def test_bad_weights(kpjson_file):
    src, _ = kpjson_file
    with pytest.raises(SystemExit):
        main(["encode", str(src), "--weights", "0,1,1"])

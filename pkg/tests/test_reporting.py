import json

from polylab import reporting


def test_csv_schema_and_determinism(tmp_path):
    rows = [{"a": 1, "b": 0.1, "c": "x"}, {"a": 2, "b": float("inf"), "c": None}]
    p1 = tmp_path / "one.csv"
    p2 = tmp_path / "two.csv"
    reporting.write_csv(str(p1), ["a", "b", "c"], rows)
    reporting.write_csv(str(p2), ["a", "b", "c"], rows)
    b1 = p1.read_bytes()
    assert b1 == p2.read_bytes()
    assert b1.startswith(b"# polylab-schema v1\n")
    assert b"0.1" in b1


def test_float_round_trip():
    # repr round-trips doubles exactly
    x = 0.1 + 0.2
    assert float(reporting._fmt(x)) == x


def test_manifest_hashes(tmp_path):
    p = tmp_path / "data.csv"
    reporting.write_csv(str(p), ["v"], [{"v": 1.25}])
    man = reporting.RunManifest(command="kernel", params={"n": 1}, seed=3)
    man.add(str(p))
    mpath = man.write(str(tmp_path / "manifest.json"))
    obj = json.loads(open(mpath).read())
    assert obj["outputs"]["data.csv"] == reporting.sha256_file(str(p))
    assert obj["command"] == "kernel"


def test_series_and_figure(tmp_path):
    sp = reporting.write_series(str(tmp_path / "s.csv"), [1, 2], [3.0, 4.0])
    lines = open(sp).read().splitlines()
    assert lines[1] == "x,y"
    fp = reporting.render_figure(str(tmp_path / "f.png"),
                                 lambda ax: ax.plot([0, 1], [0, 1]))
    head = open(fp, "rb").read(8)
    assert head[1:4] == b"PNG"

import json
import re

import pytest

from instances import FIXTURES
from medusa.cli import main
from medusa.errors import FramesFormatError
from medusa.frames import parse_frames, read_frames, write_frames
from medusa.synth import SynthConfig, generate

HEADER = "frame,time,point_id,color,x,y\n"


def test_parse_simple_file():
    ts = parse_frames(HEADER + "0,10,1,1,0,0\n0,10,2,2,1,0\n1,20,1,1,0,1\n")
    assert ts.frames == 2 and [t.id for t in ts.trajectories] == [1, 2]
    assert ts.trajectories[1].stop == 0
    assert ts.raw_times == (10, 20)


@pytest.mark.parametrize("body,line,needle", [
    ("0,0,1,1,0,0\n0,0,1,1,1,1\n", 3, "duplicate"),
    ("0,0,2,1,0,0\n0,0,1,1,1,1\n", 3, "sorted"),
    ("0,0,1,0,0,0\n", 2, "color"),
    ("0,0,1,1,0\n", 2, "fields"),
    ("0,0,1,1,zero,0\n", 2, "not a number"),
    ("0,0,1,1,0,0\n1,0,1,1,0,0\n", 3, "increase"),
    ("0,0,1,1,0,0\n1,1,1,2,0,0\n", 3, "color"),
    ("0,0,1,1,0,0\n0,0,2,1,5,5\n1,1,1,1,0,0\n2,2,1,1,0,0\n2,2,2,1,5,5\n", 6, "contiguous"),
])
def test_format_errors_name_the_line(body, line, needle):
    with pytest.raises(FramesFormatError) as err:
        parse_frames(HEADER + body)
    assert f"line {line}" in str(err.value) and needle in str(err.value)


def test_bad_header():
    with pytest.raises(FramesFormatError, match="line 1"):
        parse_frames("t,id,x,y\n")


def test_synth_output_round_trips():
    ts = generate(SynthConfig(seed=3, grid_side=3, frames=4))
    again = parse_frames(write_frames(ts))
    assert again == ts
    assert write_frames(again) == write_frames(ts)


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_analyze_single_point(tmp_path, capsys):
    src = write(tmp_path, "one.csv", HEADER + "0,0,1,1,0,0\n")
    code, _, _ = run(["analyze", src, "--out", tmp_path / "out", "--oracle-check"], capsys)
    assert code == 0
    rows = (tmp_path / "out" / "alpha-multi.diagram.csv").read_text().splitlines()
    assert rows[1:] == ["0,Hor,0.000000,1.000000,1.000000,gap,0,0"]
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert set(manifest["files"]) == {p.name for p in (tmp_path / "out").iterdir()} - {"manifest.json"}
    assert manifest["time_map"]["rule"]


def test_analyze_flip_gadget(tmp_path, capsys):
    out = tmp_path / "flip"
    code, _, _ = run(["analyze", FIXTURES / "flip_gadget.csv", "--alpha0", "10", "--out", out,
                      "--complex", "delaunay:multi", "--oracle-check"], capsys)
    assert code == 0
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["delaunay-multi"]["fillers"] == 1 and diag["delaunay-multi"]["unresolved"] == 0


def test_duplicate_row_exits_1(tmp_path, capsys):
    src = write(tmp_path, "dup.csv", HEADER + "0,0,1,1,0,0\n0,0,1,1,0,0\n")
    code, _, err = run(["analyze", src, "--out", tmp_path / "o"], capsys)
    assert code == 1 and "line 3" in err


def test_missing_file_exits_1(tmp_path, capsys):
    assert run(["analyze", tmp_path / "nope.csv"], capsys)[0] == 1


def test_unsupported_inclusion_exits_3(tmp_path, capsys):
    code, _, err = run(["analyze", FIXTURES / "hexagon.csv", "--out", tmp_path / "o",
                        "--inclusion", "delaunay:multi<=alpha:multi"], capsys)
    assert code == 3 and "not a supported inclusion" in err


def test_bad_config_exits_1(tmp_path, capsys):
    cfg = write(tmp_path, "cfg.json", json.dumps({"alpha0": -1}))
    assert run(["analyze", FIXTURES / "hexagon.csv", "--config", cfg, "--out", tmp_path / "o"], capsys)[0] == 1


def test_output_directory_precedence(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = write(tmp_path, "cfg.json", json.dumps({"output_dir": "from_config", "alpha0": 3}))
    run(["analyze", FIXTURES / "hexagon.csv", "--config", cfg], capsys)
    assert (tmp_path / "from_config" / "manifest.json").exists()
    monkeypatch.setenv("MEDUSA_OUTPUT_DIR", str(tmp_path / "from_env"))
    run(["analyze", FIXTURES / "hexagon.csv", "--config", cfg], capsys)
    assert (tmp_path / "from_env" / "manifest.json").exists()
    run(["analyze", FIXTURES / "hexagon.csv", "--config", cfg, "--out", "from_flag"], capsys)
    assert (tmp_path / "from_flag" / "manifest.json").exists()


def test_reruns_produce_identical_hashes(tmp_path, capsys):
    for name in ("a", "b"):
        run(["analyze", FIXTURES / "hexagon_center.csv", "--alpha0", "4.5", "--out", tmp_path / name], capsys)
    a = (tmp_path / "a" / "manifest.json").read_text()
    assert a == (tmp_path / "b" / "manifest.json").read_text()
    assert len(json.loads(a)["files"]) > 10


def test_synth_is_deterministic(tmp_path, capsys):
    for name in ("a.csv", "b.csv"):
        assert run(["synth", "--seed", 7, "--grid-side", 4, "--frames", 10, "--out", tmp_path / name], capsys)[0] == 0
    a = (tmp_path / "a.csv").read_text()
    assert a == (tmp_path / "b.csv").read_text()
    assert len(a.splitlines()) == 1 + 4 ** 2 * 10
    read_frames(tmp_path / "a.csv")


def test_static_synth_keeps_positions(tmp_path, capsys):
    run(["synth", "--dynamics", "static", "--grid-side", 2, "--frames", 3, "--out", tmp_path / "s.csv"], capsys)
    ts = read_frames(tmp_path / "s.csv")
    assert all(len(set(t.coords)) == 1 for t in ts.trajectories)


def test_synth_rejects_bad_settings(capsys):
    assert run(["synth", "--frames", 1], capsys)[0] == 1


def test_oracle_on_single_point(tmp_path, capsys):
    src = write(tmp_path, "one.csv", HEADER + "0,0,1,1,0,0\n")
    code, out, _ = run(["oracle", src], capsys)
    assert code == 0 and "differences" not in out


def test_oracle_on_hexagon(capsys):
    code, out, _ = run(["oracle", FIXTURES / "hexagon.csv", "--alpha0", "3"], capsys)
    assert code == 0
    assert "empty diff" in out and "differences" not in out
    table = [line.split() for line in out.splitlines() if re.match(r"\s+\d+\s+multi", line)]
    assert table and all(row[2:4] == ["1,1", "1,1"] for row in table)


def test_corrupted_medusa_fails_verification(tmp_path, capsys):
    out = tmp_path / "hex"
    run(["analyze", FIXTURES / "hexagon.csv", "--alpha0", "3", "--out", out, "--complex", "alpha:multi"], capsys)
    good = out / "alpha-multi.medusa"
    assert run(["oracle", FIXTURES / "hexagon.csv", "--medusa", good], capsys)[0] == 0
    # an edge that only appears at t = 1 breaks the ring for most of the sweep
    lines = good.read_text().splitlines()
    k = next(i for i, l in enumerate(lines) if re.match(r"\d+ 1 prism 0 1 ", l))
    lines[k] = lines[k].replace(" prism 0 1 ", " prism 1 1 ")
    bad = write(tmp_path, "bad.medusa", "\n".join(lines) + "\n")
    code, text, _ = run(["oracle", FIXTURES / "hexagon.csv", "--medusa", bad], capsys)
    assert code == 2 and "differences" in text
    garbage = write(tmp_path, "garbage.medusa", "# medusa v1\n0 0 prism oops\n")
    assert run(["oracle", FIXTURES / "hexagon.csv", "--medusa", garbage], capsys)[0] == 2

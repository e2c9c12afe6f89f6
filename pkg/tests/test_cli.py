import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from lanevote.cli import build_parser, main, resolve_config
from lanevote.config import PipelineConfig
from lanevote.errors import ConfigError
from lanevote.fields import LaneScene
from lanevote.formats import read_grid, read_scene, write_grid, write_scene
from lanevote.geometry import Polyline
from lanevote.render import PALETTE, lane_color, render_svg

SVG = "{http://www.w3.org/2000/svg}"
SUBCOMMANDS = ["synth", "rasterize", "decode", "eval", "render", "report"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("cmd", [[]] + [[c] for c in SUBCOMMANDS])
def test_help_exits_zero(cmd, capsys):
    with pytest.raises(SystemExit) as e:
        main(cmd + ["--help"])
    assert e.value.code == 0


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as e:
        main(["decode"])
    assert e.value.code == 1
    with pytest.raises(SystemExit) as e:
        main(["bogus"])
    assert e.value.code == 1


def test_synth_count_and_determinism(tmp_path, capsys):
    assert run(capsys, "synth", "--count", 3, "--out", tmp_path / "a")[0] == 0
    assert run(capsys, "synth", "--count", 3, "--out", tmp_path / "b")[0] == 0
    a = sorted((tmp_path / "a").iterdir())
    assert [p.name for p in a] == ["scene_000000.json", "scene_000001.json", "scene_000002.json"]
    assert all(p.read_bytes() == (tmp_path / "b" / p.name).read_bytes() for p in a)
    assert run(capsys, "synth", "--count", 0, "--out", tmp_path / "c")[0] == 0
    assert list((tmp_path / "c").iterdir()) == []


def test_pipeline_roundtrip(tmp_path, capsys):
    run(capsys, "synth", "--count", 2, "--out", tmp_path / "s", "--lanes", 4, 4)
    scenes = sorted((tmp_path / "s").glob("*.json"))
    assert run(capsys, "rasterize", *scenes, "--out", tmp_path / "g")[0] == 0
    assert not list((tmp_path / "g").glob("*.instances.lpgf"))
    run(capsys, "rasterize", scenes[0], "--out", tmp_path / "gi", "--instances")
    assert read_grid(tmp_path / "gi" / "scene_000000.instances.lpgf").shape == (4, 256, 512)
    (tmp_path / "p").mkdir()
    for sc in scenes:
        code, _, _ = run(capsys, "decode", tmp_path / "g" / f"{sc.stem}.centerness.lpgf", "--scene", sc,
                         "--out", tmp_path / "p" / sc.name)
        assert code == 0
        doc = read_scene(tmp_path / "p" / sc.name)
        assert len(doc.scene.lanes) == 4 and len(doc.seeds) == 4
    code, out, _ = run(capsys, "eval", tmp_path / "p", tmp_path / "s", "--benchmark", "culane")
    assert code == 0 and json.loads(out)["f1"] == 1.0
    code, out, _ = run(capsys, "eval", tmp_path / "s", tmp_path / "s", "--benchmark", "tusimple")
    assert code == 0 and json.loads(out)["accuracy"] == 1.0


def test_decode_k1_and_zero_field(tmp_path, capsys):
    run(capsys, "synth", "--count", 1, "--out", tmp_path, "--lanes", 5, 5)
    sc = tmp_path / "scene_000000.json"
    run(capsys, "rasterize", sc, "--out", tmp_path)
    ctr = tmp_path / "scene_000000.centerness.lpgf"
    run(capsys, "decode", ctr, "--scene", sc, "--out", tmp_path / "k1.json", "--k", 1)
    assert len(read_scene(tmp_path / "k1.json").scene.lanes) == 1
    write_grid(tmp_path / "zero.lpgf", np.zeros((256, 512), np.float32))
    code, _, _ = run(capsys, "decode", tmp_path / "zero.lpgf", "--scene", sc, "--out", tmp_path / "z.json")
    assert code == 2
    assert read_scene(tmp_path / "z.json").scene.lanes == ()


def test_decode_distance_grouper(tmp_path, capsys):
    run(capsys, "synth", "--count", 1, "--out", tmp_path, "--lanes", 3, 3)
    run(capsys, "rasterize", tmp_path / "scene_000000.json", "--out", tmp_path)
    code, _, _ = run(capsys, "decode", tmp_path / "scene_000000.centerness.lpgf", "--grouper", "distance",
                     "--semantic", tmp_path / "scene_000000.semantic.lpgf", "--k", 3, "--out", tmp_path / "d.json")
    assert code == 0
    code, _, err = run(capsys, "decode", tmp_path / "scene_000000.centerness.lpgf", "--out", tmp_path / "e.json")
    assert code == 1 and "--scene" in err


def test_eval_empty_and_malformed(tmp_path, capsys):
    gt = LaneScene(100, 100, (Polyline([(20.5, 5.5), (25.5, 90.5)]), Polyline([(70.5, 5.5), (75.5, 90.5)])))
    write_scene(tmp_path / "gt.json", gt)
    write_scene(tmp_path / "pred.json", LaneScene(100, 100, ()))
    code, out, _ = run(capsys, "eval", tmp_path / "pred.json", tmp_path / "gt.json")
    assert code == 0 and json.loads(out)["fn_rate"] == 1.0
    (tmp_path / "bad.json").write_text("{oops")
    code, _, err = run(capsys, "eval", tmp_path / "bad.json", tmp_path / "gt.json")
    assert code == 1 and "invalid JSON" in err
    code, _, err = run(capsys, "eval", tmp_path / "missing.json", tmp_path / "gt.json")
    assert code == 1


def test_eval_tusimple_jsonl(tmp_path, capsys):
    line = {"lanes": [[100, 110, 120], [-2, 300, 310]], "h_samples": [10, 20, 30], "raw_file": "a.jpg"}
    (tmp_path / "gt.jsonl").write_text(json.dumps(line) + "\n")
    code, out, _ = run(capsys, "eval", tmp_path / "gt.jsonl", tmp_path / "gt.jsonl", "--benchmark", "tusimple")
    rep = json.loads(out)
    assert code == 0 and rep["accuracy"] == 1.0 and rep["tp"] == 2


def test_eval_culane_lines(tmp_path, capsys):
    (tmp_path / "a.lines.txt").write_text("100.5 500.5 120.5 300.5 140.5 100.5\n")
    code, out, _ = run(capsys, "eval", tmp_path / "a.lines.txt", tmp_path / "a.lines.txt")
    assert code == 0 and json.loads(out)["tp"] == 1


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k": 7, "gamma": 2.0, "attn-threshold": 0.3}))
    parser = build_parser()
    args = parser.parse_args(["decode", "x", "--out", "y", "--config", str(cfg), "--k", "3"])
    got = resolve_config(args)
    assert (got.k, got.gamma, got.attn_threshold, got.cmin) == (3, 2.0, 0.3, 0.1)
    args = parser.parse_args(["decode", "x", "--out", "y"])
    assert resolve_config(args) == PipelineConfig()


def test_config_rejects_unknown_and_invalid(tmp_path, capsys):
    with pytest.raises(ConfigError, match="unknown config key"):
        PipelineConfig.from_mapping({"kk": 1})
    with pytest.raises(ConfigError):
        PipelineConfig.from_mapping({"k": 0})
    with pytest.raises(ConfigError):
        PipelineConfig.from_mapping({"grouper": "nope"})
    (tmp_path / "c.json").write_text('{"bogus": 1}')
    write_grid(tmp_path / "f.lpgf", np.zeros((4, 4), np.float32))
    code, _, err = run(capsys, "decode", tmp_path / "f.lpgf", "--out", tmp_path / "o.json",
                       "--config", tmp_path / "c.json")
    assert code == 1 and "bogus" in err


def test_render(tmp_path, capsys):
    assert lane_color(0) == PALETTE[0] and lane_color(len(PALETTE)) == PALETTE[0]
    empty = ET.fromstring(render_svg(LaneScene(20, 30, ())))
    assert empty.tag == SVG + "svg" and not empty.findall(f".//{SVG}path")
    two = LaneScene(50, 50, (Polyline([(1, 1), (10, 40)]), Polyline([(30, 1), (40, 40)])))
    write_scene(tmp_path / "two.json", two)
    write_grid(tmp_path / "f.lpgf", np.full((50, 50), 0.5, np.float32))
    code, _, _ = run(capsys, "render", tmp_path / "two.json", "--out", tmp_path / "two.svg",
                     "--field", tmp_path / "f.lpgf")
    assert code == 0
    root = ET.parse(tmp_path / "two.svg").getroot()
    paths = root.findall(f".//{SVG}path")
    assert [p.get("stroke") for p in paths] == [PALETTE[0], PALETTE[1]]
    assert root.findall(f".//{SVG}g[@id='centerness']/{SVG}rect")
    assert render_svg(two) == render_svg(two)


def test_report_writes_csv_and_figures(tmp_path, capsys):
    code, out, _ = run(capsys, "report", "--count", 3, "--out", tmp_path, "--ks", "1,5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("k,") and len(lines) == 3
    assert (tmp_path / "seed_sweep.csv").read_text() == out
    for name in ("seed_sweep.png", "attention.png", "centerness_profiles.png"):
        data = (tmp_path / name).read_bytes()
        assert data[:8] == b"\x89PNG\r\n\x1a\n"


def test_log_level_env(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("LPK_LOG", "not-a-level")
    assert run(capsys, "synth", "--count", 1, "--out", tmp_path)[0] == 0

"""Command-line entry point: synth, rasterize, decode, eval, render, report."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .errors import ConfigError, LaneVoteError, NoViableCandidatesError
from .fields import LaneScene, rasterize_centerness, rasterize_instance_masks, rasterize_semantic
from .formats import (read_culane_lines, read_field, read_scene, read_tusimple, scene_to_tusimple,
                      write_grid, write_scene)
from .metrics import TusimpleFrame, culane_eval, tusimple_eval
from .pipeline import decode, trace_mask
from .render import render_svg
from .synth import WorldConfig, corrupt_field, generate_scene

log = logging.getLogger("lanevote")

EXIT_OK, EXIT_ERROR, EXIT_EMPTY = 0, 1, 2

# flag name -> PipelineConfig field; only flags the user actually passes override the file
PIPELINE_FLAGS = {
    "k": int, "gamma": float, "cmin": float, "attn_threshold": float, "grouper": str,
    "thickness": float, "seed": int, "class_threshold": float, "flip_noise": float, "noise": float,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _add_pipeline_flags(p, names=PIPELINE_FLAGS):
    for name in names:
        kw = {"type": PIPELINE_FLAGS[name], "default": None}
        if name == "grouper":
            kw["choices"] = ("oracle", "distance")
        p.add_argument("--" + name.replace("_", "-"), dest=name, **kw)
    p.add_argument("--config", help="JSON file with pipeline settings")


def resolve_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if getattr(args, "config", None) else PipelineConfig()
    overrides = {n: getattr(args, n) for n in PIPELINE_FLAGS if getattr(args, n, None) is not None}
    return PipelineConfig.from_mapping(overrides, cfg) if overrides else cfg


def _world_config(args) -> WorldConfig:
    data = {}
    if args.world:
        try:
            data = json.loads(Path(args.world).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{args.world}:{e.lineno}: invalid JSON: {e.msg}") from None
        unknown = set(data) - {f.name for f in fields(WorldConfig)}
        if unknown:
            raise ConfigError(f"unknown world keys {sorted(unknown)}")
    for name in ("height", "width", "curvature", "noise", "run_seed"):
        if getattr(args, name, None) is not None:
            data[name] = getattr(args, name)
    if getattr(args, "lanes", None) is not None:
        data["lanes_per_scene"] = args.lanes
    if "lanes_per_scene" in data:
        data["lanes_per_scene"] = tuple(data["lanes_per_scene"])
    try:
        return WorldConfig(**data)
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from None


def _add_world_flags(p):
    p.add_argument("--world", help="JSON file with world settings")
    p.add_argument("--height", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--lanes", type=int, nargs=2, metavar=("MIN", "MAX"))
    p.add_argument("--curvature", type=float)
    p.add_argument("--seed", dest="run_seed", type=int)


# -- commands -----------------------------------------------------------------

def cmd_synth(args) -> int:
    world = _world_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        write_scene(out / f"scene_{i:06d}.json", generate_scene(world, i))
    log.info("wrote %d scenes to %s", args.count, out)
    return EXIT_OK


def cmd_rasterize(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, path in enumerate(args.scenes):
        scene = read_scene(path).scene
        stem = Path(path).stem
        inst = rasterize_instance_masks(scene, args.thickness)
        ctr = corrupt_field(rasterize_centerness(scene, args.thickness), args.noise, args.seed, i)
        write_grid(out / f"{stem}.centerness.lpgf", ctr)
        write_grid(out / f"{stem}.semantic.lpgf", rasterize_semantic(scene, args.thickness, inst))
        if args.instances and inst:
            write_grid(out / f"{stem}.instances.lpgf", np.stack(inst))
    return EXIT_OK


def cmd_decode(args) -> int:
    cfg = resolve_config(args)
    ctr = read_field(args.centerness)
    h, w = ctr.shape
    scene = semantic = None
    if cfg.grouper == "oracle":
        if not args.scene:
            raise ConfigError("the oracle grouper needs --scene")
        scene = read_scene(args.scene).scene
        if scene.shape != ctr.shape:
            raise ConfigError(f"scene is {scene.shape} but centerness grid is {ctr.shape}")
    else:
        if not args.semantic:
            raise ConfigError("the distance grouper needs --semantic")
        semantic = read_field(args.semantic)
    if cfg.noise:
        ctr = corrupt_field(ctr, cfg.noise, cfg.seed)
    try:
        res = decode(ctr, cfg.sampler, cfg.dedup, cfg.grouper, scene=scene, semantic=semantic,
                     thickness=cfg.thickness, class_threshold=cfg.class_threshold,
                     flip_noise=cfg.flip_noise, run_seed=cfg.seed)
    except NoViableCandidatesError as e:
        log.warning("%s", e)
        write_scene(args.out, LaneScene(h, w, ()), seeds=[])
        return EXIT_EMPTY
    pairs = [(g.seed, trace_mask(g.mask)) for g in res.kept]
    pairs = [(s, ln) for s, ln in pairs if ln is not None]
    write_scene(args.out, LaneScene(h, w, tuple(ln for _, ln in pairs)), seeds=[s for s, _ in pairs])
    log.info("%d seeds, %d groups kept, %d lanes", len(res.seeds), len(res.kept), len(pairs))
    return EXIT_OK if pairs else EXIT_EMPTY


def _collect(path: Path, patterns) -> dict[str, Path]:
    if path.is_dir():
        files = sorted(p for pat in patterns for p in path.glob(pat))
    else:
        files = [path]
    return {_stem(p): p for p in files}


def _stem(p: Path) -> str:
    name = p.name
    for suffix in (".lines.txt", ".jsonl", ".json", ".txt"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return p.stem


def _load_scene_any(p: Path, height: int, width: int) -> LaneScene:
    if p.name.endswith(".txt"):
        return LaneScene(height, width, tuple(read_culane_lines(p)))
    return read_scene(p).scene


def _pairs(pred_path: Path, gt_path: Path, patterns):
    """(pred, gt) file pairs: two files pair directly, directories pair by file stem."""
    if pred_path.is_file() and gt_path.is_file():
        return [(pred_path, gt_path)]
    pred, gt = _collect(pred_path, patterns), _collect(gt_path, patterns)
    if pred.keys() != gt.keys():
        missing = sorted(gt.keys() - pred.keys())[:3]
        extra = sorted(pred.keys() - gt.keys())[:3]
        raise LaneVoteError(f"prediction/GT files do not line up (missing {missing}, unexpected {extra})")
    return [(pred[k], gt[k]) for k in sorted(gt)]


def cmd_eval(args) -> int:
    pred_path, gt_path = Path(args.pred), Path(args.gt)
    for p in (pred_path, gt_path):
        if not p.exists():
            raise LaneVoteError(f"{p}: no such file or directory")
    if args.benchmark == "culane":
        pairs = _pairs(pred_path, gt_path, ("*.json", "*.lines.txt"))
        preds, gts = [], []
        for pp, gp in pairs:
            gt = _load_scene_any(gp, args.height, args.width)
            preds.append(_load_scene_any(pp, gt.height, gt.width))
            gts.append(gt)
        rep = culane_eval(preds, gts, args.iou_threshold, args.stroke_width)
    else:
        frames = _tusimple_frames(pred_path, gt_path, args.h_step)
        rep = tusimple_eval(frames, args.dist_px, args.match_ratio)
    print(json.dumps(rep.as_dict(), sort_keys=True))
    return EXIT_OK


def _tusimple_frames(pred_path: Path, gt_path: Path, h_step: int) -> list[TusimpleFrame]:
    if gt_path.is_file() and gt_path.suffix == ".jsonl":
        gt = {r.raw_file: r for r in read_tusimple(gt_path)}
        pred = {r.raw_file: r for r in read_tusimple(pred_path)}
        if pred.keys() != gt.keys():
            raise LaneVoteError("prediction and GT raw_file sets differ")
        frames = []
        for key, g in gt.items():
            p = pred[key]
            if p.h_samples != g.h_samples:
                raise LaneVoteError(f"{key}: h_samples differ between prediction and GT")
            frames.append(TusimpleFrame(g.h_samples, g.lanes, p.lanes))
        return frames
    frames = []
    for pp, gp in _pairs(pred_path, gt_path, ("*.json",)):
        g = read_scene(gp).scene
        p = read_scene(pp).scene
        rows = list(range(0, g.height, h_step))
        frames.append(TusimpleFrame(rows, scene_to_tusimple(g, rows).lanes, scene_to_tusimple(p, rows).lanes))
    return frames


def cmd_render(args) -> int:
    doc = read_scene(args.input)
    field = read_field(args.field) if args.field else None
    if field is not None and field.shape != doc.scene.shape:
        raise ConfigError(f"field is {field.shape} but scene is {doc.scene.shape}")
    Path(args.out).write_text(render_svg(doc.scene, doc.seeds, field, args.field_step))
    return EXIT_OK


def cmd_report(args) -> int:
    from . import plotting
    from .experiments import seed_sweep
    from .geometry import arc_fractions, box_centerness_along, centerness_from_fractions, dense_samples
    from .sampling import SamplerConfig
    from .synth import CURVED_OFFSET

    cfg = resolve_config(args)
    world = _world_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ks = [int(k) for k in args.ks.split(",")]
    rows = seed_sweep(world, args.count, ks, cfg)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in r.items()})
    (out / "seed_sweep.csv").write_text(buf.getvalue())
    sys.stdout.write(buf.getvalue())
    plotting.plot_seed_sweep(rows, out / "seed_sweep.png")

    scene = generate_scene(world, 0)
    res = decode(rasterize_centerness(scene, cfg.thickness), SamplerConfig(max(ks), cfg.gamma, cfg.cmin),
                 cfg.dedup, "oracle", scene=scene, thickness=cfg.thickness)
    plotting.plot_attention(res.attention(), out / "attention.png", [g.lane_index for g in res.groups])

    curved = generate_scene(world, CURVED_OFFSET)
    samples = dense_samples(curved.lanes[0])
    s = arc_fractions(samples)
    plotting.plot_centerness_profiles(s, box_centerness_along(samples), centerness_from_fractions(s),
                                      out / "centerness_profiles.png")
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lanevote", description="Point-voting lane decoding on synthetic and benchmark data.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("synth", help="generate synthetic scenes")
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--out", required=True, help="output directory")
    _add_world_flags(s)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("rasterize", help="scene files -> centerness/semantic/instance grids")
    s.add_argument("scenes", nargs="+")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--thickness", type=float, default=5.0)
    s.add_argument("--noise", type=float, default=0.0, help="Gaussian noise std added to centerness")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--instances", action="store_true", help="also write per-lane masks as a C x H x W grid")
    s.set_defaults(func=cmd_rasterize)

    s = sub.add_parser("decode", help="centerness grid -> lanes")
    s.add_argument("centerness")
    s.add_argument("--scene", help="ground-truth scene for the oracle grouper")
    s.add_argument("--semantic", help="semantic grid for the distance grouper")
    s.add_argument("--out", required=True, help="output scene file")
    _add_pipeline_flags(s)
    s.set_defaults(func=cmd_decode)

    s = sub.add_parser("eval", help="score predictions against ground truth")
    s.add_argument("pred")
    s.add_argument("gt")
    s.add_argument("--benchmark", choices=("tusimple", "culane"), default="culane")
    s.add_argument("--iou-threshold", type=float, default=0.5)
    s.add_argument("--stroke-width", type=float, default=30.0)
    s.add_argument("--dist-px", type=float, default=20.0)
    s.add_argument("--match-ratio", type=float, default=0.85)
    s.add_argument("--h-step", type=int, default=10, help="row spacing when sampling scene files for tusimple")
    s.add_argument("--height", type=int, default=590, help="image height for CULane .lines.txt files")
    s.add_argument("--width", type=int, default=1640, help="image width for CULane .lines.txt files")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("render", help="scene or decode output -> SVG")
    s.add_argument("input")
    s.add_argument("--out", required=True)
    s.add_argument("--field", help="centerness grid drawn underneath")
    s.add_argument("--field-step", type=int, default=4)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("report", help="seed-count sweep: CSV plus figures")
    s.add_argument("--count", type=int, default=50)
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--ks", default="1,2,5,10")
    _add_world_flags(s)
    _add_pipeline_flags(s, [n for n in PIPELINE_FLAGS if n != "seed"])
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    level = os.environ.get("LPK_LOG", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LaneVoteError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Readers and writers: binary grids, native scene JSON, TuSimple JSON lines, CULane lines."""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (DegeneratePolylineError, DimensionOverflowError, GridFormatError, NotAGridFileError,
                     ParseError, TruncatedPayloadError, UnsupportedVersionError)
from .fields import LaneScene
from .geometry import Polyline
from .sampling import Candidate

GRID_MAGIC = b"LPGF"
GRID_VERSION = 1
_HEADER = struct.Struct("<4sIIII")
MAX_GRID_ELEMENTS = 2 ** 31 - 1


# -- binary grids -------------------------------------------------------------

def encode_grid(arr) -> bytes:
    """Serialize a (H, W) field or (C, H, W) feature map as little-endian float32."""
    a = np.asarray(arr)
    if a.ndim == 2:
        a = a[None]
    if a.ndim != 3:
        raise GridFormatError(f"grid must be 2-D or 3-D, got shape {a.shape}")
    c, h, w = a.shape
    if c * h * w > MAX_GRID_ELEMENTS:
        raise DimensionOverflowError(f"grid of {c}x{h}x{w} elements is too large")
    payload = np.ascontiguousarray(a, dtype="<f4").tobytes()
    return _HEADER.pack(GRID_MAGIC, GRID_VERSION, c, h, w) + payload


def decode_grid(data: bytes) -> np.ndarray:
    """Inverse of :func:`encode_grid`; always returns a (C, H, W) float32 array."""
    if len(data) < 4 or data[:4] != GRID_MAGIC:
        raise NotAGridFileError("not a grid file")
    if len(data) < _HEADER.size:
        raise TruncatedPayloadError(f"truncated header: {len(data)} of {_HEADER.size} bytes")
    _, version, c, h, w = _HEADER.unpack_from(data)
    if version != GRID_VERSION:
        raise UnsupportedVersionError(f"unsupported grid version {version}")
    n = c * h * w
    if n > MAX_GRID_ELEMENTS:
        raise DimensionOverflowError(f"dimension overflow: {c}x{h}x{w}")
    expected = _HEADER.size + 4 * n
    if len(data) < expected:
        raise TruncatedPayloadError(f"truncated payload: {len(data)} of {expected} bytes")
    if len(data) > expected:
        raise GridFormatError(f"{len(data) - expected} trailing bytes after payload")
    return np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(c, h, w).astype(np.float32)


def write_grid(path, arr) -> None:
    Path(path).write_bytes(encode_grid(arr))


def read_grid(path) -> np.ndarray:
    return decode_grid(Path(path).read_bytes())


def read_field(path) -> np.ndarray:
    """Read a single-channel grid as a (H, W) array."""
    g = read_grid(path)
    if g.shape[0] != 1:
        raise GridFormatError(f"{path}: expected 1 channel, found {g.shape[0]}")
    return g[0]


# -- native scene files -----------------------------------------------------

_SCENE_KEYS = {"height", "width", "lanes"}
_OPTIONAL_SCENE_KEYS = {"seeds", "category"}


@dataclass
class SceneDocument:
    """A scene plus optional decode metadata carried in the same file."""
    scene: LaneScene
    seeds: list[Candidate] | None = None
    category: str | None = None


def dumps_scene(scene: LaneScene, seeds=None, category: str | None = None) -> str:
    # json emits repr() floats: the shortest text that round-trips exactly
    parts = [f'  "height": {scene.height}', f'  "width": {scene.width}']
    if category is not None:
        parts.append(f'  "category": {json.dumps(category)}')
    lanes = ",\n".join("    " + json.dumps(ln.tolist()) for ln in scene.lanes)
    parts.append('  "lanes": [\n' + lanes + "\n  ]" if scene.lanes else '  "lanes": []')
    if seeds is not None:
        rows = ",\n".join("    " + json.dumps({"x": s.x, "y": s.y, "centerness": s.centerness}) for s in seeds)
        parts.append('  "seeds": [\n' + rows + "\n  ]" if seeds else '  "seeds": []')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def loads_scene(text: str, source: str = "<scene>") -> SceneDocument:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"{source}:{e.lineno}:{e.colno}") from None
    if not isinstance(obj, dict):
        raise ParseError("scene must be a JSON object", source)
    missing = _SCENE_KEYS - obj.keys()
    unknown = obj.keys() - _SCENE_KEYS - _OPTIONAL_SCENE_KEYS
    if missing:
        raise ParseError(f"missing keys {sorted(missing)}", source)
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", source)
    h, w = obj["height"], obj["width"]
    if not (isinstance(h, int) and isinstance(w, int)) or h < 1 or w < 1:
        raise ParseError("height and width must be positive integers", source)
    lanes = []
    for i, pts in enumerate(obj["lanes"]):
        try:
            lanes.append(Polyline(np.array(pts, dtype=np.float64)))
        except (ValueError, TypeError) as e:
            raise ParseError(str(e), f"{source}: lane {i}") from None
    seeds = None
    if "seeds" in obj:
        try:
            seeds = [Candidate(float(s["x"]), float(s["y"]), float(s["centerness"])) for s in obj["seeds"]]
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"bad seed entry: {e}", source) from None
    return SceneDocument(LaneScene(h, w, tuple(lanes)), seeds, obj.get("category"))


def write_scene(path, scene: LaneScene, seeds=None, category: str | None = None) -> None:
    Path(path).write_text(dumps_scene(scene, seeds, category))


def read_scene(path) -> SceneDocument:
    return loads_scene(Path(path).read_text(), str(path))


# -- TuSimple ------------------------------------------------------------------

@dataclass
class TusimpleRecord:
    raw_file: str
    h_samples: list
    lanes: list  # per-lane x values, one per h_sample; negative means absent

    @property
    def polylines(self) -> list[Polyline]:
        out = []
        for i, xs in enumerate(self.lanes):
            pts = [(x, y) for x, y in zip(xs, self.h_samples) if x >= 0]
            try:
                out.append(Polyline(np.array(pts, dtype=np.float64).reshape(-1, 2)))
            except DegeneratePolylineError as e:
                raise ParseError(str(e), f"{self.raw_file}: lane {i}") from None
        return out

    def to_scene(self, height: int, width: int) -> LaneScene:
        return LaneScene(height, width, tuple(self.polylines))


def parse_tusimple_line(line: str, lineno: int = 1) -> TusimpleRecord:
    loc = f"line {lineno}"
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", loc) from None
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", loc)
    missing = {"lanes", "h_samples", "raw_file"} - obj.keys()
    if missing:
        raise ParseError(f"missing keys {sorted(missing)}", loc)
    h = obj["h_samples"]
    lanes = obj["lanes"]
    if not isinstance(h, list) or not isinstance(lanes, list):
        raise ParseError("lanes and h_samples must be lists", loc)
    for i, xs in enumerate(lanes):
        if not isinstance(xs, list):
            raise ParseError(f"lane {i} is not a list", loc)
        if len(xs) != len(h):
            raise ParseError("lane/h_samples length mismatch", f"{loc}: lane {i}")
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in xs):
            raise ParseError(f"lane {i} has non-numeric entries", loc)
    return TusimpleRecord(str(obj["raw_file"]), list(h), [list(xs) for xs in lanes])


def dumps_tusimple_line(rec: TusimpleRecord) -> str:
    return json.dumps({"lanes": rec.lanes, "h_samples": rec.h_samples, "raw_file": rec.raw_file})


def parse_tusimple(text: str) -> list[TusimpleRecord]:
    return [parse_tusimple_line(ln, i) for i, ln in enumerate(text.splitlines(), 1) if ln.strip()]


def read_tusimple(path) -> list[TusimpleRecord]:
    return parse_tusimple(Path(path).read_text())


def write_tusimple(path, records) -> None:
    Path(path).write_text("".join(dumps_tusimple_line(r) + "\n" for r in records))


def sample_rows(lane: Polyline, h_samples) -> list[float]:
    """x of ``lane`` at each row (first crossing), or -2 where it does not reach."""
    pts = lane.points
    out = []
    for h in h_samples:
        x = -2.0
        for (x0, y0), (x1, y1) in zip(pts[:-1], pts[1:]):
            if min(y0, y1) <= h <= max(y0, y1):
                x = x0 if y1 == y0 else x0 + (h - y0) / (y1 - y0) * (x1 - x0)
                break
        out.append(float(x))
    return out


def scene_to_tusimple(scene: LaneScene, h_samples, raw_file: str = "") -> TusimpleRecord:
    return TusimpleRecord(raw_file, list(h_samples), [sample_rows(ln, h_samples) for ln in scene.lanes])


# -- CULane ------------------------------------------------------------------

def parse_culane_lines(text: str) -> list[Polyline]:
    lanes = []
    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) % 2:
            raise ParseError(f"odd token count ({len(tokens)})", f"line {lineno}")
        vals = []
        for j, tok in enumerate(tokens, 1):
            try:
                vals.append(float(tok))
            except ValueError:
                raise ParseError(f"non-numeric token {tok!r}", f"line {lineno} token {j}") from None
        try:
            lanes.append(Polyline(np.array(vals).reshape(-1, 2)))
        except DegeneratePolylineError as e:
            raise ParseError(str(e), f"line {lineno}") from None
    return lanes


def dumps_culane_lines(lanes) -> str:
    return "".join(" ".join(f"{x!r} {y!r}" for x, y in ln.tolist()) + "\n" for ln in lanes)


def read_culane_lines(path) -> list[Polyline]:
    return parse_culane_lines(Path(path).read_text())

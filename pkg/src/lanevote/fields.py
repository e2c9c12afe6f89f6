"""Rasterize ground-truth lanes into centerness, instance and semantic fields.

A field is a 2-D float array indexed ``[row, col]``. Pixel ``(row, col)`` has
its center at the continuous coordinate ``(x=col, y=row)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Polyline, centerness_from_fractions, segment_projection

DEFAULT_THICKNESS = 5.0


@dataclass(frozen=True)
class LaneScene:
    height: int
    width: int
    lanes: tuple[Polyline, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError(f"scene dims must be positive, got {self.height}x{self.width}")
        object.__setattr__(self, "lanes", tuple(
            ln if isinstance(ln, Polyline) else Polyline(ln) for ln in self.lanes))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)


def check_field(f, unit_interval: bool = False) -> np.ndarray:
    f = np.asarray(f)
    if f.ndim != 2:
        raise ValueError(f"field must be 2-D, got shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("field contains non-finite values")
    if unit_interval and (f.min(initial=0.0) < 0.0 or f.max(initial=0.0) > 1.0):
        raise ValueError("field values must lie in [0, 1]")
    return f


def _check_thickness(thickness: float) -> float:
    if not thickness >= 1:
        raise ValueError(f"thickness must be >= 1, got {thickness}")
    return float(thickness)


_BLOCK_LIMIT = 2_000_000


def _segment_hits(pts, radius, shape, idx):
    """Pixels within ``radius`` of the segments ``idx``, as (lin, d2, t, seg) arrays.

    All segments are evaluated in one padded block of per-segment windows.
    """
    height, width = shape
    a, b = pts[idx], pts[idx + 1]
    lo = np.minimum(a, b) - radius
    hi = np.maximum(a, b) + radius
    c0 = np.maximum(np.ceil(lo[:, 0]), 0).astype(np.int64)
    r0 = np.maximum(np.ceil(lo[:, 1]), 0).astype(np.int64)
    c1 = np.minimum(np.floor(hi[:, 0]), width - 1).astype(np.int64)
    r1 = np.minimum(np.floor(hi[:, 1]), height - 1).astype(np.int64)
    wx = int(max((c1 - c0).max() + 1, 0))
    wy = int(max((r1 - r0).max() + 1, 0))
    if wx == 0 or wy == 0:
        return None
    cc = c0[:, None, None] + np.arange(wx)[None, None, :]
    rr = r0[:, None, None] + np.arange(wy)[None, :, None]
    cc, rr = np.broadcast_arrays(cc, rr)
    A = (a[:, 0, None, None], a[:, 1, None, None])
    B = (b[:, 0, None, None], b[:, 1, None, None])
    t, d2 = segment_projection(cc.astype(np.float64), rr.astype(np.float64), A, B)
    hit = (cc <= c1[:, None, None]) & (rr <= r1[:, None, None]) & (np.sqrt(d2) <= radius)
    s, _, _ = np.nonzero(hit)
    return rr[hit] * width + cc[hit], d2[hit], t[hit], idx[s]


def lane_pixels(lane: Polyline, radius: float, shape: tuple[int, int]):
    """In-bounds pixels within ``radius`` of ``lane``.

    Returns ``(rows, cols, arc_fraction)`` where the fraction belongs to the
    nearest point on the lane (earliest segment on ties). Pixels come out in
    row-major order.
    """
    pts = lane.points
    seg_len = lane.segment_lengths
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    # window area per segment decides how many segments share one padded block
    ext = np.abs(np.diff(pts, axis=0)) + 2 * radius + 1
    area = ext[:, 0] * ext[:, 1]
    order = np.argsort(area, kind="stable")
    area = area[order]
    parts, start = [], 0
    while start < len(order):
        # padded cost of taking m segments is area[start + m - 1] * m, increasing in m
        m = np.arange(1, len(order) - start + 1)
        take = max(1, int(np.count_nonzero(area[start:] * m <= _BLOCK_LIMIT)))
        stop = start + take
        hits = _segment_hits(pts, radius, shape, np.sort(order[start:stop]))
        if hits is not None:
            parts.append(hits)
        start = stop
    if not parts:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    lin, d2, t, seg = (np.concatenate(p) for p in zip(*parts))
    frac = (cum[seg] + t * seg_len[seg]) / cum[-1]
    order = np.lexsort((seg, d2, lin))
    lin, frac = lin[order], frac[order]
    first = np.ones(len(lin), dtype=bool)
    first[1:] = lin[1:] != lin[:-1]
    rows, cols = np.divmod(lin[first], shape[1])
    return rows, cols, np.clip(frac[first], 0.0, 1.0)


def rasterize_centerness(scene: LaneScene, thickness: float = DEFAULT_THICKNESS) -> np.ndarray:
    """Per-pixel arc-length centerness, constant across the stroke, max-composited."""
    radius = _check_thickness(thickness) / 2.0
    out = np.zeros(scene.shape, dtype=np.float64)
    for lane in scene.lanes:
        rows, cols, frac = lane_pixels(lane, radius, scene.shape)
        np.maximum.at(out, (rows, cols), centerness_from_fractions(frac))
    return out


def rasterize_lane(lane: Polyline, shape: tuple[int, int], thickness: float = DEFAULT_THICKNESS) -> np.ndarray:
    radius = _check_thickness(thickness) / 2.0
    mask = np.zeros(shape, dtype=np.float64)
    rows, cols, _ = lane_pixels(lane, radius, shape)
    mask[rows, cols] = 1.0
    return mask


def rasterize_instance_masks(scene: LaneScene, thickness: float = DEFAULT_THICKNESS) -> list[np.ndarray]:
    return [rasterize_lane(lane, scene.shape, thickness) for lane in scene.lanes]


def rasterize_semantic(scene: LaneScene, thickness: float = DEFAULT_THICKNESS, instances=None) -> np.ndarray:
    if instances is None:
        instances = rasterize_instance_masks(scene, thickness)
    out = np.zeros(scene.shape, dtype=np.float64)
    for m in instances:
        np.maximum(out, m, out=out)
    return out

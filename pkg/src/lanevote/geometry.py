"""Ordered polylines and arc-length centerness."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBoxError, DegeneratePolylineError


@dataclass(frozen=True, eq=False)
class Polyline:
    """An ordered lane: ``points`` is an (M, 2) array of (x, y) pixel coordinates.

    Point order is the traversal order from the first keypoint to the last.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DegeneratePolylineError(f"expected (M, 2) points, got shape {pts.shape}")
        if len(pts) < 2:
            raise DegeneratePolylineError("degenerate polyline: fewer than 2 points")
        if not np.all(np.isfinite(pts)):
            raise DegeneratePolylineError("degenerate polyline: non-finite coordinates")
        if np.any(np.all(pts[1:] == pts[:-1], axis=1)):
            raise DegeneratePolylineError("degenerate polyline: consecutive duplicate points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polyline):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(np.all(self.points == other.points))

    def __hash__(self) -> int:
        return hash(self.points.tobytes())

    @property
    def segment_lengths(self) -> np.ndarray:
        d = np.diff(self.points, axis=0)
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def length(self) -> float:
        return float(self.segment_lengths.sum())

    def reversed(self) -> Polyline:
        return Polyline(self.points[::-1])

    def tolist(self) -> list[list[float]]:
        return self.points.tolist()


@dataclass(frozen=True)
class CenternessProfile:
    s: np.ndarray
    c: np.ndarray

    @property
    def peak_index(self) -> int:
        # np.argmax returns the first maximum, which is the tie rule we want.
        return int(np.argmax(self.c))


def _as_polyline(lane) -> Polyline:
    return lane if isinstance(lane, Polyline) else Polyline(lane)


def arc_fractions(lane) -> np.ndarray:
    """Cumulative arc length at each keypoint divided by the total length.

    The first value is exactly 0 and the last exactly 1.
    """
    lane = _as_polyline(lane)
    cum = np.concatenate([[0.0], np.cumsum(lane.segment_lengths)])
    total = cum[-1]
    if not total > 0.0:
        raise DegeneratePolylineError("degenerate polyline: zero total length")
    s = cum / total
    s[-1] = 1.0
    return s


def centerness_from_fractions(s) -> np.ndarray:
    """Map arc fractions to the tent profile peaking at fraction 0.5."""
    s = np.asarray(s, dtype=np.float64)
    return np.clip(1.0 - np.abs(s - 0.5) / 0.5, 0.0, 1.0)


def curve_centerness(lane) -> CenternessProfile:
    s = arc_fractions(lane)
    return CenternessProfile(s=s, c=centerness_from_fractions(s))


def box_centerness(l: float, r: float, t: float, b: float) -> float:
    """Bounding-box centerness from distances to the left/right/top/bottom edges."""
    if min(l, r, t, b) < 0:
        raise DegenerateBoxError(f"negative box distance in {(l, r, t, b)}")
    if max(l, r) == 0 or max(t, b) == 0:
        raise DegenerateBoxError("degenerate box")
    return float(np.sqrt(min(l, r) / max(l, r) * (min(t, b) / max(t, b))))


def box_centerness_along(points, box=None) -> np.ndarray:
    """Box centerness of each point w.r.t. ``box = (lo, hi)`` corners.

    ``box`` defaults to the axis-aligned box of ``points``. A zero-extent
    axis (a perfectly horizontal or vertical lane) makes the ratio 0/0; that
    axis contributes a factor of 0, so every point scores 0.
    """
    pts = np.asarray(points, dtype=np.float64)
    if box is None:
        lo, hi = pts.min(axis=0), pts.max(axis=0)
    else:
        lo, hi = (np.asarray(v, dtype=np.float64) for v in box)
    near = np.maximum(pts - lo, 0.0)
    far = np.maximum(hi - pts, 0.0)
    mn = np.minimum(near, far)
    mx = np.maximum(near, far)
    ratio = np.divide(mn, mx, out=np.zeros_like(mn), where=mx > 0)
    return np.sqrt(ratio[:, 0] * ratio[:, 1])


def resample(lane, n: int) -> Polyline:
    """``n`` points at uniform arc-fraction spacing; endpoints are kept exactly."""
    if n < 2:
        raise ValueError("resample needs n >= 2")
    lane = _as_polyline(lane)
    s = arc_fractions(lane)
    targets = np.linspace(0.0, 1.0, n)
    pts = np.column_stack([np.interp(targets, s, lane.points[:, 0]),
                           np.interp(targets, s, lane.points[:, 1])])
    pts[0] = lane.points[0]
    pts[-1] = lane.points[-1]
    return Polyline(pts)


def dense_samples(lane, spacing: float = 1.0) -> np.ndarray:
    """Points along ``lane`` at most ``spacing`` apart (at least one per pixel of arc)."""
    lane = _as_polyline(lane)
    n = max(2, int(np.ceil(lane.length / spacing)) + 1)
    return resample(lane, n).points


def segment_projection(px, py, a, b):
    """Clamped projection parameter and squared distance from points to segment ``a``-``b``."""
    abx, aby = b[0] - a[0], b[1] - a[1]
    apx, apy = px - a[0], py - a[1]
    den = abx * abx + aby * aby
    num = apx * abx + apy * aby
    # a segment short enough for den to underflow projects onto its start point
    t = np.clip(np.divide(num, den, out=np.zeros(np.broadcast(num, den).shape), where=den > 0), 0.0, 1.0)
    dx = apx - t * abx
    dy = apy - t * aby
    return t, dx * dx + dy * dy


def project_onto(lane, points) -> tuple[np.ndarray, np.ndarray]:
    """Distance from each point to ``lane`` and the arc fraction of its nearest point.

    Ties between segments resolve to the earlier segment.
    """
    lane = _as_polyline(lane)
    p = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    pts = lane.points
    t, d2 = segment_projection(p[:, None, 0], p[:, None, 1], pts[:-1].T, pts[1:].T)
    seg = np.argmin(d2, axis=1)
    rows = np.arange(len(p))
    seg_lengths = lane.segment_lengths
    cum = np.concatenate([[0.0], np.cumsum(seg_lengths)])
    frac = (cum[seg] + t[rows, seg] * seg_lengths[seg]) / cum[-1]
    return np.sqrt(d2[rows, seg]), np.clip(frac, 0.0, 1.0)


def distance_to(lane, points) -> np.ndarray:
    return project_onto(lane, points)[0]

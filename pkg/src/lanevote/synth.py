"""Deterministic synthetic lane scenes and a noisy stand-in for a centerness head."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PlacementError
from .fields import LaneScene
from .geometry import Polyline

MIN_SEPARATION = 20.0
MIN_LANE_LENGTH = 40.0
MAX_ATTEMPTS = 100
ROW_STEP = 8
# template scenes recur with this period; the offsets below pick which index
TEMPLATE_PERIOD = 25
HORIZONTAL_OFFSET = 3
CURVED_OFFSET = 8


@dataclass(frozen=True)
class WorldConfig:
    height: int = 256
    width: int = 512
    lanes_per_scene: tuple[int, int] = (2, 5)
    curvature: float = 0.0015
    noise: float = 0.0
    run_seed: int = 0

    def __post_init__(self):
        if self.height < 64 or self.width < 64:
            raise ValueError("height and width must be >= 64")
        lo, hi = self.lanes_per_scene
        if lo < 1 or hi < lo:
            raise ValueError(f"invalid lanes_per_scene range {self.lanes_per_scene}")
        if self.curvature < 0 or self.noise < 0 or self.run_seed < 0:
            raise ValueError("curvature, noise and run_seed must be non-negative")


def rng_for(run_seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (run_seed, index, stream)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([run_seed, index, stream])))


def template_kind(index: int) -> str | None:
    r = index % TEMPLATE_PERIOD
    if r == HORIZONTAL_OFFSET:
        return "horizontal"
    if r == CURVED_OFFSET:
        return "curved"
    return None


def _longest_inside_run(pts: np.ndarray, height: int, width: int) -> np.ndarray:
    inside = (pts[:, 0] >= 0) & (pts[:, 0] <= width - 1) & (pts[:, 1] >= 0) & (pts[:, 1] <= height - 1)
    best, start = (0, 0), None
    for i, ok in enumerate(np.append(inside, False)):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    return pts[best[0]:best[1]]


def _offsets(rng, n: int, width: int) -> np.ndarray:
    if n == 1:
        return np.zeros(1)
    gmax = min(110.0, 0.8 * width / (n - 1))
    gmin = min(55.0, 0.7 * gmax)
    gaps = rng.uniform(gmin, gmax, size=n - 1)
    x = np.concatenate([[0.0], np.cumsum(gaps)])
    return x - x.mean()


def _vertical_lanes(rng, n: int, cfg: WorldConfig, y_min: float, curved: bool) -> list[np.ndarray]:
    h, w = cfg.height, cfg.width
    center = w / 2 + rng.uniform(-0.1, 0.1) * w
    offs = _offsets(rng, n, w)
    grid = np.arange(0, h, ROW_STEP, dtype=np.float64)
    lanes = []
    if curved:
        lo, hi = max(y_min, 0.12 * h), 0.96 * h
        vertex = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        a = rng.choice([-1.0, 1.0]) * rng.uniform(60.0, 100.0) / half ** 2
        center -= a * half ** 2 / 2
        for off in offs:
            ys = grid[(grid >= lo) & (grid <= hi)]
            lanes.append(np.column_stack([center + off + a * (ys - vertex) ** 2, ys]))
        return lanes
    a = rng.uniform(-cfg.curvature, cfg.curvature)
    b = rng.uniform(-0.4, 0.4)
    for off in offs:
        top = rng.uniform(max(y_min, 0.1 * h), 0.4 * h)
        bot = rng.uniform(0.8 * h, h - 1)
        ys = grid[(grid >= top) & (grid <= bot)]
        lanes.append(np.column_stack([center + off + b * (ys - h) + a * (ys - h) ** 2, ys]))
    return lanes


def _horizontal_lane(rng, cfg: WorldConfig) -> np.ndarray:
    h, w = cfg.height, cfg.width
    y = float(rng.integers(round(0.06 * h), round(0.12 * h) + 1))
    xa = int(rng.integers(round(0.05 * w), round(0.2 * w) + 1))
    half = int(rng.integers(round(0.2 * w), round(0.35 * w) + 1))
    xs = np.append(np.arange(xa, xa + 2 * half, ROW_STEP), xa + 2 * half).astype(np.float64)
    return np.column_stack([xs, np.full(len(xs), y)])


def _separated(lanes: list[np.ndarray]) -> bool:
    for i in range(len(lanes)):
        for j in range(i + 1, len(lanes)):
            a, b = lanes[i], lanes[j]
            rows, ia, ib = np.intersect1d(a[:, 1], b[:, 1], return_indices=True)
            if len(rows) and np.min(np.abs(a[ia, 0] - b[ib, 0])) < MIN_SEPARATION:
                return False
    return True


def generate_scene(cfg: WorldConfig, index: int) -> LaneScene:
    """Scene ``index`` of the world described by ``cfg``; a pure function of both.

    Lanes are quadratic curves ``x(y)`` sampled every few rows, clipped to the
    image, and at least 20 px apart at every shared row. Template indices swap
    one lane for a perfectly horizontal one, or bend all lanes strongly.
    """
    rng = rng_for(cfg.run_seed, index)
    kind = template_kind(index)
    lo, hi = cfg.lanes_per_scene
    for _ in range(MAX_ATTEMPTS):
        n = int(rng.integers(lo, hi + 1))
        extra = []
        y_min = 0.0
        if kind == "horizontal":
            horiz = _horizontal_lane(rng, cfg)
            extra = [horiz]
            y_min = horiz[0, 1] + 24
            n -= 1
        raw = _vertical_lanes(rng, n, cfg, y_min, kind == "curved") if n else []
        lanes = [_longest_inside_run(p, cfg.height, cfg.width) for p in raw]
        if any(len(p) < 2 for p in lanes):
            continue
        if any(Polyline(p).length < MIN_LANE_LENGTH for p in lanes):
            continue
        if not _separated(lanes):
            continue
        return LaneScene(cfg.height, cfg.width, tuple(Polyline(p) for p in lanes + extra))
    raise PlacementError(f"cannot place lanes for scene {index} after {MAX_ATTEMPTS} attempts")


def corrupt_field(field, noise: float, run_seed: int = 0, index: int = 0) -> np.ndarray:
    """Add Gaussian noise keyed by (run_seed, index) and clamp to [0, 1]."""
    f = np.asarray(field, dtype=np.float64)
    if noise == 0:
        return f.copy()
    rng = rng_for(run_seed, index, stream=1)
    return np.clip(f + rng.normal(0.0, noise, size=f.shape), 0.0, 1.0)

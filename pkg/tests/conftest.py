import math

import numpy as np
import pytest
from hypothesis import strategies as st

from lanevote.geometry import Polyline


def naive_arc_fractions(points):
    """Reference: plain Python cumulative Euclidean sum."""
    cum = [0.0]
    for (x0, y0), (x1, y1) in zip(points[:-1], points[1:]):
        cum.append(cum[-1] + math.sqrt((x1 - x0) ** 2 + (y1 - y0) ** 2))
    return [c / cum[-1] for c in cum]


def random_polyline(rng, n=None, scale=200.0):
    n = n or int(rng.integers(2, 60))
    steps = rng.normal(0, 1, size=(n - 1, 2)) * scale / n + 1e-3
    return Polyline(np.cumsum(np.vstack([rng.uniform(0, scale, 2), steps]), axis=0))


coord = st.floats(-500, 500, allow_nan=False, allow_infinity=False)


@st.composite
def polylines(draw, min_points=2, max_points=30):
    pts = draw(st.lists(st.tuples(coord, coord), min_size=min_points, max_size=max_points))
    arr = np.array(pts, dtype=np.float64)
    seg = np.hypot(*np.diff(arr, axis=0).T)
    # keep segments long enough that the total length is not dominated by round-off
    if np.any(seg < 1e-3):
        from hypothesis import assume
        assume(False)
    return Polyline(arr)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def count_components(mask):
    """4-connected component count by breadth-first flood fill."""
    from collections import deque
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    seen = np.zeros_like(mask)
    n = 0
    for r0 in range(h):
        for c0 in range(w):
            if not mask[r0, c0] or seen[r0, c0]:
                continue
            n += 1
            seen[r0, c0] = True
            q = deque([(r0, c0)])
            while q:
                r, c = q.popleft()
                for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < h and 0 <= cc < w and mask[rr, cc] and not seen[rr, cc]:
                        seen[rr, cc] = True
                        q.append((rr, cc))
    return n


def naive_fps(xy, first, k):
    """Textbook farthest point sampling from a fixed first index."""
    n = len(xy)
    picked = [first]
    while len(picked) < min(k, n):
        best, best_d = None, -1.0
        for j in range(n):
            if j in picked:
                continue
            d = min(math.dist(xy[j], xy[p]) for p in picked)
            if d > best_d:
                best, best_d = j, d
        picked.append(best)
    return picked


def brute_stroke_mask(lane_points, shape, width):
    """Pixels whose exact distance to the polyline is at most ``width / 2`` (pure Python)."""
    h, w = shape
    r2 = (width / 2.0) ** 2
    pts = [tuple(map(float, p)) for p in lane_points]
    out = set()
    for r in range(h):
        for c in range(w):
            for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
                abx, aby = bx - ax, by - ay
                t = ((c - ax) * abx + (r - ay) * aby) / (abx * abx + aby * aby)
                t = min(1.0, max(0.0, t))
                dx, dy = c - ax - t * abx, r - ay - t * aby
                if dx * dx + dy * dy <= r2:
                    out.add((r, c))
                    break
    return out


def brute_iou(a, b):
    union = len(a | b)
    return len(a & b) / union if union else 0.0


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

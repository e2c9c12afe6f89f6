"""Seed-conditioned grouping: the feature broadcast contract and non-learned groupers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, LaneVoteError, SeedOutOfBoundsError
from .fields import DEFAULT_THICKNESS, LaneScene, rasterize_instance_masks
from .geometry import distance_to
from .sampling import Candidate


@dataclass(frozen=True, eq=False)
class GroupResult:
    seed: Candidate
    mask: np.ndarray
    lane_index: int | None = None  # set by groupers that know the source lane


def seed_pixel(seed: Candidate) -> tuple[int, int]:
    """(row, col) of the pixel a seed falls on."""
    return int(np.rint(seed.y)), int(np.rint(seed.x))


def gather_broadcast_concat(features, seeds: list[Candidate]) -> list[np.ndarray]:
    """For each seed, stack the control map with its seed feature tiled over H x W.

    ``features`` is a (C, H, W) array; each output is (2C, H, W) with the
    control map in the first C channels.
    """
    feats = np.asarray(features)
    if feats.ndim != 3:
        raise DimensionMismatchError(f"feature map must be (C, H, W), got {feats.shape}")
    c, h, w = feats.shape
    out = []
    for seed in seeds:
        r, col = seed_pixel(seed)
        if not (0 <= r < h and 0 <= col < w):
            raise SeedOutOfBoundsError(f"seed outside feature map: ({seed.x}, {seed.y})")
        tiled = np.broadcast_to(feats[:, r, col][:, None, None], (c, h, w))
        out.append(np.concatenate([feats, tiled], axis=0))
    return out


def nearest_lane(scene: LaneScene, seed: Candidate) -> int:
    d = [float(distance_to(lane, [[seed.x, seed.y]])[0]) for lane in scene.lanes]
    return int(np.argmin(d))


def oracle_grouper(scene: LaneScene, seeds: list[Candidate], thickness: float = DEFAULT_THICKNESS,
                   flip_noise: float = 0.0, run_seed: int = 0, instances=None) -> list[GroupResult]:
    """Assign each seed its nearest ground-truth lane's mask, optionally with pixel flips.

    Flips for seed ``i`` are drawn from a generator keyed on ``(run_seed, i)``.
    """
    if not scene.lanes:
        raise LaneVoteError("oracle grouper needs a scene with at least one lane")
    if not 0.0 <= flip_noise <= 1.0:
        raise ValueError("flip_noise must lie in [0, 1]")
    if instances is None:
        instances = rasterize_instance_masks(scene, thickness)
    groups = []
    for i, seed in enumerate(seeds):
        li = nearest_lane(scene, seed)
        mask = instances[li].copy()
        if flip_noise > 0:
            rng = np.random.default_rng([run_seed, i])
            flips = rng.random(mask.shape) < flip_noise
            mask[flips] = 1.0 - mask[flips]
        groups.append(GroupResult(seed, mask, li))
    return groups


def distance_grouper(semantic, seeds: list[Candidate], threshold: float = 0.5) -> list[GroupResult]:
    """Give every foreground pixel to its nearest seed; earlier seeds win ties."""
    if not seeds:
        raise LaneVoteError("distance grouper needs at least one seed")
    sem = np.asarray(semantic)
    fg_r, fg_c = np.nonzero(sem >= threshold)
    sx = np.array([s.x for s in seeds])
    sy = np.array([s.y for s in seeds])
    dx = fg_c[None, :] - sx[:, None]
    dy = fg_r[None, :] - sy[:, None]
    owner = np.argmin(dx * dx + dy * dy, axis=0)
    groups = []
    for i, seed in enumerate(seeds):
        mask = np.zeros(sem.shape, dtype=np.float64)
        sel = owner == i
        mask[fg_r[sel], fg_c[sel]] = 1.0
        groups.append(GroupResult(seed, mask))
    return groups

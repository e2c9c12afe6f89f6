"""End-to-end decoding: centerness field -> seeds -> groups -> deduplicated lanes."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dedup import DedupConfig, attention_matrix, suppress
from .fields import DEFAULT_THICKNESS, LaneScene
from .geometry import Polyline
from .grouping import GroupResult, distance_grouper, oracle_grouper
from .sampling import Candidate, SamplerConfig, cfps, field_to_candidates

log = logging.getLogger(__name__)

GROUPERS = ("oracle", "distance")


@dataclass
class DecodeResult:
    seeds: list[Candidate]
    groups: list[GroupResult]
    kept: list[GroupResult]
    lanes: list[Polyline] = field(default_factory=list)

    def attention(self) -> np.ndarray:
        return attention_matrix(self.groups)


def trace_mask(mask, threshold: float = 0.5) -> Polyline | None:
    """Centerline of a lane mask from per-row centroids of pixels >= ``threshold``.

    Masks wider than tall are traced per column instead, so horizontal lanes
    do not collapse to a stub. Returns None when fewer than two rows (columns)
    carry mass.
    """
    m = np.asarray(mask) >= threshold
    rows, cols = np.nonzero(m)
    if len(rows) == 0:
        return None
    by_col = np.ptp(cols) > np.ptp(rows)
    major, minor = (cols, rows) if by_col else (rows, cols)
    keys, inv = np.unique(major, return_inverse=True)
    if len(keys) < 2:
        return None
    centroid = np.bincount(inv, weights=minor) / np.bincount(inv)
    pts = np.column_stack([keys, centroid] if by_col else [centroid, keys]).astype(np.float64)
    return Polyline(pts)


def decode(centerness, sampler: SamplerConfig = SamplerConfig(), dedup: DedupConfig = DedupConfig(),
           grouper: str = "oracle", scene: LaneScene | None = None, semantic=None,
           thickness: float = DEFAULT_THICKNESS, class_threshold: float = 0.5,
           flip_noise: float = 0.0, run_seed: int = 0, instances=None) -> DecodeResult:
    """Run sampling, grouping and suppression on one centerness field.

    ``grouper="oracle"`` needs the ground-truth ``scene``; ``"distance"``
    needs a ``semantic`` field. Raises NoViableCandidatesError when no pixel
    reaches ``sampler.c_min``.
    """
    seeds = cfps(field_to_candidates(centerness, sampler.c_min), sampler)
    if grouper == "oracle":
        if scene is None:
            raise ValueError("oracle grouper requires a scene")
        groups = oracle_grouper(scene, seeds, thickness, flip_noise, run_seed, instances)
    elif grouper == "distance":
        if semantic is None:
            raise ValueError("distance grouper requires a semantic field")
        groups = distance_grouper(semantic, seeds, class_threshold)
    else:
        raise ValueError(f"unknown grouper {grouper!r}; expected one of {GROUPERS}")
    kept = suppress(groups, dedup)
    lanes = []
    for g in kept:
        ln = trace_mask(g.mask)
        if ln is None:
            log.debug("group seeded at (%s, %s) traced to fewer than 2 points", g.seed.x, g.seed.y)
            continue
        lanes.append(ln)
    return DecodeResult(seeds, groups, kept, lanes)

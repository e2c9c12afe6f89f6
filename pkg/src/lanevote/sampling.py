"""Centerness-weighted farthest point sampling of seed points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoViableCandidatesError


@dataclass(frozen=True)
class Candidate:
    x: float
    y: float
    centerness: float

    def __post_init__(self):
        if not 0.0 <= self.centerness <= 1.0:
            raise ValueError(f"centerness {self.centerness} outside [0, 1]")

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class SamplerConfig:
    k: int = 5
    gamma: float = 1.0
    c_min: float = 0.1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if not 0.0 <= self.c_min <= 1.0:
            raise ValueError("c_min must lie in [0, 1]")


# A SeedSet is simply the list of sampled candidates in sampling order.
SeedSet = list


def field_to_candidates(field, c_min: float = 0.1) -> list[Candidate]:
    """One candidate per pixel with value >= ``c_min``, in row-major order."""
    f = np.asarray(field)
    rows, cols = np.nonzero(f >= c_min)
    vals = f[rows, cols]
    return [Candidate(float(c), float(r), float(v)) for r, c, v in zip(rows, cols, vals)]


def cfps_indices(xy, centerness, k: int, gamma: float) -> list[int]:
    """Indices picked by centerness-weighted FPS, in sampling order.

    Starts from the highest-centerness point; each later pick maximises
    ``c_j**gamma * min_p ||x_j - x_p||`` over the already picked ``p``.
    Every argmax resolves ties to the lowest index.
    """
    xy = np.asarray(xy, dtype=np.float64)
    c = np.asarray(centerness, dtype=np.float64)
    n = len(c)
    if n == 0:
        return []
    weight = c ** gamma
    picked = [int(np.argmax(c))]
    dmin = np.full(n, np.inf)
    taken = np.zeros(n, dtype=bool)
    taken[picked[0]] = True
    while len(picked) < min(k, n):
        p = xy[picked[-1]]
        dx = xy[:, 0] - p[0]
        dy = xy[:, 1] - p[1]
        np.minimum(dmin, np.sqrt(dx * dx + dy * dy), out=dmin)
        score = weight * dmin
        score[taken] = -np.inf
        j = int(np.argmax(score))
        picked.append(j)
        taken[j] = True
    return picked


def cfps(candidates: list[Candidate], config: SamplerConfig) -> list[Candidate]:
    viable = [cd for cd in candidates if cd.centerness >= config.c_min]
    if not viable:
        raise NoViableCandidatesError("no viable candidates")
    xy = np.array([[cd.x, cd.y] for cd in viable])
    c = np.array([cd.centerness for cd in viable])
    return [viable[i] for i in cfps_indices(xy, c, config.k, config.gamma)]

"""Cross-instance attention voting: mask similarity and greedy duplicate suppression."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, LaneVoteError


@dataclass(frozen=True)
class DedupConfig:
    attn_threshold: float = 0.5

    def __post_init__(self):
        # 1.0 is allowed: nothing can exceed it, so suppression is disabled
        if not 0.0 < self.attn_threshold <= 1.0:
            raise ValueError("attn_threshold must lie in (0, 1]")


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shape mismatch: {x.shape} vs {y.shape}")
    return x.ravel(), y.ravel()


def _dice_form(xy: float, xx: float, yy: float) -> float:
    denom = xx + yy
    return 0.0 if denom == 0 else 2.0 * xy / denom


def soft_iou(x, y) -> float:
    """Continuous Dice similarity ``2*sum(x*y) / (sum(x**2) + sum(y**2))``; 0 for two zero fields."""
    x, y = _pair(x, y)
    return _dice_form(float(x @ y), float(x @ x), float(y @ y))


def set_dice(x, y) -> float:
    """``2|X & Y| / (|X| + |Y|)`` for binary masks."""
    x, y = _pair(x, y)
    for m in (x, y):
        if not np.all((m == 0) | (m == 1)):
            raise LaneVoteError("set_dice expects binary masks")
    xb, yb = x.astype(bool), y.astype(bool)
    inter = int(np.count_nonzero(xb & yb))
    total = int(np.count_nonzero(xb)) + int(np.count_nonzero(yb))
    return 0.0 if total == 0 else 2.0 * inter / total


def attention_matrix(groups) -> np.ndarray:
    """K x K pairwise soft IoU between group masks."""
    if not groups:
        raise LaneVoteError("attention matrix needs at least one group")
    masks = [np.asarray(g.mask, dtype=np.float64) for g in groups]
    shape = masks[0].shape
    for m in masks:
        if m.shape != shape:
            raise DimensionMismatchError(f"shape mismatch: {m.shape} vs {shape}")
    flat = [m.ravel() for m in masks]
    sq = [float(v @ v) for v in flat]
    k = len(flat)
    out = np.zeros((k, k))
    # pairwise dots (not a Gram matmul) so entries equal soft_iou bit-for-bit
    for i in range(k):
        for j in range(i, k):
            out[i, j] = out[j, i] = _dice_form(float(flat[i] @ flat[j]), sq[i], sq[j])
    return out


def suppress(groups, config: DedupConfig = DedupConfig()):
    """Keep groups in descending seed centerness, dropping any whose score with a
    kept group exceeds the threshold. Equal centerness keeps the input order."""
    if not groups:
        return []
    attn = attention_matrix(groups)
    order = sorted(range(len(groups)), key=lambda i: -groups[i].seed.centerness)
    kept: list[int] = []
    for i in order:
        if all(attn[i, j] <= config.attn_threshold for j in kept):
            kept.append(i)
    return [groups[i] for i in kept]

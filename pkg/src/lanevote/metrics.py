"""Lane-level benchmark metrics: TuSimple point accuracy and CULane mask-IoU F1."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionMismatchError
from .fields import LaneScene, lane_pixels

ABSENT = -2.0


@dataclass
class TusimpleFrame:
    h_samples: list
    gt_lanes: list
    pred_lanes: list

    def __post_init__(self):
        n = len(self.h_samples)
        for kind, lanes in (("gt", self.gt_lanes), ("pred", self.pred_lanes)):
            for i, xs in enumerate(lanes):
                if len(xs) != n:
                    raise DimensionMismatchError(
                        f"{kind} lane {i} has {len(xs)} x values for {n} h_samples")


@dataclass
class MatchReport:
    tp: int
    fp: int
    fn: int
    accuracy: float | None = None
    precision: float = field(init=False)
    recall: float = field(init=False)
    f1: float = field(init=False)
    fp_rate: float = field(init=False)
    fn_rate: float = field(init=False)

    def __post_init__(self):
        n_pred = self.tp + self.fp
        n_gt = self.tp + self.fn
        self.precision = self.tp / n_pred if n_pred else 0.0
        self.recall = self.tp / n_gt if n_gt else 0.0
        pr = self.precision + self.recall
        self.f1 = 2 * self.precision * self.recall / pr if pr else 0.0
        self.fp_rate = self.fp / n_pred if n_pred else 0.0
        self.fn_rate = self.fn / n_gt if n_gt else 0.0

    def as_dict(self) -> dict:
        return asdict(self)


def _greedy_pairs(counts: np.ndarray, eligible: np.ndarray) -> list[tuple[int, int]]:
    """One-to-one pairs by descending count; ties go to lower GT, then lower pred index."""
    g_idx, p_idx = np.nonzero(eligible)
    order = sorted(zip(g_idx, p_idx), key=lambda gp: (-counts[gp], gp[0], gp[1]))
    used_g, used_p, pairs = set(), set(), []
    for g, p in order:
        if g in used_g or p in used_p:
            continue
        used_g.add(g)
        used_p.add(p)
        pairs.append((int(g), int(p)))
    return pairs


def tusimple_eval(frames, dist_px: float = 20.0, match_ratio: float = 0.85) -> MatchReport:
    """Point accuracy plus lane-level FP/FN over TuSimple-style row samples.

    A prediction matches a GT lane when at least ``match_ratio`` of the GT
    lane's valid rows have a prediction strictly closer than ``dist_px``.
    Accuracy is matched-correct points over all valid GT points.
    """
    tp = fp = fn = 0
    correct = total = 0
    for fr in frames:
        gt = np.array(fr.gt_lanes, dtype=np.float64).reshape(len(fr.gt_lanes), len(fr.h_samples))
        pr = np.array(fr.pred_lanes, dtype=np.float64).reshape(len(fr.pred_lanes), len(fr.h_samples))
        gt_valid = gt >= 0
        n_valid = gt_valid.sum(axis=1)
        keep = n_valid > 0
        gt, gt_valid, n_valid = gt[keep], gt_valid[keep], n_valid[keep]
        total += int(n_valid.sum())
        both = gt_valid[:, None, :] & (pr >= 0)[None, :, :]
        close = both & (np.abs(gt[:, None, :] - pr[None, :, :]) < dist_px)
        counts = close.sum(axis=2)
        eligible = counts >= match_ratio * n_valid[:, None]
        pairs = _greedy_pairs(counts, eligible)
        tp += len(pairs)
        fn += len(gt) - len(pairs)
        fp += len(pr) - len(pairs)
        correct += sum(int(counts[g, p]) for g, p in pairs)
    return MatchReport(tp, fp, fn, accuracy=correct / total if total else 0.0)


def mask_iou(a, b) -> float:
    """True set IoU of two binary masks; 0 when both are empty."""
    a = np.asarray(a) > 0
    b = np.asarray(b) > 0
    union = np.count_nonzero(a | b)
    return np.count_nonzero(a & b) / union if union else 0.0


@lru_cache(maxsize=512)
def _stroke_index(lane, shape, stroke_width: float) -> np.ndarray:
    """Sorted linear indices of the pixels in ``lane``'s stroke."""
    rows, cols, _ = lane_pixels(lane, stroke_width / 2.0, shape)
    out = rows * shape[1] + cols
    out.setflags(write=False)
    return out


def iou_matrix(pred: LaneScene, gt: LaneScene, stroke_width: float = 30.0) -> np.ndarray:
    """IoU of every (pred, GT) pair of ``stroke_width``-wide lane masks."""
    if pred.shape != gt.shape:
        raise DimensionMismatchError(f"scene dims differ: {pred.shape} vs {gt.shape}")
    pm = [_stroke_index(ln, gt.shape, float(stroke_width)) for ln in pred.lanes]
    gm = [_stroke_index(ln, gt.shape, float(stroke_width)) for ln in gt.lanes]
    out = np.zeros((len(pm), len(gm)))
    for i, a in enumerate(pm):
        for j, b in enumerate(gm):
            inter = len(np.intersect1d(a, b, assume_unique=True))
            union = len(a) + len(b) - inter
            out[i, j] = inter / union if union else 0.0
    return out


def _scene_counts(pred: LaneScene, gt: LaneScene, iou_threshold: float, stroke_width: float):
    ious = iou_matrix(pred, gt, stroke_width)
    if ious.size:
        rows, cols = linear_sum_assignment(ious, maximize=True)
        tp = int(np.count_nonzero(ious[rows, cols] > iou_threshold))
    else:
        tp = 0
    return tp, len(pred.lanes) - tp, len(gt.lanes) - tp


def culane_eval(pred_scenes, gt_scenes, iou_threshold: float = 0.5, stroke_width: float = 30.0) -> MatchReport:
    """Lane F1 where a true positive needs stroke-mask IoU above ``iou_threshold``.

    Predictions and ground truth are paired by an optimal assignment that
    maximises total IoU within each scene.
    """
    if len(pred_scenes) != len(gt_scenes):
        raise DimensionMismatchError(f"{len(pred_scenes)} prediction scenes vs {len(gt_scenes)} GT scenes")
    tp = fp = fn = 0
    for pred, gt in zip(pred_scenes, gt_scenes):
        a, b, c = _scene_counts(pred, gt, iou_threshold, stroke_width)
        tp, fp, fn = tp + a, fp + b, fn + c
    return MatchReport(tp, fp, fn)


def culane_eval_by_category(pred_scenes, gt_scenes, categories, iou_threshold: float = 0.5,
                            stroke_width: float = 30.0) -> dict[str, MatchReport]:
    """Per-tag reports; ``categories[i]`` tags scene ``i``. The key ``"total"`` aggregates all."""
    if not (len(pred_scenes) == len(gt_scenes) == len(categories)):
        raise DimensionMismatchError("scene and category lists must align")
    acc: dict[str, list[int]] = {}
    for pred, gt, tag in zip(pred_scenes, gt_scenes, categories):
        counts = _scene_counts(pred, gt, iou_threshold, stroke_width)
        for key in (tag, "total"):
            slot = acc.setdefault(key, [0, 0, 0])
            for i in range(3):
                slot[i] += counts[i]
    return {k: MatchReport(*v) for k, v in acc.items()}

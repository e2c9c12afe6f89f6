"""Training loss kernels with closed-form gradients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dedup import soft_iou
from .errors import DimensionMismatchError, LaneVoteError

EPS = 1e-7


@dataclass(frozen=True)
class FocalConfig:
    alpha: float = 2.0
    beta: float = 4.0
    t_ctr: float = 0.95
    reduction: str = "mean"  # "mean", "sum" or "none"

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")
        if not 0.0 < self.t_ctr < 1.0:
            raise ValueError("t_ctr must lie in (0, 1)")
        if self.reduction not in ("mean", "sum", "none"):
            raise ValueError(f"unknown reduction {self.reduction!r}")


def clamp_probability(p, eps: float = EPS):
    return np.clip(p, eps, 1.0 - eps)


def _check_open(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise LaneVoteError("probability out of open interval (0, 1)")
    return p


def _focal(p, y, cfg: FocalConfig):
    p = _check_open(p)
    y = np.asarray(y, dtype=np.float64)
    pos = y >= cfg.t_ctr
    a = cfg.alpha
    w = np.abs(1.0 - y) ** cfg.beta
    pos_loss = -((1.0 - p) ** a) * np.log(p)
    neg_loss = -w * p ** a * np.log1p(-p)
    return np.where(pos, pos_loss, neg_loss)


def _reduce(v, reduction: str):
    if reduction == "none":
        return v
    return float(v.sum()) if reduction == "sum" else float(v.mean())


def focal_loss(p, y, cfg: FocalConfig = FocalConfig()):
    """Weighted focal loss against ground-truth centerness ``y``.

    Scalars in give a scalar out; arrays are reduced per ``cfg.reduction``.
    """
    v = _focal(p, y, cfg)
    if v.ndim == 0:
        return float(v)
    return _reduce(v, cfg.reduction)


def focal_loss_grad(p, y, cfg: FocalConfig = FocalConfig()):
    """Elementwise d(loss)/dp (unreduced)."""
    p = _check_open(p)
    y = np.asarray(y, dtype=np.float64)
    a = cfg.alpha
    w = np.abs(1.0 - y) ** cfg.beta
    q = 1.0 - p
    dq = a * q ** (a - 1.0) if a else 0.0
    dp = a * p ** (a - 1.0) if a else 0.0
    pos = dq * np.log(p) - q ** a / p
    neg = -w * (dp * np.log1p(-p) - p ** a / q)
    g = np.where(y >= cfg.t_ctr, pos, neg)
    return float(g) if g.ndim == 0 else g


def _dims(pred, gt):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise DimensionMismatchError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    return pred, gt


def soft_dice_loss(pred, gt) -> float:
    pred, gt = _dims(pred, gt)
    return 1.0 - soft_iou(pred, gt)


def soft_dice_loss_grad(pred, gt) -> np.ndarray:
    """Gradient of ``soft_dice_loss`` w.r.t. every pred pixel."""
    pred, gt = _dims(pred, gt)
    sxy = float((pred * gt).sum())
    denom = float((pred * pred).sum() + (gt * gt).sum())
    if denom == 0:
        return np.zeros_like(pred)
    return -(2.0 * gt * denom - 4.0 * sxy * pred) / denom ** 2


def instance_loss(preds, gts) -> float:
    """Mean soft dice loss over seed masks and their matched ground-truth lanes."""
    if len(preds) != len(gts):
        raise DimensionMismatchError(f"{len(preds)} predictions vs {len(gts)} targets")
    if not preds:
        return 0.0
    return float(np.mean([soft_dice_loss(p, g) for p, g in zip(preds, gts)]))


def semantic_loss(pred, gt) -> float:
    return soft_dice_loss(pred, gt)


def total_loss(ctr: float, inst: float, sem: float, weights=(1.0, 1.0, 1.0)) -> float:
    if min(ctr, inst, sem) < 0:
        raise ValueError("loss terms must be non-negative")
    return weights[0] * ctr + weights[1] * inst + weights[2] * sem

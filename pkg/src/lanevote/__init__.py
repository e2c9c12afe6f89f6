"""Non-learned decoding pipeline for point-voting lane detection."""

from .dedup import DedupConfig, attention_matrix, set_dice, soft_iou, suppress
from .fields import (LaneScene, rasterize_centerness, rasterize_instance_masks, rasterize_lane,
                     rasterize_semantic)
from .geometry import Polyline, arc_fractions, box_centerness, curve_centerness, resample
from .grouping import GroupResult, distance_grouper, gather_broadcast_concat, oracle_grouper
from .losses import FocalConfig, focal_loss, focal_loss_grad, soft_dice_loss, total_loss
from .metrics import MatchReport, TusimpleFrame, culane_eval, tusimple_eval
from .pipeline import decode, trace_mask
from .sampling import Candidate, SamplerConfig, cfps, field_to_candidates
from .synth import WorldConfig, corrupt_field, generate_scene

__version__ = "0.1.0"

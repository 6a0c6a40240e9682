"""Set-prediction losses over a matched ground-truth/prediction pair list.

The localization term is the mean L1 error over matched pairs in normalized
coordinates. The classification term is a focal loss over all predictions,
where exactly the matched predictions are positives and everything else is
background. The total combines them with a fixed weight on localization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .geometry import Point, PointSet
from .matcher import Assignment, MatchResult

LOC_WEIGHT = 2.5

_CLAMP = 1e-7


@dataclass(frozen=True)
class LossReport:
    """Loss components and their weighted total (total = cls + weight * loc)."""

    loc: float
    cls: float
    total: float
    loc_weight: float = LOC_WEIGHT


def normalize_points(s: PointSet) -> PointSet:
    """Map a point set into the unit square by dividing out its frame."""
    w, h = s.frame_width, s.frame_height
    if not (w > 0 and h > 0):
        raise InvalidInputError(f"frame must be positive, got {w} x {h}")
    pts = tuple(Point(p.x / w, p.y / h) for p in s.points)
    return PointSet(pts, 1.0, 1.0)


def loc_loss(
    gt: Sequence[Point], pred: Sequence[Point], assignment: Assignment
) -> float:
    """Mean L1 distance between each ground truth and its assigned prediction.

    Coordinates are used as given; pass normalized points for scale-free
    values. Assignment indices must address the prediction list.
    """
    if len(assignment.matched_pred_of_gt) != len(gt):
        raise InvalidInputError(
            f"assignment covers {len(assignment.matched_pred_of_gt)} ground truths, expected {len(gt)}"
        )
    if any(j >= len(pred) or j < 0 for j in assignment.matched_pred_of_gt):
        raise InvalidInputError("assignment refers to prediction indices outside the list")
    total = 0.0
    for i, j in enumerate(assignment.matched_pred_of_gt):
        total += abs(gt[i].x - pred[j].x) + abs(gt[i].y - pred[j].y)
    return total / len(gt)


def matched_labels(match: MatchResult, n_pred: int) -> tuple[bool, ...]:
    """Per-prediction class labels: True exactly for the matched predictions."""
    if n_pred < len(match.assignment.matched_pred_of_gt):
        raise InvalidInputError("n_pred smaller than the number of matched predictions")
    matched = set(match.assignment.matched_pred_of_gt)
    return tuple(j in matched for j in range(n_pred))


def focal_cls_loss(
    confidences: Sequence[float],
    labels: Sequence[bool],
    alpha: float = 0.25,
    gamma: float = 2.0,
) -> float:
    """Mean focal loss -alpha * (1 - p_t)^gamma * log(p_t) over all predictions.

    p_t is the confidence for positives and one minus it for negatives.
    Probabilities are clamped away from {0, 1} by 1e-7 before the log. With
    gamma = 0 and alpha = 1 this is the mean binary cross-entropy.
    """
    if len(confidences) != len(labels):
        raise InvalidInputError(
            f"{len(confidences)} confidences but {len(labels)} labels"
        )
    if len(confidences) == 0:
        raise InvalidInputError("focal loss needs at least one prediction")
    p = np.asarray(confidences, dtype=np.float64)
    if not np.isfinite(p).all() or (p < 0).any() or (p > 1).any():
        raise InvalidInputError("confidences must be finite and in [0, 1]")
    pos = np.asarray(labels, dtype=bool)
    p_t = np.where(pos, p, 1.0 - p)
    p_t = np.clip(p_t, _CLAMP, 1.0 - _CLAMP)
    terms = -alpha * (1.0 - p_t) ** gamma * np.log(p_t)
    return float(terms.mean())


def total_loss(loc: float, cls: float, loc_weight: float = LOC_WEIGHT) -> LossReport:
    """Combine the localization and classification terms into one report."""
    for name, v in (("loc", loc), ("cls", cls)):
        if not (math.isfinite(v) and v >= 0.0):
            raise InvalidInputError(f"{name} loss must be finite and >= 0, got {v}")
    return LossReport(loc=loc, cls=cls, total=cls + loc_weight * loc, loc_weight=loc_weight)

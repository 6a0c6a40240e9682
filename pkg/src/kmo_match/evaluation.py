"""Localization and counting evaluation protocols.

Localization scoring pairs ground truths with predictions one-to-one by
minimizing total Euclidean distance, then counts a pair as a true positive
when its distance is strictly below a per-ground-truth threshold. Thresholds
come in three modes: a fixed pixel radius, a box-derived radius (half the box
diagonal), and a sweep over integer radii 1..100 whose headline numbers are
arithmetic means across the sweep.

Counting metrics compare predicted and actual counts per scene: MAE is the
mean absolute error and MSE is the root of the mean squared error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import EmptySetError, InvalidInputError, MissingBoxError
from .geometry import Point
from .matcher import CostMatrix, GtPoint, PredPoint, solve_hungarian

SigmaMode = Literal["fixed", "nwpu", "qnrf_sweep"]

DEFAULT_TAU = 0.35
QNRF_SIGMAS = tuple(range(1, 101))


@dataclass(frozen=True)
class MatchedPair:
    """One scored pair: ground-truth index, prediction index, and distance."""

    gt_index: int
    pred_index: int
    distance: float


@dataclass(frozen=True)
class EvalReport:
    """Localization counts and scores for one scene or an aggregate.

    For single-threshold modes the identities precision = tp / (tp + fp) and
    recall = tp / (tp + fn) hold directly (empty denominators score 1). In
    qnrf_sweep mode tp/fp/fn are sums across the 100 thresholds, the headline
    precision/recall/f1 are arithmetic means of the per-threshold values, and
    the identities hold per entry of per_sigma instead.
    """

    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    sigma_mode: str
    sigma: float | None = None
    per_sigma: tuple[tuple[float, float, float, float], ...] | None = None
    tp_per_sigma: tuple[int, ...] | None = None


@dataclass(frozen=True)
class CountPair:
    """Predicted versus actual object count for one scene."""

    predicted: int
    actual: int

    def __post_init__(self) -> None:
        if self.predicted < 0 or self.actual < 0:
            raise InvalidInputError(
                f"counts must be >= 0, got ({self.predicted}, {self.actual})"
            )


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Precision, recall, f1 with the empty-set conventions.

    No predictions means precision 1, no ground truths means recall 1, and
    f1 is 0 when precision + recall is 0 (both-empty scenes score all ones).
    """
    precision = 1.0 if tp + fp == 0 else tp / (tp + fp)
    recall = 1.0 if tp + fn == 0 else tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def filter_by_confidence(
    pred: Sequence[PredPoint], tau: float = DEFAULT_TAU
) -> list[PredPoint]:
    """Keep predictions whose confidence is at least tau (inclusive)."""
    if not (math.isfinite(tau) and 0.0 <= tau <= 1.0):
        raise InvalidInputError(f"tau must be in [0, 1], got {tau}")
    return [p for p in pred if p.confidence >= tau]


def _min_cost_pairs(gt_xy: np.ndarray, pred_xy: np.ndarray) -> list[MatchedPair]:
    # one-to-one pairing minimizing total Euclidean distance; the smaller side
    # indexes the rows so the assignment stays injective and complete
    diff = gt_xy[:, None, :] - pred_xy[None, :, :]
    dist = np.sqrt(diff[:, :, 0] ** 2 + diff[:, :, 1] ** 2)
    if dist.shape[0] <= dist.shape[1]:
        assignment = solve_hungarian(CostMatrix(dist))
        return [
            MatchedPair(i, j, float(dist[i, j]))
            for i, j in enumerate(assignment.matched_pred_of_gt)
        ]
    assignment = solve_hungarian(CostMatrix(dist.T))
    return [
        MatchedPair(i, j, float(dist[i, j]))
        for j, i in enumerate(assignment.matched_pred_of_gt)
    ]


def threshold_match(
    gt: Sequence[GtPoint],
    pred: Sequence[Point],
    sigma_of_gt: Sequence[float],
) -> tuple[int, int, int, list[MatchedPair]]:
    """Score one scene at per-ground-truth thresholds.

    Returns (tp, fp, fn, pairs). A matched pair is a true positive when its
    Euclidean distance is strictly below the threshold of its ground truth.
    Unmatched ground truths are false negatives, unmatched or too-far
    predictions false positives.
    """
    if len(sigma_of_gt) != len(gt):
        raise InvalidInputError(
            f"{len(sigma_of_gt)} thresholds for {len(gt)} ground truths"
        )
    for s in sigma_of_gt:
        if not (math.isfinite(s) and s > 0):
            raise InvalidInputError(f"thresholds must be finite and > 0, got {s}")
    if len(gt) == 0 or len(pred) == 0:
        return 0, len(pred), len(gt), []
    gt_xy = np.array([[g.point.x, g.point.y] for g in gt], dtype=np.float64)
    pred_xy = np.array([[p.x, p.y] for p in pred], dtype=np.float64)
    pairs = _min_cost_pairs(gt_xy, pred_xy)
    tp = sum(1 for pr in pairs if pr.distance < sigma_of_gt[pr.gt_index])
    return tp, len(pred) - tp, len(gt) - tp, pairs


def sigma_nwpu(box_w: float, box_h: float) -> float:
    """Box-derived threshold: half the diagonal of the box."""
    if not (math.isfinite(box_w) and box_w > 0 and math.isfinite(box_h) and box_h > 0):
        raise InvalidInputError(f"box extents must be > 0, got ({box_w}, {box_h})")
    return math.sqrt(box_w * box_w + box_h * box_h) / 2.0


def eval_localization(
    gt: Sequence[GtPoint],
    pred: Sequence[Point],
    sigma_mode: SigmaMode = "fixed",
    sigma: float | None = None,
) -> EvalReport:
    """Score a scene under one of the three threshold modes.

    fixed uses the given sigma for every ground truth; nwpu derives a
    per-ground-truth threshold from its box (every ground truth must carry
    one); qnrf_sweep scores radii 1..100 on a single shared pairing and
    reports mean precision/recall/f1 across the sweep.
    """
    if sigma_mode == "fixed":
        s = 4.0 if sigma is None else sigma
        if not (math.isfinite(s) and s > 0):
            raise InvalidInputError(f"sigma must be > 0, got {s}")
        tp, fp, fn, _ = threshold_match(gt, pred, [s] * len(gt))
        precision, recall, f1 = prf(tp, fp, fn)
        return EvalReport(tp, fp, fn, precision, recall, f1, "fixed", sigma=s)
    if sigma_mode == "nwpu":
        missing = [i for i, g in enumerate(gt) if g.box_w is None or g.box_h is None]
        if missing:
            raise MissingBoxError(f"ground truths {missing} lack boxes required by nwpu mode")
        sigmas = [sigma_nwpu(g.box_w, g.box_h) for g in gt]
        tp, fp, fn, _ = threshold_match(gt, pred, sigmas)
        precision, recall, f1 = prf(tp, fp, fn)
        return EvalReport(tp, fp, fn, precision, recall, f1, "nwpu")
    if sigma_mode == "qnrf_sweep":
        if len(gt) == 0 or len(pred) == 0:
            pairs: list[MatchedPair] = []
        else:
            gt_xy = np.array([[g.point.x, g.point.y] for g in gt], dtype=np.float64)
            pred_xy = np.array([[p.x, p.y] for p in pred], dtype=np.float64)
            pairs = _min_cost_pairs(gt_xy, pred_xy)
        distances = np.array([pr.distance for pr in pairs], dtype=np.float64)
        per_sigma = []
        tp_counts = []
        tp_sum = fp_sum = fn_sum = 0
        for s in QNRF_SIGMAS:
            tp = int((distances < s).sum())
            fp, fn = len(pred) - tp, len(gt) - tp
            precision, recall, f1 = prf(tp, fp, fn)
            per_sigma.append((float(s), precision, recall, f1))
            tp_counts.append(tp)
            tp_sum, fp_sum, fn_sum = tp_sum + tp, fp_sum + fp, fn_sum + fn
        mean_p = sum(e[1] for e in per_sigma) / len(per_sigma)
        mean_r = sum(e[2] for e in per_sigma) / len(per_sigma)
        mean_f = sum(e[3] for e in per_sigma) / len(per_sigma)
        return EvalReport(
            tp_sum, fp_sum, fn_sum, mean_p, mean_r, mean_f,
            "qnrf_sweep", per_sigma=tuple(per_sigma), tp_per_sigma=tuple(tp_counts),
        )
    raise InvalidInputError(f"sigma_mode must be fixed, nwpu, or qnrf_sweep, got {sigma_mode!r}")


def counting_metrics(pairs: Sequence[CountPair]) -> tuple[float, float]:
    """MAE and MSE over per-scene count pairs (MSE is the root mean square)."""
    if len(pairs) == 0:
        raise EmptySetError("counting metrics need at least one scene")
    diffs = np.array([p.predicted - p.actual for p in pairs], dtype=np.float64)
    mae = float(np.abs(diffs).mean())
    mse = float(np.sqrt((diffs ** 2).mean()))
    return mae, mse

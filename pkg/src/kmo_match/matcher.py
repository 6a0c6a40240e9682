"""Cost construction and optimal one-to-one assignment between ground-truth
points and predicted points.

Two cost families are supported. The plain cost is the L1 distance between
frame-normalized coordinates minus the prediction confidence, so cheap pairs
are close in space and high in detector belief. The context-aware cost adds
the absolute difference of mean k-nearest-neighbor distances, which penalizes
pairing a point from a dense region with one from a sparse region even when
they happen to be spatially close.

Every ground truth must be matched and no prediction may be used twice, so
instances require M <= N. Predictions left unmatched are background.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import (
    EmptySetError,
    InvalidInputError,
    MissingFeatureError,
    OracleTooLargeError,
    TooManyGroundTruthsError,
)
from .geometry import Metric, Point, PointSet, knn_mean_distance

CostKind = Literal["l1", "kmo"]
KnnSource = Literal["computed", "supplied"]

ORACLE_MAX_GT = 8


@dataclass(frozen=True)
class GtPoint:
    """A ground-truth point, optionally annotated with a box extent."""

    point: Point
    box_w: float | None = None
    box_h: float | None = None

    def __post_init__(self) -> None:
        for name, v in (("box_w", self.box_w), ("box_h", self.box_h)):
            if v is not None and not (math.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be finite and > 0 when present, got {v}")


@dataclass(frozen=True)
class PredPoint:
    """A predicted point with a confidence score and an optional precomputed
    neighbor feature (mean k-nearest-neighbor distance in normalized units)."""

    point: Point
    confidence: float
    knn_feature: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.confidence) and 0.0 <= self.confidence <= 1.0):
            raise InvalidInputError(f"confidence must be in [0, 1], got {self.confidence}")
        if self.knn_feature is not None and not (
            math.isfinite(self.knn_feature) and self.knn_feature >= 0.0
        ):
            raise InvalidInputError(
                f"knn_feature must be finite and >= 0 when present, got {self.knn_feature}"
            )


@dataclass(frozen=True)
class CostMatrix:
    """A finite M x N cost matrix with M <= N (rows are ground truths)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise InvalidInputError(f"cost matrix must be 2-d and non-empty, got shape {arr.shape}")
        if arr.shape[0] > arr.shape[1]:
            raise TooManyGroundTruthsError(
                f"{arr.shape[0]} ground truths but only {arr.shape[1]} predictions"
            )
        if not np.isfinite(arr).all():
            raise InvalidInputError("cost matrix entries must be finite")
        object.__setattr__(self, "entries", arr)

    @property
    def m_gt(self) -> int:
        return int(self.entries.shape[0])

    @property
    def n_pred(self) -> int:
        return int(self.entries.shape[1])


@dataclass(frozen=True)
class Assignment:
    """An injective map from every ground-truth row to a prediction column.

    matched_pred_of_gt[i] is the prediction index chosen for ground truth i;
    total_cost is the sum of the selected entries.
    """

    matched_pred_of_gt: tuple[int, ...]
    total_cost: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "matched_pred_of_gt", tuple(int(j) for j in self.matched_pred_of_gt))
        if len(set(self.matched_pred_of_gt)) != len(self.matched_pred_of_gt):
            raise InvalidInputError("assignment must not reuse a prediction")


@dataclass(frozen=True)
class MatchResult:
    """An assignment plus its per-pair costs and the unmatched predictions."""

    assignment: Assignment
    pair_costs: tuple[float, ...]
    background_preds: tuple[int, ...]


@dataclass(frozen=True)
class MatchConfig:
    """Matching options: which cost to build and how neighbor features come in."""

    cost: CostKind = "l1"
    k: int = 4
    knn_source: KnnSource = "computed"

    def __post_init__(self) -> None:
        if self.cost not in ("l1", "kmo"):
            raise InvalidInputError(f"cost must be 'l1' or 'kmo', got {self.cost!r}")
        if self.knn_source not in ("computed", "supplied"):
            raise InvalidInputError(
                f"knn_source must be 'computed' or 'supplied', got {self.knn_source!r}"
            )
        if self.k < 1:
            raise InvalidInputError(f"k must be >= 1, got {self.k}")


def _check_sizes(gt: Sequence[GtPoint], pred: Sequence[PredPoint]) -> None:
    if len(gt) == 0 or len(pred) == 0:
        raise EmptySetError("matching requires at least one ground truth and one prediction")
    if len(gt) > len(pred):
        raise TooManyGroundTruthsError(
            f"{len(gt)} ground truths but only {len(pred)} predictions"
        )


def _normalized_xy(points: Sequence[Point], frame: tuple[float, float]) -> np.ndarray:
    w, h = frame
    if not (w > 0 and h > 0):
        raise InvalidInputError(f"frame must be positive, got {w} x {h}")
    xy = np.array([[p.x, p.y] for p in points], dtype=np.float64).reshape(-1, 2)
    return xy / np.array([w, h], dtype=np.float64)


def build_cost_l1(
    gt: Sequence[GtPoint], pred: Sequence[PredPoint], frame: tuple[float, float]
) -> CostMatrix:
    """Plain matching cost: L1 distance on frame-normalized coordinates minus
    the prediction confidence."""
    _check_sizes(gt, pred)
    gxy = _normalized_xy([g.point for g in gt], frame)
    pxy = _normalized_xy([p.point for p in pred], frame)
    dist = np.abs(gxy[:, None, :] - pxy[None, :, :]).sum(axis=2)
    conf = np.array([p.confidence for p in pred], dtype=np.float64)
    return CostMatrix(dist - conf[None, :])


def build_cost_kmo(
    gt: Sequence[GtPoint],
    pred: Sequence[PredPoint],
    frame: tuple[float, float],
    k: int = 4,
    knn_source: KnnSource = "computed",
    metric: Metric = "l1",
) -> CostMatrix:
    """Context-aware matching cost: the plain cost plus the absolute difference
    of mean k-nearest-neighbor distances between the two sides.

    Ground-truth features are always computed from the normalized ground-truth
    set. Prediction features are either computed the same way from the
    prediction set, or taken from PredPoint.knn_feature when knn_source is
    "supplied" (every prediction must carry one).
    """
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    if knn_source not in ("computed", "supplied"):
        raise InvalidInputError(f"knn_source must be 'computed' or 'supplied', got {knn_source!r}")
    base = build_cost_l1(gt, pred, frame)
    gt_set = PointSet.from_array(_normalized_xy([g.point for g in gt], frame))
    gt_feat = knn_mean_distance(gt_set, k, metric).as_array()
    if knn_source == "supplied":
        missing = [i for i, p in enumerate(pred) if p.knn_feature is None]
        if missing:
            raise MissingFeatureError(
                f"predictions {missing} lack knn_feature required by knn_source='supplied'"
            )
        pred_feat = np.array([p.knn_feature for p in pred], dtype=np.float64)
    else:
        pred_set = PointSet.from_array(_normalized_xy([p.point for p in pred], frame))
        pred_feat = knn_mean_distance(pred_set, k, metric).as_array()
    context = np.abs(gt_feat[:, None] - pred_feat[None, :])
    return CostMatrix(base.entries + context)


def solve_hungarian(cost: CostMatrix) -> Assignment:
    """Minimum-total-cost injective assignment of every row to a column.

    Rectangular instances (M < N) are solved directly; the unused columns are
    the background. Raises InvalidInputError on non-finite entries.
    """
    entries = np.asarray(cost.entries, dtype=np.float64)
    if not np.isfinite(entries).all():
        raise InvalidInputError("cost matrix entries must be finite")
    rows, cols = linear_sum_assignment(entries)
    total = float(entries[rows, cols].sum())
    return Assignment(tuple(int(c) for c in cols), total)


@lru_cache(maxsize=64)
def _injections(n_pred: int, m_gt: int) -> np.ndarray:
    # all injective index tuples, in lexicographic order (argmin tie-break relies on it)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.permutations(range(n_pred), m_gt)),
        dtype=np.intp,
    )
    return flat.reshape(-1, m_gt)


def brute_force_assignment(cost: CostMatrix) -> Assignment:
    """Exhaustive oracle: enumerate every injective assignment and take the
    cheapest, breaking exact-cost ties toward the lexicographically smallest
    index tuple. Refuses instances with more than ORACLE_MAX_GT rows."""
    m, n = cost.m_gt, cost.n_pred
    if m > ORACLE_MAX_GT:
        raise OracleTooLargeError(f"oracle accepts at most {ORACLE_MAX_GT} ground truths, got {m}")
    perms = _injections(n, m)
    totals = cost.entries[np.arange(m)[None, :], perms].sum(axis=1)
    best = int(np.argmin(totals))
    return Assignment(tuple(int(j) for j in perms[best]), float(totals[best]))


def match_points(
    gt: Sequence[GtPoint],
    pred: Sequence[PredPoint],
    frame: tuple[float, float],
    config: MatchConfig | None = None,
) -> MatchResult:
    """Build the configured cost, solve it, and report per-pair costs plus the
    predictions left over as background."""
    cfg = config or MatchConfig()
    if cfg.cost == "l1":
        cost = build_cost_l1(gt, pred, frame)
    else:
        cost = build_cost_kmo(gt, pred, frame, k=cfg.k, knn_source=cfg.knn_source)
    assignment = solve_hungarian(cost)
    pair_costs = tuple(
        float(cost.entries[i, j]) for i, j in enumerate(assignment.matched_pred_of_gt)
    )
    matched = set(assignment.matched_pred_of_gt)
    background = tuple(j for j in range(cost.n_pred) if j not in matched)
    return MatchResult(assignment=assignment, pair_costs=pair_costs, background_preds=background)

"""Plain-array views of the core matcher and evaluators.

The batch holds one defensive float64 copy of every input, so results never
depend on later caller-side mutation and repeated calls are independent.
Boundary violations (shapes, ranges, non-finite values) raise ValueError;
errors from the core (empty sets, more ground truths than predictions,
missing boxes or features) propagate unchanged under their own names.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from kmo_match import (
    GtPoint,
    MatchConfig,
    Point,
    PredPoint,
    eval_localization,
    filter_by_confidence,
    match_points,
)


def _as_float(value, name: str, shape: tuple[int, ...] | None) -> np.ndarray:
    try:
        out = np.array(value, dtype=np.float64, copy=True)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{name} is not numeric: {exc}") from exc
    if shape is not None and out.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {out.shape}")
    if out.size and not np.isfinite(out).all():
        raise ValueError(f"{name} must be finite everywhere")
    return out


@dataclass(frozen=True)
class ArrayBatch:
    """One scene as arrays: M ground-truth points, N predictions.

    gt_xy is M x 2, pred_xy is N x 2, pred_conf is length N with values in
    [0, 1]. pred_knn (length N, >= 0, frame-normalized units) supplies
    precomputed neighborhood features for the context cost; omit it to have
    them computed from pred_xy. gt_box_wh (M x 2, positive) carries per-point
    box extents and is required only by box-derived evaluation. Arrays are
    copied on construction.
    """

    gt_xy: np.ndarray
    pred_xy: np.ndarray
    pred_conf: np.ndarray
    frame: tuple[float, float]
    pred_knn: np.ndarray | None = None
    gt_box_wh: np.ndarray | None = None
    _m: int = field(init=False, repr=False)
    _n: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        gt = np.array(self.gt_xy, dtype=np.float64, copy=True)
        if gt.ndim != 2 or gt.shape[1] != 2:
            raise ValueError(f"gt_xy must be M x 2, got shape {gt.shape}")
        m = gt.shape[0]
        pred = np.array(self.pred_xy, dtype=np.float64, copy=True)
        if pred.ndim != 2 or pred.shape[1] != 2:
            raise ValueError(f"pred_xy must be N x 2, got shape {pred.shape}")
        n = pred.shape[0]
        for name, arr in (("gt_xy", gt), ("pred_xy", pred)):
            if arr.size and not np.isfinite(arr).all():
                raise ValueError(f"{name} must be finite everywhere")
        conf = _as_float(self.pred_conf, "pred_conf", (n,))
        if conf.size and (conf.min() < 0.0 or conf.max() > 1.0):
            raise ValueError("pred_conf values must be in [0, 1]")
        knn = None
        if self.pred_knn is not None:
            knn = _as_float(self.pred_knn, "pred_knn", (n,))
            if knn.size and knn.min() < 0.0:
                raise ValueError("pred_knn values must be >= 0")
        boxes = None
        if self.gt_box_wh is not None:
            boxes = _as_float(self.gt_box_wh, "gt_box_wh", (m, 2))
            if boxes.size and boxes.min() <= 0.0:
                raise ValueError("gt_box_wh extents must be > 0")
        w, h = float(self.frame[0]), float(self.frame[1])
        if not (np.isfinite(w) and np.isfinite(h) and w > 0 and h > 0):
            raise ValueError(f"frame must be positive and finite, got {self.frame}")
        object.__setattr__(self, "gt_xy", gt)
        object.__setattr__(self, "pred_xy", pred)
        object.__setattr__(self, "pred_conf", conf)
        object.__setattr__(self, "pred_knn", knn)
        object.__setattr__(self, "gt_box_wh", boxes)
        object.__setattr__(self, "frame", (w, h))
        object.__setattr__(self, "_m", m)
        object.__setattr__(self, "_n", n)

    @property
    def m_gt(self) -> int:
        return self._m

    @property
    def n_pred(self) -> int:
        return self._n

    def gt_points(self) -> list[GtPoint]:
        if self.gt_box_wh is None:
            return [GtPoint(Point(float(x), float(y))) for x, y in self.gt_xy]
        return [
            GtPoint(Point(float(x), float(y)), box_w=float(w), box_h=float(h))
            for (x, y), (w, h) in zip(self.gt_xy, self.gt_box_wh)
        ]

    def pred_points(self) -> list[PredPoint]:
        feats = self.pred_knn if self.pred_knn is not None else [None] * self._n
        return [
            PredPoint(Point(float(x), float(y)), float(c), knn_feature=None if f is None else float(f))
            for (x, y), c, f in zip(self.pred_xy, self.pred_conf, feats)
        ]


def match_arrays(
    batch: ArrayBatch, cost: str = "l1", k: int = 4
) -> tuple[np.ndarray, float]:
    """Assign each ground truth a distinct prediction, minimizing total cost.

    Returns (indices, total_cost): indices[i] is the prediction matched to
    ground truth i. cost "l1" uses normalized distance minus confidence;
    "kmo" adds the neighborhood-density term with the given k, using the
    batch's pred_knn features when present and computing them otherwise.
    """
    source = "supplied" if batch.pred_knn is not None else "computed"
    config = MatchConfig(cost=cost, k=k, knn_source=source)
    result = match_points(batch.gt_points(), batch.pred_points(), batch.frame, config)
    indices = np.array(result.assignment.matched_pred_of_gt, dtype=np.int64)
    return indices, float(result.assignment.total_cost)


def eval_arrays(
    batch: ArrayBatch,
    sigma_mode: str = "fixed",
    tau: float = 0.35,
    sigma: float | None = None,
) -> tuple[float, float, float, int, int, int]:
    """Score the batch's predictions against its ground truths.

    Predictions below confidence tau are discarded (inclusive threshold),
    the rest are paired one-to-one with ground truths by minimum total
    Euclidean distance, and pairs closer than the radius count as true
    positives. sigma_mode "fixed" uses sigma (default 4) for every point,
    "nwpu" derives per-point radii from gt_box_wh, and "qnrf" (alias
    "qnrf_sweep") averages radii 1..100; in sweep mode the returned counts
    are sums over the sweep. Returns (precision, recall, f1, tp, fp, fn).
    """
    kept = filter_by_confidence(batch.pred_points(), tau)
    mode = "qnrf_sweep" if sigma_mode == "qnrf" else sigma_mode
    report = eval_localization(
        batch.gt_points(), [p.point for p in kept], mode, sigma=sigma
    )
    return (
        report.precision,
        report.recall,
        report.f1,
        report.tp,
        report.fp,
        report.fn,
    )

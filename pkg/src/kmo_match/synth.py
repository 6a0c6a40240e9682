"""Deterministic synthetic scenes: pattern generators, a perturbation pipeline
that turns ground truths into plausible detector output, and diagnostics that
compare the plain and context-aware costs on the same scene.

All randomness flows through numpy's Philox4x64-10 counter-based generator
seeded explicitly; no OS entropy is consumed anywhere, so every output is a
pure function of its spec. perturb draws from its stream in a fixed order
(jitter normals, drop uniforms, spurious coordinates, confidences); that
order is part of the file-format contract documented in docs/formats.md.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidInputError, InvalidSpecError
from .geometry import Point
from .matcher import (
    GtPoint,
    MatchConfig,
    PredPoint,
    brute_force_assignment,
    build_cost_kmo,
    build_cost_l1,
    match_points,
)

Pattern = Literal["grid", "clusters", "uniform"]

_EPS = 1e-9


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


@dataclass(frozen=True)
class SceneSpec:
    """A pattern of ground-truth points inside a frame.

    grid lays points on a square lattice with the given spacing starting at
    origin, rounding n_points down to the largest complete lattice; clusters
    spreads points round-robin around the given centers with isotropic
    Gaussian spread, clipped to the frame; uniform draws points uniformly in
    the frame.
    """

    pattern: Pattern
    n_points: int
    frame: tuple[float, float] = (256.0, 256.0)
    spacing: float | None = None
    origin: tuple[float, float] = (0.0, 0.0)
    centers: tuple[tuple[float, float], ...] | None = None
    spread: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.pattern not in ("grid", "clusters", "uniform"):
            raise InvalidSpecError(f"unknown pattern {self.pattern!r}")
        if self.n_points < 1:
            raise InvalidSpecError(f"n_points must be >= 1, got {self.n_points}")
        if not (self.frame[0] > 0 and self.frame[1] > 0):
            raise InvalidSpecError(f"frame must be positive, got {self.frame}")


@dataclass(frozen=True)
class PerturbSpec:
    """How to degrade ground truths into predictions.

    Applied in order: translate every kept point by a fixed offset, jitter it
    with isotropic Gaussian noise, drop each point independently, append
    spurious uniform points, then attach confidences. conf_model is either
    ("constant", c) or ("noisy", mean, sd); noisy confidences are clipped to
    [0, 1].
    """

    jitter_sigma: float = 0.0
    drop_rate: float = 0.0
    spurious_rate: float = 0.0
    translate: tuple[float, float] = (0.0, 0.0)
    conf_model: tuple = ("constant", 1.0)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.jitter_sigma < 0:
            raise InvalidSpecError(f"jitter_sigma must be >= 0, got {self.jitter_sigma}")
        if not (0.0 <= self.drop_rate <= 1.0):
            raise InvalidSpecError(f"drop_rate must be in [0, 1], got {self.drop_rate}")
        if self.spurious_rate < 0:
            raise InvalidSpecError(f"spurious_rate must be >= 0, got {self.spurious_rate}")
        kind = self.conf_model[0] if self.conf_model else None
        if kind == "constant":
            if len(self.conf_model) != 2 or not (0.0 <= self.conf_model[1] <= 1.0):
                raise InvalidSpecError(f"constant conf_model needs a value in [0, 1], got {self.conf_model}")
        elif kind == "noisy":
            if len(self.conf_model) != 3 or self.conf_model[2] < 0:
                raise InvalidSpecError(f"noisy conf_model needs (mean, sd >= 0), got {self.conf_model}")
        else:
            raise InvalidSpecError(f"conf_model kind must be 'constant' or 'noisy', got {self.conf_model}")


def gen_scene(spec: SceneSpec) -> list[GtPoint]:
    """Generate ground-truth points for a spec. Output length can be below
    n_points only for grid, which emits the largest complete lattice."""
    w, h = spec.frame
    if spec.pattern == "grid":
        if spec.spacing is None or spec.spacing <= 0:
            raise InvalidSpecError(f"grid needs spacing > 0, got {spec.spacing}")
        cols = int(math.floor(math.sqrt(spec.n_points)))
        rows = spec.n_points // cols
        ox, oy = spec.origin
        max_x = ox + (cols - 1) * spec.spacing
        max_y = oy + (rows - 1) * spec.spacing
        if ox < 0 or oy < 0 or max_x > w or max_y > h:
            raise InvalidSpecError(
                f"grid of {rows} x {cols} at spacing {spec.spacing} does not fit the frame {spec.frame}"
            )
        return [
            GtPoint(Point(ox + i * spec.spacing, oy + j * spec.spacing))
            for j in range(rows)
            for i in range(cols)
        ]
    rng = _generator(spec.seed)
    if spec.pattern == "clusters":
        if not spec.centers:
            raise InvalidSpecError("clusters needs at least one center")
        if spec.spread < 0:
            raise InvalidSpecError(f"spread must be >= 0, got {spec.spread}")
        for cx, cy in spec.centers:
            if not (0 <= cx <= w and 0 <= cy <= h):
                raise InvalidSpecError(f"cluster center ({cx}, {cy}) outside the frame")
        out = []
        for idx in range(spec.n_points):
            cx, cy = spec.centers[idx % len(spec.centers)]
            dx, dy = rng.normal(0.0, spec.spread, size=2) if spec.spread > 0 else (0.0, 0.0)
            out.append(GtPoint(Point(min(max(cx + dx, 0.0), w), min(max(cy + dy, 0.0), h))))
        return out
    xs = rng.random(spec.n_points) * w
    ys = rng.random(spec.n_points) * h
    return [GtPoint(Point(float(x), float(y))) for x, y in zip(xs, ys)]


def perturb(
    gt: Sequence[GtPoint], spec: PerturbSpec, frame: tuple[float, float]
) -> list[PredPoint]:
    """Degrade ground truths into predictions per the given settings.

    The identity settings return the ground-truth coordinates unchanged with
    confidence 1. Spurious points are uniform in the frame; their count is
    round(spurious_rate * len(gt)).
    """
    w, h = frame
    if not (w > 0 and h > 0):
        raise InvalidInputError(f"frame must be positive, got {frame}")
    rng = _generator(spec.seed)
    n = len(gt)
    xy = np.array([[g.point.x, g.point.y] for g in gt], dtype=np.float64).reshape(-1, 2)
    xy = xy + np.asarray(spec.translate, dtype=np.float64)
    if spec.jitter_sigma > 0 and n > 0:
        xy = xy + rng.normal(0.0, spec.jitter_sigma, size=(n, 2))
    if spec.drop_rate > 0 and n > 0:
        keep = rng.random(n) >= spec.drop_rate
        xy = xy[keep]
    n_spurious = int(round(spec.spurious_rate * n))
    if n_spurious > 0:
        sxy = rng.random((n_spurious, 2)) * np.array([w, h])
        xy = np.vstack([xy, sxy])
    count = xy.shape[0]
    if spec.conf_model[0] == "constant":
        conf = np.full(count, float(spec.conf_model[1]))
    else:
        _, mean, sd = spec.conf_model
        conf = np.clip(rng.normal(mean, sd, size=count), 0.0, 1.0)
    return [
        PredPoint(Point(float(x), float(y)), float(c)) for (x, y), c in zip(xy, conf)
    ]


def _orient(a: tuple, b: tuple, c: tuple, exact: bool) -> float:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if not exact and abs(v) <= _EPS:
        return 0.0
    if v > 0:
        return 1.0
    if v < 0:
        return -1.0
    return 0.0


def _segments_cross(g1: tuple, p1: tuple, g2: tuple, p2: tuple, exact: bool) -> bool:
    # transversal crossing: strict opposite-side tests both ways; fully
    # collinear quadruples reduce to the 1-d inversion rule so that collinear
    # scenes count crossings exactly like permutation inversions
    o1 = _orient(g1, p1, g2, exact)
    o2 = _orient(g1, p1, p2, exact)
    o3 = _orient(g2, p2, g1, exact)
    o4 = _orient(g2, p2, p1, exact)
    if o1 == 0.0 and o2 == 0.0 and o3 == 0.0 and o4 == 0.0:
        dg = (g1[0] - g2[0], g1[1] - g2[1])
        dp = (p1[0] - p2[0], p1[1] - p2[1])
        dot = dg[0] * dp[0] + dg[1] * dp[1]
        if exact:
            return dot < 0
        return dot < -_EPS
    return o1 * o2 < 0 and o3 * o4 < 0


def count_crossings(
    gt: Sequence[Point], pred: Sequence[Point], matched_pred_of_gt: Sequence[int]
) -> int:
    """Number of segment pairs (gt_i -> pred of i, gt_j -> pred of j) that
    cross transversally. Integer-valued inputs are decided in exact integer
    arithmetic; otherwise orientation signs use a 1e-9 zero band."""
    coords = [gt[i] for i in range(len(gt))] + [pred[matched_pred_of_gt[i]] for i in range(len(gt))]
    exact = all(float(c.x).is_integer() and float(c.y).is_integer() for c in coords)

    def as_pair(p: Point) -> tuple:
        if exact:
            return (int(p.x), int(p.y))
        return (p.x, p.y)

    segs = [
        (as_pair(gt[i]), as_pair(pred[matched_pred_of_gt[i]]))
        for i in range(len(gt))
    ]
    crossings = 0
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if _segments_cross(segs[i][0], segs[i][1], segs[j][0], segs[j][1], exact):
                crossings += 1
    return crossings


@dataclass(frozen=True)
class AmbiguityReport:
    """Side-by-side matchings of the same scene under both costs.

    Confidences are overridden to 1 so the comparison isolates geometry.
    n_differing_pairs counts ground truths assigned different predictions.
    """

    l1_assignment: tuple[int, ...]
    kmo_assignment: tuple[int, ...]
    n_differing_pairs: int
    l1_crossings: int
    kmo_crossings: int


def ambiguity_report(
    gt: Sequence[GtPoint],
    pred: Sequence[PredPoint],
    frame: tuple[float, float],
    k: int = 4,
) -> AmbiguityReport:
    """Match the scene under the plain and context-aware costs with uniform
    confidence and report how the assignments differ."""
    uniform = [PredPoint(p.point, 1.0, p.knn_feature) for p in pred]
    l1 = match_points(gt, uniform, frame, MatchConfig(cost="l1"))
    kmo = match_points(gt, uniform, frame, MatchConfig(cost="kmo", k=k))
    a, b = l1.assignment.matched_pred_of_gt, kmo.assignment.matched_pred_of_gt
    differing = sum(1 for i in range(len(gt)) if a[i] != b[i])
    gt_pts = [g.point for g in gt]
    pred_pts = [p.point for p in uniform]
    return AmbiguityReport(
        l1_assignment=a,
        kmo_assignment=b,
        n_differing_pairs=differing,
        l1_crossings=count_crossings(gt_pts, pred_pts, a),
        kmo_crossings=count_crossings(gt_pts, pred_pts, b),
    )


@dataclass(frozen=True)
class TwoDensitySpec:
    """A two-density scene family that provokes density-blind mismatches.

    Ground truth is a tight cluster of n_dense points plus n_sparse isolated
    outliers. Predictions are the cluster translated along the corridor
    toward the outliers by a per-seed amount, plus one prediction per outlier
    drifted back toward the cluster. For enough translation plus drift the
    plain cost swaps cluster predictions onto outlier ground truths; the
    context cost keeps densities aligned. Dense points come first in both
    lists, so the density class of every index is implied by position.
    """

    n_dense: int = 5
    n_sparse: int = 2
    frame: tuple[float, float] = (256.0, 256.0)
    dense_center: tuple[float, float] = (60.0, 128.0)
    dense_spread: float = 5.0
    sparse_anchors: tuple[tuple[float, float], ...] = ((206.0, 72.0), (206.0, 184.0))
    anchor_spread: float = 6.0
    translate_range: tuple[float, float] = (70.0, 115.0)
    drift_range: tuple[float, float] = (55.0, 85.0)
    pred_jitter: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_dense < 2 or self.n_sparse < 1:
            raise InvalidSpecError("two-density scenes need n_dense >= 2 and n_sparse >= 1")
        if len(self.sparse_anchors) != self.n_sparse:
            raise InvalidSpecError(
                f"{len(self.sparse_anchors)} anchors for n_sparse = {self.n_sparse}"
            )


def gen_two_density(spec: TwoDensitySpec) -> tuple[list[GtPoint], list[PredPoint]]:
    """Generate one seeded scene of the two-density family.

    All confidences are 1 so matching differences come from geometry alone.
    """
    rng = _generator(spec.seed)
    w, h = spec.frame

    def clip(x: float, y: float) -> Point:
        return Point(min(max(x, 0.0), w), min(max(y, 0.0), h))

    cx, cy = spec.dense_center
    dense_gt = []
    for _ in range(spec.n_dense):
        dx, dy = rng.normal(0.0, spec.dense_spread, size=2)
        dense_gt.append(clip(cx + dx, cy + dy))
    sparse_gt = []
    for ax, ay in spec.sparse_anchors:
        dx, dy = rng.normal(0.0, spec.anchor_spread, size=2)
        sparse_gt.append(clip(ax + dx, ay + dy))

    anchor_cx = sum(p.x for p in sparse_gt) / len(sparse_gt)
    anchor_cy = sum(p.y for p in sparse_gt) / len(sparse_gt)
    ux, uy = anchor_cx - cx, anchor_cy - cy
    norm = math.hypot(ux, uy)
    ux, uy = ux / norm, uy / norm

    # pred_jitter 0 keeps the cluster an exact translate of its ground truth,
    # which leaves the plain cost indifferent between within-cluster pairings
    # (the ambiguity this family exists to exhibit); oracle comparisons must
    # therefore check totals, not assignment identity
    t = rng.uniform(*spec.translate_range)
    dense_pred = []
    for p in dense_gt:
        jx, jy = (
            rng.normal(0.0, spec.pred_jitter, size=2) if spec.pred_jitter > 0 else (0.0, 0.0)
        )
        dense_pred.append(clip(p.x + t * ux + jx, p.y + t * uy + jy))
    sparse_pred = []
    for p in sparse_gt:
        vx, vy = cx - p.x, cy - p.y
        vnorm = math.hypot(vx, vy)
        drift = rng.uniform(*spec.drift_range)
        jx, jy = (
            rng.normal(0.0, spec.pred_jitter, size=2) if spec.pred_jitter > 0 else (0.0, 0.0)
        )
        sparse_pred.append(clip(p.x + drift * vx / vnorm + jx, p.y + drift * vy / vnorm + jy))

    gt = [GtPoint(p) for p in dense_gt + sparse_gt]
    pred = [PredPoint(p, 1.0) for p in dense_pred + sparse_pred]
    return gt, pred


def dense_to_sparse_swaps(
    assignment: Sequence[int], n_dense: int, n_sparse: int
) -> int:
    """Count sparse ground truths that were assigned a dense prediction.

    Relies on the family convention that dense entries occupy the first
    n_dense positions of both lists.
    """
    return sum(
        1
        for i in range(n_dense, n_dense + n_sparse)
        if assignment[i] < n_dense
    )


def verify_with_oracle(
    gt: Sequence[GtPoint],
    pred: Sequence[PredPoint],
    frame: tuple[float, float],
    k: int = 4,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Brute-force optimal assignments (plain, context) for a small scene."""
    uniform = [PredPoint(p.point, 1.0, p.knn_feature) for p in pred]
    l1 = brute_force_assignment(build_cost_l1(gt, uniform, frame))
    kmo = brute_force_assignment(build_cost_kmo(gt, uniform, frame, k=k))
    return l1.matched_pred_of_gt, kmo.matched_pred_of_gt

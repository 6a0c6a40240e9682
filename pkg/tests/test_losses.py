import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kmo_match.errors import InvalidInputError
from kmo_match.geometry import Point, PointSet
from kmo_match.losses import (
    LOC_WEIGHT,
    focal_cls_loss,
    loc_loss,
    matched_labels,
    normalize_points,
    total_loss,
)
from kmo_match.matcher import (
    Assignment,
    GtPoint,
    PredPoint,
    match_points,
)

from helpers import random_instance

UNIT = (1.0, 1.0)


class TestNormalizePoints:
    def test_corner_maps_to_unit_corner(self):
        s = PointSet((Point(256.0, 128.0),), 256.0, 128.0)
        out = normalize_points(s)
        assert out.points[0] == Point(1.0, 1.0)
        assert (out.frame_width, out.frame_height) == (1.0, 1.0)

    def test_preserves_order(self):
        s = PointSet((Point(10.0, 0.0), Point(0.0, 40.0)), 100.0, 80.0)
        out = normalize_points(s)
        assert out.points == (Point(0.1, 0.0), Point(0.0, 0.5))


class TestLocLoss:
    def test_perfect_match_zero(self):
        pts = [Point(0.2, 0.2), Point(0.7, 0.7)]
        a = Assignment((0, 1), 0.0)
        assert loc_loss(pts, pts, a) == 0.0

    def test_known_mean(self):
        gt = [Point(0.0, 0.0), Point(1.0, 0.0)]
        pred = [Point(0.1, 0.1), Point(1.0, 0.4)]
        a = Assignment((0, 1), 0.0)
        # pair errors: 0.2 and 0.4, mean 0.3
        assert loc_loss(gt, pred, a) == pytest.approx(0.3, abs=1e-15)

    def test_uses_assignment_not_order(self):
        gt = [Point(0.0, 0.0), Point(1.0, 1.0)]
        pred = [Point(1.0, 1.0), Point(0.0, 0.0)]
        a = Assignment((1, 0), 0.0)
        assert loc_loss(gt, pred, a) == 0.0

    def test_matches_scalar_recomputation(self):
        for seed in range(10):
            gxy, pxy, conf = random_instance(seed)
            gt = [GtPoint(Point(*map(float, p))) for p in gxy]
            pred = [PredPoint(Point(*map(float, p)), float(c)) for p, c in zip(pxy, conf)]
            res = match_points(gt, pred, UNIT)
            got = loc_loss(
                [g.point for g in gt], [p.point for p in pred], res.assignment
            )
            want = sum(
                abs(gxy[i][0] - pxy[j][0]) + abs(gxy[i][1] - pxy[j][1])
                for i, j in enumerate(res.assignment.matched_pred_of_gt)
            ) / len(gxy)
            assert got == pytest.approx(want, abs=1e-15)

    def test_rejects_wrong_coverage(self):
        gt = [Point(0, 0), Point(1, 1)]
        pred = [Point(0, 0), Point(1, 1)]
        with pytest.raises(InvalidInputError):
            loc_loss(gt, pred, Assignment((0,), 0.0))

    def test_rejects_out_of_range_index(self):
        gt = [Point(0, 0)]
        pred = [Point(0, 0)]
        with pytest.raises(InvalidInputError):
            loc_loss(gt, pred, Assignment((1,), 0.0))


class TestMatchedLabels:
    def test_marks_exactly_matched(self):
        gt = [GtPoint(Point(0.1, 0.1))]
        pred = [
            PredPoint(Point(0.9, 0.9), 0.2),
            PredPoint(Point(0.1, 0.1), 0.9),
        ]
        res = match_points(gt, pred, UNIT)
        labels = matched_labels(res, 2)
        assert labels == (False, True)

    def test_rejects_short_n_pred(self):
        gt = [GtPoint(Point(0.1, 0.1))]
        pred = [PredPoint(Point(0.1, 0.1), 0.9)]
        res = match_points(gt, pred, UNIT)
        with pytest.raises(InvalidInputError):
            matched_labels(res, 0)


class TestFocalClsLoss:
    def test_confident_correct_is_tiny(self):
        # positives at p ~ 1 and negatives at p ~ 0 contribute almost nothing
        v = focal_cls_loss([1.0, 0.0], [True, False])
        assert v < 1e-5

    def test_reduces_to_bce(self):
        # gamma=0, alpha=1 on p=0.5 is ln 2 for either label
        v = focal_cls_loss([0.5, 0.5], [True, False], alpha=1.0, gamma=0.0)
        assert v == pytest.approx(math.log(2.0), rel=1e-12)

    def test_matches_scalar_recomputation(self):
        rng = np.random.Generator(np.random.Philox(key=43))
        p = rng.random(16)
        labels = rng.random(16) < 0.5
        got = focal_cls_loss(list(p), list(labels))
        terms = []
        for pi, yi in zip(p, labels):
            pt = pi if yi else 1.0 - pi
            pt = min(max(pt, 1e-7), 1.0 - 1e-7)
            terms.append(-0.25 * (1.0 - pt) ** 2 * math.log(pt))
        assert got == pytest.approx(sum(terms) / len(terms), rel=1e-12)

    def test_clamp_keeps_loss_finite(self):
        v = focal_cls_loss([0.0, 1.0], [True, False], alpha=1.0, gamma=0.0)
        assert math.isfinite(v)
        assert v == pytest.approx(-math.log(1e-7), rel=1e-6)

    def test_focusing_downweights_easy_examples(self):
        easy = focal_cls_loss([0.9], [True], gamma=2.0)
        hard = focal_cls_loss([0.6], [True], gamma=2.0)
        assert easy < hard

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(InvalidInputError):
            focal_cls_loss([0.5], [True, False])

    def test_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            focal_cls_loss([], [])

    def test_rejects_out_of_range_confidence(self):
        with pytest.raises(InvalidInputError):
            focal_cls_loss([1.5], [True])


class TestTotalLoss:
    def test_known_combination(self):
        r = total_loss(0.2, 0.3)
        assert r.total == pytest.approx(0.3 + LOC_WEIGHT * 0.2, abs=1e-15)
        assert r.total == pytest.approx(0.8, abs=1e-15)
        assert r.loc_weight == 2.5

    @given(
        loc=st.floats(min_value=0, max_value=1e6),
        cls=st.floats(min_value=0, max_value=1e6),
    )
    def test_identity_holds(self, loc, cls):
        r = total_loss(loc, cls)
        assert r.total == pytest.approx(r.cls + r.loc_weight * r.loc, rel=1e-12)

    def test_rejects_negative(self):
        with pytest.raises(InvalidInputError):
            total_loss(-0.1, 0.0)
        with pytest.raises(InvalidInputError):
            total_loss(0.0, float("nan"))


class TestMatchedLossOptimality:
    def test_matched_loc_never_beaten_under_uniform_confidence(self):
        # with all confidences equal, the matcher minimizes pure location
        # cost, so its pairing gives the smallest achievable loc loss
        from itertools import permutations

        rng = np.random.Generator(np.random.Philox(key=47))
        for _ in range(50):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(m, 6))
            gxy = rng.random((m, 2))
            pxy = rng.random((n, 2))
            gt = [GtPoint(Point(*map(float, p))) for p in gxy]
            pred = [PredPoint(Point(*map(float, p)), 0.5) for p in pxy]
            res = match_points(gt, pred, UNIT)
            gpts = [g.point for g in gt]
            ppts = [p.point for p in pred]
            best = loc_loss(gpts, ppts, res.assignment)
            for perm in permutations(range(n), m):
                other = loc_loss(gpts, ppts, Assignment(perm, 0.0))
                assert best <= other + 1e-12

    def test_loc_responds_linearly_to_one_pair(self):
        # moving one matched prediction by delta in x changes the mean L1
        # loss by exactly delta / M
        delta = 1e-6
        for seed in range(10):
            gxy, pxy, conf = random_instance(seed)
            gt = [Point(*map(float, p)) for p in gxy]
            pred = [Point(*map(float, p)) for p in pxy]
            a = Assignment(tuple(range(len(gt))), 0.0)
            base = loc_loss(gt, pred, a)
            j = a.matched_pred_of_gt[0]
            # push x strictly away from the ground truth so |.| grows
            direction = 1.0 if pred[j].x >= gt[0].x else -1.0
            moved = list(pred)
            moved[j] = Point(pred[j].x + direction * delta, pred[j].y)
            shifted = loc_loss(gt, moved, a)
            assert shifted - base == pytest.approx(delta / len(gt), abs=1e-9)

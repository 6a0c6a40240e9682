from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

import kmo_match
from kmo_match import EmptySetError, MissingBoxError, TooManyGroundTruthsError
from kmo_match_bindings import ArrayBatch, __version__, eval_arrays, match_arrays

FRAME = (256.0, 256.0)


def square_batch(offset=(0.0, 0.0), conf=1.0, **kwargs):
    xy = np.array([[40.0, 40.0], [80.0, 40.0], [40.0, 80.0], [80.0, 80.0]])
    return ArrayBatch(
        gt_xy=xy,
        pred_xy=xy + np.asarray(offset),
        pred_conf=np.full(4, conf),
        frame=FRAME,
        **kwargs,
    )


class TestVersion:
    def test_matches_core(self):
        assert __version__ == kmo_match.__version__


class TestArrayBatchValidation:
    def test_shapes(self):
        with pytest.raises(ValueError, match="gt_xy"):
            ArrayBatch(np.zeros((2, 3)), np.zeros((2, 2)), np.zeros(2), FRAME)
        with pytest.raises(ValueError, match="pred_xy"):
            ArrayBatch(np.zeros((2, 2)), np.zeros(4), np.zeros(2), FRAME)
        with pytest.raises(ValueError, match="pred_conf"):
            ArrayBatch(np.zeros((2, 2)), np.zeros((3, 2)), np.zeros(2), FRAME)

    def test_value_ranges(self):
        xy = np.zeros((2, 2))
        with pytest.raises(ValueError, match="pred_conf"):
            ArrayBatch(xy, xy, np.array([0.5, 1.5]), FRAME)
        with pytest.raises(ValueError, match="pred_knn"):
            ArrayBatch(xy, xy, np.full(2, 0.5), FRAME, pred_knn=np.array([0.1, -0.1]))
        with pytest.raises(ValueError, match="gt_box_wh"):
            ArrayBatch(xy, xy, np.full(2, 0.5), FRAME, gt_box_wh=np.zeros((2, 2)))

    def test_finiteness(self):
        xy = np.zeros((2, 2))
        bad = xy.copy()
        bad[0, 0] = np.nan
        with pytest.raises(ValueError, match="finite"):
            ArrayBatch(bad, xy, np.full(2, 0.5), FRAME)

    def test_frame(self):
        xy = np.zeros((1, 2))
        with pytest.raises(ValueError, match="frame"):
            ArrayBatch(xy, xy, np.ones(1), (0.0, 10.0))

    def test_non_numeric_rejected(self):
        with pytest.raises(ValueError):
            ArrayBatch([["a", "b"]], np.zeros((1, 2)), np.ones(1), FRAME)

    def test_empty_sides_are_constructible(self):
        # evaluation must handle empty prediction sets, so the batch allows them
        batch = ArrayBatch(np.zeros((2, 2)), np.empty((0, 2)), np.empty(0), FRAME)
        assert batch.m_gt == 2 and batch.n_pred == 0

    def test_defensive_copy(self):
        xy = np.array([[40.0, 40.0], [80.0, 80.0]])
        conf = np.full(2, 1.0)
        batch = ArrayBatch(xy, xy.copy(), conf, FRAME)
        before = match_arrays(batch)
        xy[0] = [0.0, 0.0]
        conf[0] = 0.0
        after = match_arrays(batch)
        assert np.array_equal(before[0], after[0])
        assert before[1] == after[1]


class TestMatchArrays:
    def test_identity_scene(self):
        indices, total = match_arrays(square_batch())
        assert indices.tolist() == [0, 1, 2, 3]
        assert total == pytest.approx(-4.0, abs=1e-12)

    def test_translated_square_keeps_order(self):
        indices, total = match_arrays(square_batch(offset=(5.0, 0.0)), cost="kmo")
        assert indices.tolist() == [0, 1, 2, 3]
        # each pair costs 5/256 - 1; the square's features coincide exactly
        assert total == pytest.approx(4 * (5.0 / 256.0 - 1.0), abs=1e-12)

    def test_more_gt_than_pred_raises_core_error(self):
        batch = ArrayBatch(
            np.zeros((3, 2)), np.zeros((2, 2)), np.full(2, 0.5), FRAME
        )
        with pytest.raises(TooManyGroundTruthsError):
            match_arrays(batch)

    def test_empty_raises_core_error(self):
        batch = ArrayBatch(np.zeros((1, 2)), np.empty((0, 2)), np.empty(0), FRAME)
        with pytest.raises(EmptySetError):
            match_arrays(batch)

    def test_supplied_features_change_the_context_cost(self):
        equal = match_arrays(
            square_batch(pred_knn=np.full(4, 0.2)), cost="kmo", k=3
        )
        # the square's computed feature is 4 * (40/256) / 3 on every corner,
        # so constant supplied features shift each pair cost by the same gap
        computed = match_arrays(square_batch(), cost="kmo", k=3)
        gap = abs(4.0 * (40.0 / 256.0) / 3.0 - 0.2)
        assert equal[1] == pytest.approx(computed[1] + 4 * gap, abs=1e-12)

    def test_repeated_calls_are_identical(self):
        batch = square_batch(offset=(3.0, 1.0), conf=0.7)
        first = match_arrays(batch, cost="kmo")
        for _ in range(5):
            again = match_arrays(batch, cost="kmo")
            assert np.array_equal(first[0], again[0]) and first[1] == again[1]

    def test_thread_safety(self):
        batch = square_batch(offset=(2.0, 2.0))
        expected = match_arrays(batch, cost="kmo")
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda _: match_arrays(batch, cost="kmo"), range(32)))
        for indices, total in results:
            assert np.array_equal(indices, expected[0]) and total == expected[1]


class TestEvalArrays:
    def test_self_match_is_perfect(self):
        p, r, f, tp, fp, fn = eval_arrays(square_batch())
        assert (p, r, f) == (1.0, 1.0, 1.0)
        assert (tp, fp, fn) == (4, 0, 0)

    def test_empty_predictions(self):
        batch = ArrayBatch(np.zeros((3, 2)), np.empty((0, 2)), np.empty(0), FRAME)
        p, r, f, tp, fp, fn = eval_arrays(batch)
        assert (p, r, f) == (1.0, 0.0, 0.0)
        assert (tp, fp, fn) == (0, 0, 3)

    def test_tau_is_inclusive(self):
        batch = square_batch(conf=0.35)
        _, _, _, tp, _, _ = eval_arrays(batch, tau=0.35)
        assert tp == 4
        p, r, f, tp, fp, fn = eval_arrays(batch, tau=0.36)
        assert (tp, fn) == (0, 4)
        assert p == 1.0 and r == 0.0

    def test_nwpu_requires_boxes(self):
        with pytest.raises(MissingBoxError):
            eval_arrays(square_batch(), sigma_mode="nwpu")
        boxes = np.tile([6.0, 8.0], (4, 1))
        p, r, f, *_ = eval_arrays(square_batch(gt_box_wh=boxes), sigma_mode="nwpu")
        assert (p, r, f) == (1.0, 1.0, 1.0)

    def test_qnrf_alias_and_sweep_counts(self):
        batch = ArrayBatch(
            np.array([[100.0, 100.0]]),
            np.array([[102.5, 100.0]]),
            np.array([1.0]),
            FRAME,
        )
        for mode in ("qnrf", "qnrf_sweep"):
            p, r, f, tp, fp, fn = eval_arrays(batch, sigma_mode=mode)
            assert p == pytest.approx(0.98, abs=1e-15)
            assert (tp, fp, fn) == (98, 2, 2)

    def test_fixed_sigma_passthrough(self):
        batch = ArrayBatch(
            np.array([[100.0, 100.0]]),
            np.array([[106.0, 100.0]]),
            np.array([1.0]),
            FRAME,
        )
        assert eval_arrays(batch, sigma=4.0)[3] == 0
        assert eval_arrays(batch, sigma=8.0)[3] == 1

"""Every bindings result must equal the core CLI's committed report values:
indices and counts exactly, real numbers within 1e-9."""
import json
from pathlib import Path

import numpy as np
import pytest

from kmo_match import load_scenes
from kmo_match_bindings import ArrayBatch, eval_arrays, match_arrays

CORE_FIXTURES = Path(__file__).resolve().parent.parent.parent / "tests" / "fixtures"


def to_batch(scene, with_knn=False, with_boxes=False):
    gt_xy = np.array([[g.point.x, g.point.y] for g in scene.gt])
    pred_xy = np.array([[p.point.x, p.point.y] for p in scene.pred])
    conf = np.array([p.confidence for p in scene.pred])
    knn = (
        np.array([p.knn_feature for p in scene.pred]) if with_knn else None
    )
    boxes = (
        np.array([[g.box_w, g.box_h] for g in scene.gt]) if with_boxes else None
    )
    return ArrayBatch(
        gt_xy=gt_xy,
        pred_xy=pred_xy,
        pred_conf=conf,
        frame=scene.frame,
        pred_knn=knn,
        gt_box_wh=boxes,
    )


@pytest.fixture(scope="module")
def scenes():
    return {s.scene_id: s for s in load_scenes(str(CORE_FIXTURES / "parity_scenes.json"))}


def report(name):
    return json.loads((CORE_FIXTURES / name).read_text())


@pytest.mark.parametrize(
    "fixture_name, cost, with_knn",
    [
        ("match_l1.json", "l1", False),
        ("match_kmo.json", "kmo", False),
        ("match_kmo_supplied.json", "kmo", True),
    ],
)
def test_match_parity(scenes, fixture_name, cost, with_knn):
    doc = report(fixture_name)
    assert doc["config"]["cost"] == cost
    for record in doc["scenes"]:
        batch = to_batch(scenes[record["scene_id"]], with_knn=with_knn)
        indices, total = match_arrays(batch, cost=cost, k=doc["config"]["k"])
        assert indices.tolist() == record["matched_pred_of_gt"]
        assert total == pytest.approx(record["total_cost"], abs=1e-9)


@pytest.mark.parametrize(
    "fixture_name, mode, with_boxes",
    [
        ("eval_fixed.json", "fixed", False),
        ("eval_nwpu.json", "nwpu", True),
        ("eval_qnrf.json", "qnrf_sweep", False),
    ],
)
def test_eval_parity(scenes, fixture_name, mode, with_boxes):
    doc = report(fixture_name)
    assert doc["config"]["sigma_mode"] == mode
    tau = doc["config"]["tau"]
    sigma = doc["config"]["sigma"]
    for record in doc["scenes"]:
        batch = to_batch(scenes[record["scene_id"]], with_boxes=with_boxes)
        p, r, f, tp, fp, fn = eval_arrays(batch, sigma_mode=mode, tau=tau, sigma=sigma)
        assert (tp, fp, fn) == (record["tp"], record["fp"], record["fn"])
        assert p == pytest.approx(record["precision"], abs=1e-9)
        assert r == pytest.approx(record["recall"], abs=1e-9)
        assert f == pytest.approx(record["f1"], abs=1e-9)

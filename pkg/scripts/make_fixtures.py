"""Regenerate the committed test fixtures.

Emits the 100-seed two-density scene family plus a small mixed scene file and
the CLI reports over it (both cost kinds, all three eval modes). The outputs
are deterministic; regenerating on the same code must reproduce the committed
bytes exactly, and a regression test enforces that for the family file.

Usage: python scripts/make_fixtures.py  (from the repository root)
"""
from __future__ import annotations

import os
import sys

from kmo_match.cli import main as cli_main
from kmo_match.geometry import Point, PointSet, knn_mean_distance
from kmo_match.matcher import GtPoint, PredPoint
from kmo_match.sceneio import Scene, write_scenes
from kmo_match.synth import PerturbSpec, SceneSpec, TwoDensitySpec, gen_scene, gen_two_density, perturb

FIXTURES = os.path.join("tests", "fixtures")
FAMILY_SEEDS = 100


def build_two_density_file() -> None:
    scenes = []
    for seed in range(FAMILY_SEEDS):
        spec = TwoDensitySpec(seed=seed)
        gt, pred = gen_two_density(spec)
        scenes.append(
            Scene(
                scene_id=f"two-density-{seed:03d}",
                width=spec.frame[0],
                height=spec.frame[1],
                gt=tuple(gt),
                pred=tuple(pred),
            )
        )
    write_scenes(os.path.join(FIXTURES, "two_density.json"), scenes)


def _with_boxes(gt: list[GtPoint], base_w: float, base_h: float) -> tuple[GtPoint, ...]:
    return tuple(
        GtPoint(g.point, box_w=base_w + (i % 3), box_h=base_h + (i % 2))
        for i, g in enumerate(gt)
    )


def _with_knn(pred: list[PredPoint], frame: tuple[float, float], k: int = 4) -> tuple[PredPoint, ...]:
    pts = PointSet.from_array(
        [[p.point.x / frame[0], p.point.y / frame[1]] for p in pred]
    )
    feats = knn_mean_distance(pts, k, "l1").values
    return tuple(
        PredPoint(p.point, p.confidence, knn_feature=f) for p, f in zip(pred, feats)
    )


def build_parity_scenes() -> None:
    scenes = []

    frame = (200.0, 150.0)
    grid_gt = gen_scene(
        SceneSpec(pattern="grid", n_points=9, frame=frame, spacing=20.0, origin=(10.0, 10.0))
    )
    grid_gt = _with_boxes(grid_gt, 6.0, 8.0)
    grid_pred = perturb(grid_gt, PerturbSpec(conf_model=("constant", 0.9), seed=5), frame)
    scenes.append(
        Scene("identity-grid", frame[0], frame[1], grid_gt, _with_knn(grid_pred, frame))
    )

    frame = (256.0, 256.0)
    clus_gt = gen_scene(
        SceneSpec(
            pattern="clusters",
            n_points=12,
            frame=frame,
            centers=((64.0, 64.0), (192.0, 180.0)),
            spread=6.0,
            seed=21,
        )
    )
    clus_gt = _with_boxes(clus_gt, 5.0, 7.0)
    clus_pred = perturb(
        clus_gt,
        PerturbSpec(
            jitter_sigma=2.5,
            spurious_rate=0.25,
            conf_model=("noisy", 0.7, 0.15),
            seed=22,
        ),
        frame,
    )
    scenes.append(
        Scene("clusters-noisy", frame[0], frame[1], clus_gt, _with_knn(clus_pred, frame))
    )

    frame = (200.0, 150.0)
    uni_gt = gen_scene(SceneSpec(pattern="uniform", n_points=6, frame=frame, seed=11))
    uni_gt = _with_boxes(uni_gt, 10.0, 10.0)
    uni_pred = perturb(
        uni_gt,
        PerturbSpec(
            jitter_sigma=1.0,
            spurious_rate=0.5,
            translate=(3.0, -2.0),
            conf_model=("constant", 0.8),
            seed=12,
        ),
        frame,
    )
    scenes.append(
        Scene("uniform-sparse", frame[0], frame[1], uni_gt, _with_knn(uni_pred, frame))
    )

    write_scenes(os.path.join(FIXTURES, "parity_scenes.json"), scenes)


def build_reports() -> None:
    scenes = os.path.join(FIXTURES, "parity_scenes.json")
    runs = [
        ["match", "--gt", scenes, "--pred", scenes, "--cost", "l1",
         "--report", os.path.join(FIXTURES, "match_l1.json")],
        ["match", "--gt", scenes, "--pred", scenes, "--cost", "kmo",
         "--report", os.path.join(FIXTURES, "match_kmo.json")],
        ["match", "--gt", scenes, "--pred", scenes, "--cost", "kmo", "--knn-source", "supplied",
         "--compare", "--report", os.path.join(FIXTURES, "match_kmo_supplied.json")],
        ["eval", "--gt", scenes, "--pred", scenes, "--sigma-mode", "fixed", "--sigma", "8",
         "--report", os.path.join(FIXTURES, "eval_fixed.json")],
        ["eval", "--gt", scenes, "--pred", scenes, "--sigma-mode", "nwpu",
         "--report", os.path.join(FIXTURES, "eval_nwpu.json")],
        ["eval", "--gt", scenes, "--pred", scenes, "--sigma-mode", "qnrf",
         "--report", os.path.join(FIXTURES, "eval_qnrf.json")],
    ]
    for argv in runs:
        code = cli_main(argv)
        if code != 0:
            raise SystemExit(f"fixture run failed with exit code {code}: {argv}")


def main() -> None:
    if not os.path.isdir(FIXTURES):
        raise SystemExit(f"run from the repository root ({FIXTURES} not found)")
    build_two_density_file()
    build_parity_scenes()
    build_reports()
    print("fixtures written to", FIXTURES)


if __name__ == "__main__":
    sys.exit(main())

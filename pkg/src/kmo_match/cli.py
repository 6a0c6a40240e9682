"""Command-line interface: generate scenes, match them, evaluate detections,
and benchmark the matcher.

Exit codes: 0 on success, 2 for usage and flag validation errors, 3 for data
errors (unreadable files, schema violations, scenes the pipeline cannot
process), 4 for internal failures. Reports are deterministic JSON: rerunning
a command on the same inputs produces byte-identical output.
"""
from __future__ import annotations

import argparse
import os
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .errors import (
    EmptySetError,
    InvalidSpecError,
    IoError,
    KmoMatchError,
    MissingBoxError,
    MissingFeatureError,
    SchemaError,
    TooManyGroundTruthsError,
)
from .evaluation import (
    DEFAULT_TAU,
    QNRF_SIGMAS,
    CountPair,
    counting_metrics,
    eval_localization,
    filter_by_confidence,
    prf,
)
from .geometry import Point
from .matcher import GtPoint, MatchConfig, PredPoint, build_cost_kmo, match_points, solve_hungarian
from .sceneio import SCHEMA, Scene, dump_json, load_scenes, write_json, write_scenes
from .synth import PerturbSpec, SceneSpec, ambiguity_report, gen_scene, perturb

ENV_THREADS = "KMO_MATCH_THREADS"


@dataclass(frozen=True)
class RunConfig:
    """Resolved knobs for one CLI invocation, echoed into reports."""

    cost: str = "l1"
    k: int = 4
    conf_threshold: float = DEFAULT_TAU
    sigma_mode: str = "fixed"
    seed: int = 0
    parallelism: int = 1


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _nonneg_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _unit_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {v}")
    return v


def _frame(text: str) -> tuple[float, float]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    try:
        w, h = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in WIDTHxHEIGHT, got {text!r}")
    if not (w > 0 and h > 0):
        raise argparse.ArgumentTypeError(f"frame must be positive, got {text!r}")
    return (w, h)


def _xy_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected X,Y, got {text!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers in X,Y, got {text!r}")


def _centers(text: str) -> tuple[tuple[float, float], ...]:
    try:
        return tuple(_xy_pair(chunk) for chunk in text.split(";") if chunk)
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"expected X,Y;X,Y;..., got {text!r}")


def _default_parallelism() -> int:
    raw = os.environ.get(ENV_THREADS, "")
    try:
        v = int(raw)
    except ValueError:
        return 1
    return v if v >= 1 else 1


def _map_scenes(fn: Callable, items: Sequence, parallelism: int) -> list:
    if parallelism <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(fn, items))


def _pair_scene_files(gt_path: str, pred_path: str) -> list[tuple[Scene, Scene]]:
    gt_scenes = load_scenes(gt_path)
    pred_scenes = load_scenes(pred_path)
    gt_ids = {s.scene_id for s in gt_scenes}
    pred_by_id = {s.scene_id: s for s in pred_scenes}
    missing = sorted(gt_ids - set(pred_by_id))
    extra = sorted(set(pred_by_id) - gt_ids)
    if missing or extra:
        raise SchemaError(
            f"scene ids differ between {gt_path} and {pred_path}: "
            f"missing from pred {missing}, extra in pred {extra}"
        )
    out = []
    for gs in gt_scenes:
        ps = pred_by_id[gs.scene_id]
        if (gs.width, gs.height) != (ps.width, ps.height):
            raise SchemaError(
                f"scene {gs.scene_id!r}: frame differs between {gt_path} and {pred_path}"
            )
        if ps.pred is None:
            raise SchemaError(f"scene {gs.scene_id!r} in {pred_path} has no pred section")
        out.append((gs, ps))
    return out


def cmd_gen(args: argparse.Namespace) -> int:
    scenes = []
    total_points = 0
    for idx in range(args.scenes):
        spec = SceneSpec(
            pattern=args.pattern,
            n_points=args.n,
            frame=args.frame,
            spacing=args.spacing,
            origin=args.origin,
            centers=args.centers,
            spread=args.spread,
            seed=args.seed + idx,
        )
        gt = gen_scene(spec)
        total_points += len(gt)
        pred = None
        if args.with_pred:
            conf_model = ("noisy", *args.conf_noisy) if args.conf_noisy else ("constant", args.conf)
            pspec = PerturbSpec(
                jitter_sigma=args.jitter,
                drop_rate=args.drop,
                spurious_rate=args.spurious,
                translate=args.translate,
                conf_model=conf_model,
                seed=args.perturb_seed + idx,
            )
            pred = tuple(perturb(gt, pspec, args.frame))
        scenes.append(
            Scene(f"scene-{idx:03d}", args.frame[0], args.frame[1], tuple(gt), pred)
        )
    write_scenes(args.out, scenes)
    print(f"gen: wrote {len(scenes)} scene(s), {total_points} point(s) to {args.out} (seed {args.seed})")
    return 0


def cmd_match(args: argparse.Namespace) -> int:
    pairs = _pair_scene_files(args.gt, args.pred)
    config = MatchConfig(cost=args.cost, k=args.k, knn_source=args.knn_source)
    run = RunConfig(cost=args.cost, k=args.k, parallelism=args.parallelism)

    def run_scene(pair: tuple[Scene, Scene]) -> dict:
        gs, ps = pair
        result = match_points(list(gs.gt), list(ps.pred), gs.frame, config)
        record: dict[str, Any] = {
            "scene_id": gs.scene_id,
            "n_gt": len(gs.gt),
            "n_pred": len(ps.pred),
            "matched_pred_of_gt": list(result.assignment.matched_pred_of_gt),
            "pair_costs": list(result.pair_costs),
            "total_cost": result.assignment.total_cost,
            "background_preds": list(result.background_preds),
        }
        if args.compare:
            amb = ambiguity_report(list(gs.gt), list(ps.pred), gs.frame, k=args.k)
            record["ambiguity"] = {
                "l1_assignment": list(amb.l1_assignment),
                "kmo_assignment": list(amb.kmo_assignment),
                "n_differing_pairs": amb.n_differing_pairs,
                "l1_crossings": amb.l1_crossings,
                "kmo_crossings": amb.kmo_crossings,
            }
        return record

    records = _map_scenes(run_scene, pairs, run.parallelism)
    report = {
        "schema": SCHEMA,
        "kind": "match_report",
        "version": __version__,
        "config": {
            "cost": run.cost,
            "k": run.k,
            "knn_source": args.knn_source,
            "parallelism": run.parallelism,
        },
        "inputs": {"gt": args.gt, "pred": args.pred},
        "scenes": records,
    }
    if args.report:
        write_json(args.report, report)
    else:
        sys.stdout.write(dump_json(report))
    grand_total = sum(r["total_cost"] for r in records)
    dest = args.report if args.report else "stdout"
    print(f"match: {len(records)} scene(s), cost {run.cost}, total cost {grand_total:.6f}, report {dest}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    pairs = _pair_scene_files(args.gt, args.pred)
    sigma_mode = "qnrf_sweep" if args.sigma_mode == "qnrf" else args.sigma_mode
    run = RunConfig(
        conf_threshold=args.tau, sigma_mode=sigma_mode, parallelism=args.parallelism
    )

    def run_scene(pair: tuple[Scene, Scene]) -> dict:
        gs, ps = pair
        kept = filter_by_confidence(list(ps.pred), args.tau)
        points = [p.point for p in kept]
        report = eval_localization(list(gs.gt), points, sigma_mode, sigma=args.sigma)
        record = {
            "scene_id": gs.scene_id,
            "n_gt": len(gs.gt),
            "n_pred_total": len(ps.pred),
            "n_pred_kept": len(kept),
            "tp": report.tp,
            "fp": report.fp,
            "fn": report.fn,
            "precision": report.precision,
            "recall": report.recall,
            "f1": report.f1,
        }
        if report.per_sigma is not None:
            record["per_sigma"] = [list(e) for e in report.per_sigma]
            record["tp_per_sigma"] = list(report.tp_per_sigma)
        return record

    records = _map_scenes(run_scene, pairs, run.parallelism)
    count_pairs = [CountPair(r["n_pred_kept"], r["n_gt"]) for r in records]
    mae, mse = counting_metrics(count_pairs)

    aggregate: dict[str, Any]
    if sigma_mode == "qnrf_sweep":
        # micro-average per threshold across scenes, then mean across thresholds
        per_sigma_totals = []
        mean_p = mean_r = mean_f = 0.0
        for s_idx, sigma in enumerate(QNRF_SIGMAS):
            tp_s = fp_s = fn_s = 0
            for r in records:
                tp_scene = r["tp_per_sigma"][s_idx]
                tp_s += tp_scene
                fp_s += r["n_pred_kept"] - tp_scene
                fn_s += r["n_gt"] - tp_scene
            p_s, r_s, f_s = prf(tp_s, fp_s, fn_s)
            per_sigma_totals.append([float(sigma), p_s, r_s, f_s])
            mean_p += p_s
            mean_r += r_s
            mean_f += f_s
        n_sigma = len(QNRF_SIGMAS)
        aggregate = {
            "tp": sum(r["tp"] for r in records),
            "fp": sum(r["fp"] for r in records),
            "fn": sum(r["fn"] for r in records),
            "precision": mean_p / n_sigma,
            "recall": mean_r / n_sigma,
            "f1": mean_f / n_sigma,
            "per_sigma": per_sigma_totals,
        }
    else:
        tp = sum(r["tp"] for r in records)
        fp = sum(r["fp"] for r in records)
        fn = sum(r["fn"] for r in records)
        precision, recall, f1 = prf(tp, fp, fn)
        aggregate = {
            "tp": tp, "fp": fp, "fn": fn,
            "precision": precision, "recall": recall, "f1": f1,
        }
    aggregate["mae"] = mae
    aggregate["mse"] = mse

    report = {
        "schema": SCHEMA,
        "kind": "eval_report",
        "version": __version__,
        "config": {
            "sigma_mode": sigma_mode,
            "sigma": args.sigma if sigma_mode == "fixed" else None,
            "tau": run.conf_threshold,
            "parallelism": run.parallelism,
        },
        "inputs": {"gt": args.gt, "pred": args.pred},
        "scenes": records,
        "aggregate": aggregate,
    }
    if args.report:
        write_json(args.report, report)
    else:
        sys.stdout.write(dump_json(report))
    print(
        f"eval: {len(records)} scene(s), mode {sigma_mode}, tau {args.tau}: "
        f"P {aggregate['precision']:.4f} R {aggregate['recall']:.4f} F {aggregate['f1']:.4f} "
        f"MAE {mae:.4f} MSE {mse:.4f}"
    )
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    m = args.m if args.m is not None else max(1, args.n // 2)
    if m > args.n:
        print(f"error: --m {m} exceeds --n {args.n}", file=sys.stderr)
        return 2
    frame = (256.0, 256.0)
    timings_ms = []
    for trial in range(args.trials):
        rng = np.random.Generator(np.random.Philox(key=args.seed + trial))
        gxy = rng.random((m, 2)) * frame
        pxy = rng.random((args.n, 2)) * frame
        conf = rng.random(args.n)
        gt = [GtPoint(Point(float(x), float(y))) for x, y in gxy]
        pred = [
            PredPoint(Point(float(x), float(y)), float(c)) for (x, y), c in zip(pxy, conf)
        ]
        start = time.perf_counter()
        cost = build_cost_kmo(gt, pred, frame, k=args.k)
        solve_hungarian(cost)
        timings_ms.append((time.perf_counter() - start) * 1000.0)
    median_ms = statistics.median(timings_ms)
    p95_ms = float(np.percentile(timings_ms, 95))
    report = {
        "schema": SCHEMA,
        "kind": "bench_report",
        "version": __version__,
        "config": {"n": args.n, "m": m, "k": args.k, "trials": args.trials, "seed": args.seed},
        "timings_ms": timings_ms,
        "median_ms": median_ms,
        "p95_ms": p95_ms,
    }
    if args.out:
        write_json(args.out, report)
    print(
        f"bench: n {args.n} m {m} trials {args.trials}: "
        f"median {median_ms:.2f} ms, p95 {p95_ms:.2f} ms"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kmo-match",
        description="Context-aware point matching, localization metrics, and synthetic benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate synthetic scene files")
    gen.add_argument("--pattern", choices=("grid", "clusters", "uniform"), required=True)
    gen.add_argument("--n", type=_positive_int, required=True, help="points per scene")
    gen.add_argument("--scenes", type=_positive_int, default=1, help="number of scenes")
    gen.add_argument("--frame", type=_frame, default=(256.0, 256.0), metavar="WxH")
    gen.add_argument("--spacing", type=_positive_float, default=None, help="grid spacing")
    gen.add_argument("--origin", type=_xy_pair, default=(0.0, 0.0), metavar="X,Y")
    gen.add_argument("--centers", type=_centers, default=None, metavar="X,Y;X,Y")
    gen.add_argument("--spread", type=_nonneg_float, default=1.0, help="cluster spread")
    gen.add_argument("--seed", type=_nonneg_int, default=0)
    gen.add_argument("--with-pred", action="store_true", help="emit perturbed predictions")
    gen.add_argument("--translate", type=_xy_pair, default=(0.0, 0.0), metavar="DX,DY")
    gen.add_argument("--jitter", type=_nonneg_float, default=0.0)
    gen.add_argument("--drop", type=_unit_float, default=0.0)
    gen.add_argument("--spurious", type=_nonneg_float, default=0.0)
    gen.add_argument("--conf", type=_unit_float, default=1.0, help="constant confidence")
    gen.add_argument("--conf-noisy", type=_xy_pair, default=None, metavar="MEAN,SD")
    gen.add_argument("--perturb-seed", type=_nonneg_int, default=None)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    match = sub.add_parser("match", help="match ground truths to predictions")
    match.add_argument("--gt", required=True)
    match.add_argument("--pred", required=True)
    match.add_argument("--cost", choices=("l1", "kmo"), default="l1")
    match.add_argument("--k", type=_positive_int, default=4)
    match.add_argument("--knn-source", choices=("computed", "supplied"), default="computed")
    match.add_argument("--compare", action="store_true", help="include both-cost diagnostics")
    match.add_argument("--report", default=None, help="report path (default stdout)")
    match.add_argument("--parallelism", type=_positive_int, default=None)
    match.set_defaults(func=cmd_match)

    ev = sub.add_parser("eval", help="score predictions against ground truths")
    ev.add_argument("--gt", required=True)
    ev.add_argument("--pred", required=True)
    ev.add_argument("--sigma-mode", choices=("fixed", "nwpu", "qnrf"), default="fixed")
    ev.add_argument("--sigma", type=_positive_float, default=4.0)
    ev.add_argument("--tau", type=_unit_float, default=DEFAULT_TAU)
    ev.add_argument("--report", default=None, help="report path (default stdout)")
    ev.add_argument("--parallelism", type=_positive_int, default=None)
    ev.set_defaults(func=cmd_eval)

    bench = sub.add_parser("bench", help="time cost build plus solve on synthetic instances")
    bench.add_argument("--n", type=_positive_int, required=True, help="number of predictions")
    bench.add_argument("--m", type=_positive_int, default=None, help="ground truths (default n // 2)")
    bench.add_argument("--trials", type=_positive_int, default=20)
    bench.add_argument("--k", type=_positive_int, default=4)
    bench.add_argument("--seed", type=_nonneg_int, default=0)
    bench.add_argument("--out", default=None, help="optional report path")
    bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "parallelism", None) is None and hasattr(args, "parallelism"):
        args.parallelism = _default_parallelism()
    if getattr(args, "perturb_seed", None) is None and hasattr(args, "perturb_seed"):
        args.perturb_seed = args.seed + 1_000_000
    try:
        return args.func(args)
    except InvalidSpecError as exc:
        # generator specs come only from flags here, so this is a usage error
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        SchemaError,
        IoError,
        EmptySetError,
        TooManyGroundTruthsError,
        MissingFeatureError,
        MissingBoxError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except KmoMatchError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

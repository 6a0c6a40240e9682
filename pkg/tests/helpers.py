"""Hand-rolled scalar reference implementations used to verify the vectorized
library code. These deliberately share no code with the package: plain loops,
math module arithmetic, itertools enumeration. Also the home of shared test
paths, because a module named conftest cannot be imported unambiguously."""
from __future__ import annotations

import itertools
import math
from pathlib import Path

import numpy as np

FIXTURE_DIR = Path(__file__).parent / "fixtures"


def scalar_distance(ax: float, ay: float, bx: float, by: float, metric: str) -> float:
    dx, dy = ax - bx, ay - by
    if metric == "l1":
        return abs(dx) + abs(dy)
    return math.sqrt(dx * dx + dy * dy)


def scalar_pairwise(a: list[tuple[float, float]], b: list[tuple[float, float]], metric: str) -> list[list[float]]:
    return [
        [scalar_distance(ax, ay, bx, by, metric) for bx, by in b]
        for ax, ay in a
    ]


def scalar_knn_mean(points: list[tuple[float, float]], k: int, metric: str) -> list[float]:
    n = len(points)
    if n == 1:
        return [0.0]
    out = []
    for i, (ax, ay) in enumerate(points):
        dists = sorted(
            scalar_distance(ax, ay, bx, by, metric)
            for j, (bx, by) in enumerate(points)
            if j != i
        )
        kk = min(k, n - 1)
        out.append(sum(dists[:kk]) / kk)
    return out


def scalar_cost_l1(
    gt: list[tuple[float, float]],
    pred: list[tuple[float, float]],
    conf: list[float],
    frame: tuple[float, float],
) -> list[list[float]]:
    w, h = frame
    out = []
    for gx, gy in gt:
        row = []
        for (px, py), c in zip(pred, conf):
            row.append(abs(gx / w - px / w) + abs(gy / h - py / h) - c)
        out.append(row)
    return out


def scalar_cost_kmo(
    gt: list[tuple[float, float]],
    pred: list[tuple[float, float]],
    conf: list[float],
    frame: tuple[float, float],
    k: int,
) -> list[list[float]]:
    w, h = frame
    gt_norm = [(x / w, y / h) for x, y in gt]
    pred_norm = [(x / w, y / h) for x, y in pred]
    gt_feat = scalar_knn_mean(gt_norm, k, "l1")
    pred_feat = scalar_knn_mean(pred_norm, k, "l1")
    base = scalar_cost_l1(gt, pred, conf, frame)
    return [
        [base[i][j] + abs(gt_feat[i] - pred_feat[j]) for j in range(len(pred))]
        for i in range(len(gt))
    ]


def enumerate_best_assignment(cost: list[list[float]]) -> tuple[tuple[int, ...], float]:
    """Pure-loop exhaustive search, lexicographically-first tie-break."""
    m, n = len(cost), len(cost[0])
    best_perm: tuple[int, ...] | None = None
    best_total = math.inf
    for perm in itertools.permutations(range(n), m):
        total = sum(cost[i][perm[i]] for i in range(m))
        if total < best_total:
            best_total = total
            best_perm = perm
    return best_perm, best_total


def random_instance(seed: int, m_max: int = 7, n_max: int = 9):
    """A random matching instance on the unit frame: coordinates uniform in
    [0, 1]^2, confidences uniform in [0, 1]."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(m, n_max + 1))
    gxy = rng.random((m, 2))
    pxy = rng.random((n, 2))
    conf = rng.random(n)
    return gxy, pxy, conf

"""Point containers, pairwise distance matrices, and mean k-nearest-neighbor
distance features.

The neighbor feature of a point is the mean distance to its k nearest
neighbors inside the same set, self excluded by index. It is a local density
descriptor: small in crowded regions, large for isolated points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import EmptySetError, InvalidInputError

Metric = Literal["l1", "l2"]

_METRICS = ("l1", "l2")


@dataclass(frozen=True)
class Point:
    """A point in the plane. Coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class PointSet:
    """An ordered collection of points inside a positive frame.

    The frame is the coordinate domain (width, height); ops that normalize
    coordinates divide by it, so it must be strictly positive.
    """

    points: tuple[Point, ...]
    frame_width: float = 1.0
    frame_height: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if not (self.frame_width > 0 and self.frame_height > 0):
            raise InvalidInputError(
                f"frame must be positive, got {self.frame_width} x {self.frame_height}"
            )

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self) -> np.ndarray:
        """Coordinates as a float64 array of shape (n, 2)."""
        return np.array([[p.x, p.y] for p in self.points], dtype=np.float64).reshape(-1, 2)

    @classmethod
    def from_array(
        cls, xy: np.ndarray | Sequence[Sequence[float]], frame: tuple[float, float] = (1.0, 1.0)
    ) -> "PointSet":
        arr = np.asarray(xy, dtype=np.float64).reshape(-1, 2)
        return cls(tuple(Point(float(x), float(y)) for x, y in arr), frame[0], frame[1])


@dataclass(frozen=True)
class NeighborFeature:
    """Per-point mean k-nearest-neighbor distances, one value per source point."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        for v in self.values:
            if not (math.isfinite(v) and v >= 0.0):
                raise InvalidInputError(f"neighbor feature values must be finite and >= 0, got {v}")

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


def _check_metric(metric: str) -> None:
    if metric not in _METRICS:
        raise InvalidInputError(f"metric must be one of {_METRICS}, got {metric!r}")


def pairwise_distance(a: PointSet, b: PointSet, metric: Metric = "l1") -> np.ndarray:
    """Distance matrix of shape (len(a), len(b)) under the given metric.

    Both sets must be non-empty. Entry (i, j) is the distance from a.points[i]
    to b.points[j].
    """
    _check_metric(metric)
    if len(a) == 0 or len(b) == 0:
        raise EmptySetError("pairwise_distance requires non-empty point sets")
    diff = a.as_array()[:, None, :] - b.as_array()[None, :, :]
    if metric == "l1":
        return np.abs(diff).sum(axis=2)
    return np.sqrt(diff[:, :, 0] ** 2 + diff[:, :, 1] ** 2)


def knn_mean_distance(s: PointSet, k: int, metric: Metric = "l1") -> NeighborFeature:
    """Mean distance from each point to its k nearest neighbors in the same set.

    Self is excluded by index, so coincident points still see each other.
    k is clamped to len(s) - 1; a singleton set gets the feature 0. Ties on
    equal distances are broken toward lower index, which cannot change the
    mean.
    """
    _check_metric(metric)
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    n = len(s)
    if n == 0:
        raise EmptySetError("knn_mean_distance requires at least one point")
    if n == 1:
        return NeighborFeature((0.0,))
    d = pairwise_distance(s, s, metric)
    np.fill_diagonal(d, np.inf)
    kk = min(k, n - 1)
    order = np.argsort(d, axis=1, kind="stable")[:, :kk]
    nearest = np.take_along_axis(d, order, axis=1)
    return NeighborFeature(tuple(nearest.mean(axis=1)))

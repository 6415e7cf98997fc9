"""Rational Bezier curves, bounding boxes and small vector helpers.

Curves are stored with explicit positive weights and evaluated through the
homogeneous de Casteljau scheme, so subdivision of rational curves (circular
arcs included) is exact.  Bounding boxes come from the control points; with
positive weights the curve lies in the convex hull of its control polygon,
so the boxes are conservative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# A point is any length-2 array-like; internally everything is float64.
Point2 = np.ndarray


def as_point(p) -> np.ndarray:
    """Coerce an (x, y) pair to a float64 array of shape (2,)."""
    a = np.asarray(p, dtype=float).reshape(2)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite point {a}")
    return a


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned bounding box with componentwise min <= max."""

    min: np.ndarray
    max: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "min", as_point(self.min))
        object.__setattr__(self, "max", as_point(self.max))
        if np.any(self.min > self.max):
            raise ValueError(f"inverted box {self.min} .. {self.max}")

    @property
    def diagonal(self) -> float:
        return float(np.hypot(*(self.max - self.min)))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.min + self.max)

    def contains(self, p, margin: float = 0.0) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.min - margin) and np.all(p <= self.max + margin))

    def union(self, other: "Aabb") -> "Aabb":
        return Aabb(np.minimum(self.min, other.min), np.maximum(self.max, other.max))

    @staticmethod
    def of_points(points) -> "Aabb":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return Aabb(pts.min(axis=0), pts.max(axis=0))


@dataclass(eq=False)
class RationalBezierCurve:
    """Rational Bezier curve of arbitrary degree >= 1.

    control_points has shape (degree + 1, 2); weights has matching length and
    must be strictly positive.  Weights are kept unnormalized: the homogeneous
    form keeps evaluation and subdivision on a single code path for both
    polynomial and rational curves.
    """

    control_points: np.ndarray
    weights: np.ndarray = None
    id: int = -1
    _homogeneous: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.control_points = np.asarray(self.control_points, dtype=float).reshape(-1, 2)
        n = len(self.control_points)
        if n < 2:
            raise ValueError("curve needs at least 2 control points")
        if self.weights is None:
            self.weights = np.ones(n)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(self.weights) != n:
            raise ValueError("weights length must match control points")
        if not np.all(self.weights > 0):
            raise ValueError("weights must be strictly positive")
        if not (np.all(np.isfinite(self.control_points)) and np.all(np.isfinite(self.weights))):
            raise ValueError("non-finite curve data")

    @property
    def degree(self) -> int:
        return len(self.control_points) - 1

    @property
    def first(self) -> np.ndarray:
        return self.control_points[0]

    @property
    def last(self) -> np.ndarray:
        return self.control_points[-1]

    def homogeneous(self) -> np.ndarray:
        """Control points lifted to (w*x, w*y, w), shape (n, 3). Cached."""
        if self._homogeneous is None:
            h = np.empty((len(self.weights), 3))
            h[:, :2] = self.control_points * self.weights[:, None]
            h[:, 2] = self.weights
            self._homogeneous = h
        return self._homogeneous

    def evaluate(self, t: float) -> np.ndarray:
        """Point on the curve at parameter t in [0, 1]; exact at the endpoints."""
        if t == 0.0:
            return self.control_points[0].copy()
        if t == 1.0:
            return self.control_points[-1].copy()
        h = self.homogeneous().copy()
        for _ in range(self.degree):
            h = (1.0 - t) * h[:-1] + t * h[1:]
        return h[0, :2] / h[0, 2]

    def evaluate_many(self, ts) -> np.ndarray:
        """Vectorized evaluation at an array of parameters, shape (len(ts), 2)."""
        ts = np.asarray(ts, dtype=float)
        h = self.homogeneous()[:, None, :]          # (n, 1, 3)
        t = ts[None, :, None]                        # (1, m, 1)
        h = np.broadcast_to(h, (h.shape[0], len(ts), 3)).copy()
        for _ in range(self.degree):
            h = (1.0 - t) * h[:-1] + t * h[1:]
        return h[0, :, :2] / h[0, :, 2:]

    def subdivide(self, t: float) -> tuple["RationalBezierCurve", "RationalBezierCurve"]:
        """Split at parameter t in (0, 1) into left/right halves.

        The halves trace the same point set with the same orientation; the
        shared endpoint is computed once so left.last == right.first exactly.
        """
        h = self.homogeneous().copy()
        n = len(h)
        left = np.empty_like(h)
        right = np.empty_like(h)
        left[0] = h[0]
        right[-1] = h[-1]
        for k in range(1, n):
            h = (1.0 - t) * h[:-1] + t * h[1:]
            left[k] = h[0]
            right[n - 1 - k] = h[-1]
        return (_from_homogeneous(left, self.id), _from_homogeneous(right, self.id))

    def aabb(self) -> Aabb:
        """Control-point bounding box (conservative; convex-hull property)."""
        return Aabb.of_points(self.control_points)

    def reversed(self) -> "RationalBezierCurve":
        return RationalBezierCurve(self.control_points[::-1].copy(), self.weights[::-1].copy(), self.id)

    def transformed(self, matrix: np.ndarray) -> "RationalBezierCurve":
        """Apply a 2x3 affine [A | t] to the control points; weights unchanged."""
        m = np.asarray(matrix, dtype=float).reshape(2, 3)
        pts = self.control_points @ m[:, :2].T + m[:, 2]
        return RationalBezierCurve(pts, self.weights.copy(), self.id)

    def is_degenerate(self) -> bool:
        """All control points coincide; the curve contributes nothing anywhere."""
        return bool(np.all(self.control_points == self.control_points[0]))


def _from_homogeneous(h: np.ndarray, curve_id: int) -> RationalBezierCurve:
    w = h[:, 2]
    return RationalBezierCurve(h[:, :2] / w[:, None], w.copy(), curve_id)


def line(a, b, curve_id: int = -1) -> RationalBezierCurve:
    """Degree-1 curve from a to b with unit weights."""
    return RationalBezierCurve(np.array([as_point(a), as_point(b)]), None, curve_id)

"""Exact winding numbers of rational Bezier curves by recursive subdivision.

A curve seen from outside its bounding box contributes the same signed angle
as its chord, so the recursion replaces far pieces with a single atan2 and
bisects the rest. Termination is guaranteed by a depth cap; queries that are
still inside a (tolerance-expanded) box at the cap sit on or next to the
curve and are flagged on_boundary.

The recursion is written over index subsets of a query batch: each curve
piece tests all currently-near queries against its box at once, accumulates
chord angles for the ones that escaped, and recurses with the rest. A
one-point batch reproduces the scalar recursion exactly, so scalar and
batched entry points cannot drift apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from curvewind.geometry import Aabb, RationalBezierCurve, as_point

INV_TWO_PI = 1.0 / (2.0 * math.pi)

# edge_tolerance defaults to this fraction of the global bounding-box diagonal
EDGE_TOLERANCE_FRACTION = 1e-10


@dataclass
class DirectConfig:
    """Tuning knobs for the subdivision recursion."""

    max_depth: int = 30
    edge_tolerance: Optional[float] = None   # None: resolved from the global diagonal
    cache_enabled: bool = True

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.edge_tolerance is not None and self.edge_tolerance < 0.0:
            raise ValueError("edge_tolerance must be non-negative")

    def resolve_tolerance(self, global_diagonal: float) -> float:
        if self.edge_tolerance is not None:
            return self.edge_tolerance
        return EDGE_TOLERANCE_FRACTION * global_diagonal


def segment_winding(q, a, b) -> float:
    """Signed fraction of a turn the segment a-b subtends at q.

    atan2(cross(a-q, b-q), dot(a-q, b-q)) / 2pi, in (-0.5, 0.5]; degenerate
    inputs (q on an endpoint, or a == b) give 0 without special casing.
    """
    q, a, b = as_point(q), as_point(a), as_point(b)
    ux, uy = a[0] - q[0], a[1] - q[1]
    vx, vy = b[0] - q[0], b[1] - q[1]
    # "+ 0.0" turns a -0.0 cross into +0.0 so collinear queries land on the
    # +0.5 side of the atan2 branch cut, keeping the range (-0.5, 0.5]
    return math.atan2(ux * vy - uy * vx + 0.0, ux * vx + uy * vy) * INV_TWO_PI


class _PieceNode:
    """One node of a curve's lazily built subdivision tree.

    Pieces are kept as raw homogeneous control rows (w*x, w*y, w): the chord
    endpoints, the control-point box and the midpoint de Casteljau split need
    nothing else, and skipping full curve construction keeps splits cheap in
    the query hot path.
    """

    __slots__ = ("ax", "ay", "bx", "by", "lox", "loy", "hix", "hiy",
                 "tiny", "h", "children")

    def __init__(self, h: np.ndarray, tol: float):
        pts = h[:, :2] / h[:, 2:3]
        self.ax, self.ay = pts[0, 0], pts[0, 1]
        self.bx, self.by = pts[-1, 0], pts[-1, 1]
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        self.lox, self.loy = lo[0] - tol, lo[1] - tol
        self.hix, self.hiy = hi[0] + tol, hi[1] + tol
        # once the unexpanded box fits inside the tolerance the chord is as
        # good as any deeper subdivision; splitting further would only let the
        # expanded boxes of ever more pieces overlap the same query
        self.tiny = math.hypot(hi[0] - lo[0], hi[1] - lo[1]) <= tol
        self.h = h
        self.children = None

    def split(self, tol: float):
        if self.children is None:
            h = self.h
            n = len(h)
            left = np.empty_like(h)
            right = np.empty_like(h)
            left[0] = h[0]
            right[-1] = h[-1]
            for k in range(1, n):
                h = 0.5 * (h[:-1] + h[1:])
                left[k] = h[0]
                right[n - 1 - k] = h[-1]
            self.children = (_PieceNode(left, tol), _PieceNode(right, tol))
        return self.children


class DirectEvaluator:
    """Batched direct evaluation with a per-instance subdivision cache.

    One evaluator is meant to live on a single worker; the curve data it
    reads is shared and immutable, the cache it writes is private.
    """

    def __init__(self, curves: Sequence[RationalBezierCurve],
                 config: Optional[DirectConfig] = None,
                 global_diagonal: Optional[float] = None):
        self.curves = list(curves)
        self.config = config or DirectConfig()
        if global_diagonal is None:
            if self.curves:
                box = Aabb.of_points(np.vstack([c.control_points for c in self.curves]))
                global_diagonal = box.diagonal
            else:
                global_diagonal = 1.0
        self.tolerance = self.config.resolve_tolerance(global_diagonal)
        self._roots: dict[int, _PieceNode] = {}
        self.stats = {"chords": 0, "depth_cap_hits": 0}

    def _root(self, curve: RationalBezierCurve) -> _PieceNode:
        node = self._roots.get(id(curve))
        if node is None:
            node = _PieceNode(curve.homogeneous(), self.tolerance)
            if self.config.cache_enabled:
                self._roots[id(curve)] = node
        return node

    def accumulate(self, curve: RationalBezierCurve, qx: np.ndarray, qy: np.ndarray,
                   idx: np.ndarray, out: np.ndarray, on_boundary: np.ndarray) -> None:
        """Add one curve's winding to out[idx]; flags depth-cap queries."""
        self._recurse(self._root(curve), 0, qx, qy, idx, out, on_boundary)

    def _recurse(self, node: _PieceNode, depth: int, qx, qy, idx, out, on_boundary):
        x, y = qx[idx], qy[idx]
        inside = (x >= node.lox) & (x <= node.hix) & (y >= node.loy) & (y <= node.hiy)
        far = idx[~inside]
        if far.size:
            self._add_chord(node, qx, qy, far, out)
        near = idx[inside]
        if near.size == 0:
            return
        if depth >= self.config.max_depth or node.tiny:
            self._add_chord(node, qx, qy, near, out)
            on_boundary[near] = True
            self.stats["depth_cap_hits"] += int(near.size)
            return
        left, right = node.split(self.tolerance)
        self._recurse(left, depth + 1, qx, qy, near, out, on_boundary)
        self._recurse(right, depth + 1, qx, qy, near, out, on_boundary)

    def _add_chord(self, node: _PieceNode, qx, qy, idx, out):
        ux, uy = node.ax - qx[idx], node.ay - qy[idx]
        vx, vy = node.bx - qx[idx], node.by - qy[idx]
        # "+ 0.0" fixes the sign of a -0.0 cross; see segment_winding
        out[idx] += np.arctan2(ux * vy - uy * vx + 0.0, ux * vx + uy * vy) * INV_TWO_PI
        self.stats["chords"] += int(idx.size)

    def winding(self, queries) -> tuple[np.ndarray, np.ndarray]:
        """Summed winding of all curves at each query; also boundary flags."""
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        qx = np.ascontiguousarray(queries[:, 0])
        qy = np.ascontiguousarray(queries[:, 1])
        out = np.zeros(len(queries))
        on_boundary = np.zeros(len(queries), dtype=bool)
        idx = np.arange(len(queries))
        for curve in self.curves:
            self.accumulate(curve, qx, qy, idx, out, on_boundary)
        return out, on_boundary


def curve_winding(q, curve: RationalBezierCurve, config: Optional[DirectConfig] = None,
                  evaluator: Optional[DirectEvaluator] = None) -> float:
    """Winding number of one curve at one point.

    Pass an evaluator to reuse its subdivision cache across calls.
    """
    if evaluator is None:
        evaluator = DirectEvaluator([curve], config)
    q = as_point(q)
    out = np.zeros(1)
    flags = np.zeros(1, dtype=bool)
    evaluator.accumulate(curve, np.array([q[0]]), np.array([q[1]]),
                         np.array([0]), out, flags)
    return float(out[0])


def direct_field(queries, curves: Sequence[RationalBezierCurve],
                 config: Optional[DirectConfig] = None,
                 global_diagonal: Optional[float] = None) -> tuple[np.ndarray, np.ndarray]:
    """Direct GWN field of a curve collection at many query points.

    Returns (windings, on_boundary); the baseline the accelerated engine is
    measured against.
    """
    evaluator = DirectEvaluator(curves, config, global_diagonal)
    return evaluator.winding(queries)

"""Binary bounding volume hierarchy with per-node far-field moment data.

Construction is a longest-axis median split over leaf box centers, recursing
to one curve per leaf. Nodes live in flat preorder arrays (children always
follow their parent), so a reverse sweep visits children before parents:
uncentered chord moments are summed bottom-up, then every node's tensors are
centered about its own chord-length-weighted centroid in one vectorized
pass. The centered tensors are additionally packed into the 9 contraction
weights the far-field kernel consumes.

A node's far sphere has radius = half its box diagonal around the centroid.
The centroid is a convex combination of chord midpoints, so it lies inside
the box whenever there is any chord length at all; zero-measure nodes (all
chords closed) fall back to the box center. Should the inside-box property
ever fail, the radius grows to the farthest box corner so the far test stays
conservative.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from curvewind.geometry import Aabb, as_point
from curvewind.moments import MomentSet, center_batch, segment_moments_batch
from curvewind.svg import Shape2D
from curvewind.taylor import pack_coefficients


class EmptyShape(ValueError):
    """A BVH needs at least one curve."""


@dataclass(frozen=True)
class BvhNode:
    """Read-only view of one node of a built tree."""

    tree: "Bvh"
    index: int

    @property
    def box(self) -> Aabb:
        b = self.tree.boxes[self.index]
        return Aabb(b[:2].copy(), b[2:].copy())

    @property
    def centroid(self) -> np.ndarray:
        return self.tree.centroids[self.index].copy()

    @property
    def radius(self) -> float:
        return float(self.tree.radii[self.index])

    @property
    def is_leaf(self) -> bool:
        return self.tree.children[self.index, 0] < 0

    @property
    def children_nodes(self) -> tuple["BvhNode", "BvhNode"]:
        left, right = self.tree.children[self.index]
        if left < 0:
            raise ValueError("leaf nodes have no children")
        return BvhNode(self.tree, int(left)), BvhNode(self.tree, int(right))

    @property
    def curve(self):
        ci = self.tree.leaf_curve[self.index]
        if ci < 0:
            raise ValueError("internal nodes have no curve")
        return self.tree.curves[ci]

    @property
    def depth(self) -> int:
        return int(self.tree.depths[self.index])

    @property
    def moments(self) -> MomentSet:
        t = self.tree
        i = self.index
        return MomentSet(t.m0[i].copy(), t.m1[i].copy(), t.m2[i].copy(),
                         float(t.lengths[i]), t.weighted_centroids[i].copy(),
                         centered_about=t.centroids[i].copy())


class Bvh:
    """Flat-array binary BVH over one subdivided shape."""

    def __init__(self, shape: Shape2D):
        curves = shape.curves
        if not curves:
            raise EmptyShape("cannot build a BVH over an empty shape")
        self.shape = shape
        self.curves = curves
        n = len(curves)

        first = np.array([c.first for c in curves])
        last = np.array([c.last for c in curves])
        leaf_boxes = np.empty((n, 4))
        for i, c in enumerate(curves):
            b = c.aabb()
            leaf_boxes[i, :2] = b.min
            leaf_boxes[i, 2:] = b.max
        centers = 0.5 * (leaf_boxes[:, :2] + leaf_boxes[:, 2:])

        total = 2 * n - 1
        self.boxes = np.empty((total, 4))
        self.children = np.full((total, 2), -1, dtype=np.int32)
        self.leaf_curve = np.full(total, -1, dtype=np.int32)
        self.depths = np.zeros(total, dtype=np.int32)
        cursor = 0

        def build(indices: np.ndarray, depth: int) -> int:
            nonlocal cursor
            me = cursor
            cursor += 1
            self.depths[me] = depth
            sub = leaf_boxes[indices]
            self.boxes[me, :2] = sub[:, :2].min(axis=0)
            self.boxes[me, 2:] = sub[:, 2:].max(axis=0)
            if len(indices) == 1:
                self.leaf_curve[me] = indices[0]
                return me
            extent = centers[indices].max(axis=0) - centers[indices].min(axis=0)
            axis = 0 if extent[0] >= extent[1] else 1
            order = np.argsort(centers[indices, axis], kind="stable")
            mid = (len(indices) + 1) // 2
            self.children[me, 0] = build(indices[order[:mid]], depth + 1)
            self.children[me, 1] = build(indices[order[mid:]], depth + 1)
            return me

        build(np.arange(n), 0)
        assert cursor == total
        self.leaf_count = n
        self.max_depth_reached = int(self.depths.max())

        # bottom-up sweep of uncentered moments (children follow parents in
        # preorder storage, so a reverse scan is a valid post-order)
        moments_t0 = time.perf_counter()
        m0, m1, m2, lengths, wc = segment_moments_batch(first, last)
        self.m0 = np.zeros((total, 2))
        self.m1 = np.zeros((total, 2, 2))
        self.m2 = np.zeros((total, 2, 2, 2))
        self.lengths = np.zeros(total)
        self.weighted_centroids = np.zeros((total, 2))
        leaf_mask = self.leaf_curve >= 0
        li = self.leaf_curve[leaf_mask]
        self.m0[leaf_mask] = m0[li]
        self.m1[leaf_mask] = m1[li]
        self.m2[leaf_mask] = m2[li]
        self.lengths[leaf_mask] = lengths[li]
        self.weighted_centroids[leaf_mask] = wc[li]
        for i in range(total - 1, -1, -1):
            l, r = self.children[i]
            if l >= 0:
                self.m0[i] = self.m0[l] + self.m0[r]
                self.m1[i] = self.m1[l] + self.m1[r]
                self.m2[i] = self.m2[l] + self.m2[r]
                self.lengths[i] = self.lengths[l] + self.lengths[r]
                self.weighted_centroids[i] = (self.weighted_centroids[l]
                                              + self.weighted_centroids[r])

        box_centers = 0.5 * (self.boxes[:, :2] + self.boxes[:, 2:])
        measured = self.lengths > 0.0
        self.centroids = np.where(measured[:, None],
                                  self.weighted_centroids
                                  / np.where(measured, self.lengths, 1.0)[:, None],
                                  box_centers)

        half_diag = 0.5 * np.hypot(self.boxes[:, 2] - self.boxes[:, 0],
                                   self.boxes[:, 3] - self.boxes[:, 1])
        inside = ((self.centroids[:, 0] >= self.boxes[:, 0])
                  & (self.centroids[:, 0] <= self.boxes[:, 2])
                  & (self.centroids[:, 1] >= self.boxes[:, 1])
                  & (self.centroids[:, 1] <= self.boxes[:, 3]))
        dx = np.abs(self.centroids[:, 0:1] - self.boxes[:, [0, 2]]).max(axis=1)
        dy = np.abs(self.centroids[:, 1:2] - self.boxes[:, [1, 3]]).max(axis=1)
        # fallback = farthest box corner; with the convexity argument above
        # this branch is not expected to trigger
        self.radii = np.where(inside, half_diag, np.hypot(dx, dy))

        # center all nodes about their own centroids, in place (m0 unchanged)
        self.m1, self.m2 = center_batch(self.m0, self.m1, self.m2, self.centroids)
        self.packed = pack_coefficients(self.m0, self.m1, self.m2)
        self.moment_seconds = time.perf_counter() - moments_t0

    @property
    def root(self) -> BvhNode:
        return BvhNode(self, 0)

    def node(self, index: int) -> BvhNode:
        return BvhNode(self, index)

    def __len__(self) -> int:
        return len(self.boxes)

    def nodes(self) -> Iterator[BvhNode]:
        for i in range(len(self.boxes)):
            yield BvhNode(self, i)

    def leaves(self) -> Iterator[BvhNode]:
        for i in np.flatnonzero(self.leaf_curve >= 0):
            yield BvhNode(self, int(i))


def build(shape: Shape2D) -> Bvh:
    """Tree construction + upward moment sums + in-place centering."""
    return Bvh(shape)


def is_far(node: BvhNode, q, beta: float) -> bool:
    """Strict far-sphere test: |q - centroid| > beta * radius.

    beta = inf is the "never far" sentinel (it would otherwise be nan-prone
    for zero-radius nodes).
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if math.isinf(beta):
        return False
    q = as_point(q)
    d = q - node.centroid
    return bool(math.hypot(d[0], d[1]) > beta * node.radius)


def dump_tree(tree: Bvh, fileobj) -> None:
    """JSON dump of node boxes/depths/leaf ids for inspection and goldens."""
    nodes = []
    for i in range(len(tree)):
        entry = {
            "index": i,
            "depth": int(tree.depths[i]),
            "box": [float(v) for v in tree.boxes[i]],
            "radius": float(tree.radii[i]),
            "centroid": [float(v) for v in tree.centroids[i]],
        }
        if tree.leaf_curve[i] >= 0:
            entry["curve_id"] = int(tree.curves[tree.leaf_curve[i]].id)
        else:
            entry["children"] = [int(v) for v in tree.children[i]]
        nodes.append(entry)
    json.dump({"leaf_count": tree.leaf_count,
               "max_depth_reached": tree.max_depth_reached,
               "nodes": nodes}, fileobj, indent=2)

"""Seeded generators for constructed test geometry.

Everything here is deterministic given an rng / seed, builds watertightness
by sharing endpoint arrays exactly (no re-derived coordinates), and returns
ordinary Shape2D values. Used by the test suites and the CLI experiments in
place of the large external corpora the method was originally demonstrated
on.
"""

from __future__ import annotations

import math

import numpy as np

from curvewind.geometry import RationalBezierCurve, line
from curvewind.svg import Shape2D, shape_from_curves


def circular_arc(theta0: float, theta1: float, radius: float = 1.0,
                 center=(0.0, 0.0), curve_id: int = -1) -> RationalBezierCurve:
    """Exact conic for a circular arc spanning at most a quarter turn."""
    span = theta1 - theta0
    if abs(span) > 0.5 * math.pi + 1e-12:
        raise ValueError("arc pieces must span at most 90 degrees")
    h = 0.5 * span
    mid = 0.5 * (theta0 + theta1)
    c = np.asarray(center, dtype=float)
    p0 = c + radius * np.array([math.cos(theta0), math.sin(theta0)])
    apex = c + (radius / math.cos(h)) * np.array([math.cos(mid), math.sin(mid)])
    p1 = c + radius * np.array([math.cos(theta1), math.sin(theta1)])
    return RationalBezierCurve([p0, apex, p1], [1.0, math.cos(h), 1.0], curve_id)


def circle(radius: float = 1.0, center=(0.0, 0.0), pieces: int = 4,
           clockwise: bool = False, curve_id_start: int = 0) -> list:
    """Closed circle as exact conic arcs (counter-clockwise by default)."""
    angles = np.linspace(0.0, 2.0 * math.pi, pieces + 1)
    if clockwise:
        angles = angles[::-1]
    arcs = [circular_arc(angles[i], angles[i + 1], radius, center, curve_id_start + i)
            for i in range(pieces)]
    # sin(2*pi) != sin(0) in floating point; snap the seam closed
    arcs[-1].control_points[-1] = arcs[0].control_points[0]
    return arcs


def polygon(vertices, curve_id_start: int = 0) -> list:
    """Closed polygon as degree-1 curves sharing vertex arrays."""
    vertices = np.asarray(vertices, dtype=float)
    n = len(vertices)
    return [line(vertices[i], vertices[(i + 1) % n], curve_id_start + i)
            for i in range(n)]


def regular_polygon(sides: int, radius: float = 1.0, center=(0.0, 0.0),
                    phase: float = 0.0, curve_id_start: int = 0) -> list:
    ang = phase + 2.0 * math.pi * np.arange(sides) / sides
    verts = np.asarray(center, dtype=float) + radius * np.column_stack([np.cos(ang), np.sin(ang)])
    return polygon(verts, curve_id_start)


def blob(rng, lobes: int = 8, center=(0.0, 0.0), mean_radius: float = 1.0,
         wobble: float = 0.35, curve_id_start: int = 0) -> list:
    """Smooth watertight loop: cubic pieces through radially jittered points.

    A closed Catmull-Rom spline through the sample points, rewritten as
    Bezier segments; consecutive pieces share their joint arrays exactly.
    """
    ang = 2.0 * math.pi * np.arange(lobes) / lobes
    radii = mean_radius * (1.0 + wobble * rng.uniform(-1.0, 1.0, size=lobes))
    pts = np.asarray(center, dtype=float) + radii[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
    curves = []
    for i in range(lobes):
        p_prev = pts[(i - 1) % lobes]
        p0 = pts[i]
        p1 = pts[(i + 1) % lobes]
        p_next = pts[(i + 2) % lobes]
        b1 = p0 + (p1 - p_prev) / 6.0
        b2 = p1 - (p_next - p0) / 6.0
        curves.append(RationalBezierCurve([p0, b1, b2, p1], np.ones(4),
                                          curve_id_start + i))
    return curves


def _reid(curve_lists) -> Shape2D:
    curves = []
    for group in curve_lists:
        curves.extend(group)
    for i, c in enumerate(curves):
        c.id = i
    return shape_from_curves(curves)


def stacked_polygons(k: int, rng, sides: int = 15, radius: float = 1.0,
                     jitter: float = 0.03) -> Shape2D:
    """k nearly-coincident polygons: winding k in the shared interior."""
    groups = []
    for _ in range(k):
        phase = rng.uniform(0.0, 2.0 * math.pi / sides)
        c = rng.uniform(-jitter, jitter, size=2)
        r = radius * (1.0 + rng.uniform(-jitter, jitter))
        groups.append(regular_polygon(sides, r, c, phase))
    return _reid(groups)


def random_small_arcs(count: int, rng, extent: float = 10.0,
                      arc_radius_range=(0.05, 0.25)) -> Shape2D:
    """Open conic arcs scattered in a square; boundary soup for scaling runs."""
    curves = []
    for i in range(count):
        center = rng.uniform(-extent, extent, size=2)
        radius = rng.uniform(*arc_radius_range)
        start = rng.uniform(0.0, 2.0 * math.pi)
        span = rng.uniform(0.3, 1.0) * 0.5 * math.pi * rng.choice([-1.0, 1.0])
        curves.append(circular_arc(start, start + span, radius, center, i))
    return shape_from_curves(curves)


def opened_loop(rng, lobes: int = 8) -> Shape2D:
    """A blob loop with one random piece deleted: deliberately non-watertight."""
    center = rng.uniform(-0.3, 0.3, size=2)
    curves = blob(rng, lobes, center, mean_radius=rng.uniform(0.8, 1.2))
    drop = int(rng.integers(0, len(curves)))
    kept = [c for i, c in enumerate(curves) if i != drop]
    return _reid([kept])


def constructed_shapes(rng) -> list:
    """Ten named shapes mixing watertight loops, open arcs and nesting."""
    shapes = []
    shapes.append(("circle", _reid([circle()])))
    shapes.append(("blob", _reid([blob(rng)])))
    shapes.append(("pentagon", _reid([regular_polygon(5, 1.3)])))
    shapes.append(("square", _reid([polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])])))
    shapes.append(("nested-rings", _reid([circle(1.5), circle(0.6)])))
    shapes.append(("ring-with-hole", _reid([circle(1.4), circle(0.5, clockwise=True)])))
    shapes.append(("open-arc", _reid([[circular_arc(0.2, 0.2 + 1.2)]])))
    shapes.append(("open-spiral", _reid([[circular_arc(a, a + 0.9, 0.4 + 0.12 * i, (0.1 * i, 0.0), 0)]
                                         for i, a in enumerate(np.linspace(0.0, 5.0, 6))])))
    shapes.append(("two-blobs", _reid([blob(rng, center=(-1.4, 0.0), mean_radius=0.8),
                                       blob(rng, center=(1.4, 0.2), mean_radius=0.7)])))
    shapes.append(("mixed", _reid([circle(0.8, (-1.0, -0.5)),
                                   regular_polygon(7, 0.7, (1.2, 0.8)),
                                   [circular_arc(3.0, 3.0 + 1.4, 1.8)]])))
    return shapes


def off_boundary_queries(shape: Shape2D, count: int, rng,
                         min_distance_fraction: float = 1e-3,
                         samples_per_curve: int = 256,
                         pad_fraction: float = 0.2) -> np.ndarray:
    """Uniform box samples kept only when farther than a diagonal fraction
    from every curve (distance measured against dense curve samples)."""
    from scipy.spatial import cKDTree

    box = shape.global_aabb
    diagonal = box.diagonal
    ts = np.linspace(0.0, 1.0, samples_per_curve)
    cloud = np.vstack([c.evaluate_many(ts) for c in shape.curves])
    tree = cKDTree(cloud)
    limit = min_distance_fraction * diagonal
    lo = box.min - pad_fraction * diagonal
    hi = box.max + pad_fraction * diagonal
    out = np.empty((count, 2))
    have = 0
    while have < count:
        batch = rng.uniform(lo, hi, size=(max(count, 1024), 2))
        dist, _ = tree.query(batch, k=1)
        good = batch[dist > limit]
        take = min(count - have, len(good))
        out[have:have + take] = good[:take]
        have += take
    return out

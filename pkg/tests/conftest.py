import math

import numpy as np

from curvewind.geometry import RationalBezierCurve, line


def conic_arc(theta0: float, theta1: float, radius: float = 1.0, center=(0.0, 0.0),
              curve_id: int = -1) -> RationalBezierCurve:
    """Exact rational quadratic for a circular arc spanning <= 90 degrees."""
    assert abs(theta1 - theta0) <= math.pi / 2 + 1e-12
    h = 0.5 * (theta1 - theta0)
    mid = 0.5 * (theta0 + theta1)
    c = np.asarray(center, dtype=float)
    p0 = c + radius * np.array([math.cos(theta0), math.sin(theta0)])
    p1 = c + (radius / math.cos(h)) * np.array([math.cos(mid), math.sin(mid)])
    p2 = c + radius * np.array([math.cos(theta1), math.sin(theta1)])
    return RationalBezierCurve([p0, p1, p2], [1.0, math.cos(h), 1.0], curve_id)


def unit_circle_curves(radius: float = 1.0, center=(0.0, 0.0)):
    """Closed CCW circle as 4 exact conic arcs."""
    qs = [i * math.pi / 2 for i in range(5)]
    return [conic_arc(qs[i], qs[i + 1], radius, center, curve_id=i) for i in range(4)]


def ccw_square_chords():
    """Chord endpoint pairs of the CCW unit square."""
    corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
    return [(corners[i], corners[(i + 1) % 4]) for i in range(4)]


def random_curve(rng, degree=None, scale=3.0):
    degree = degree if degree is not None else int(rng.integers(1, 5))
    pts = rng.uniform(-scale, scale, size=(degree + 1, 2))
    w = rng.uniform(0.3, 2.5, size=degree + 1)
    return RationalBezierCurve(pts, w)


def polygon_curves(vertices, curve_id_start: int = 0):
    """Closed polygon as degree-1 curves."""
    vertices = np.asarray(vertices, dtype=float)
    n = len(vertices)
    return [line(vertices[i], vertices[(i + 1) % n], curve_id_start + i) for i in range(n)]

"""Brute-force reference computations used by the test and acceptance suites.

Everything in this module is deliberately independent of the production code
paths it checks: curves are evaluated through the Bernstein basis rather than
de Casteljau, winding numbers come from wrapped polar-angle differences of a
dense polyline rather than the cross/dot atan2 kernel, and moments come from
Gauss-Legendre quadrature rather than the closed-form chord formulas.  None
of this is meant to be fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from curvewind.geometry import RationalBezierCurve, as_point
from curvewind.moments import MomentSet

TWO_PI = 2.0 * math.pi


@dataclass
class OracleConfig:
    polyline_segments_per_curve: int = 100_000   # acceptance runs; 1000 is enough for quick tests
    quadrature_points: int = 64
    fd_step_factor: float = 1e-5

    def __post_init__(self):
        if min(self.polyline_segments_per_curve, self.quadrature_points, 2) < 2:
            raise ValueError("oracle counts must be >= 2")


def bernstein_points(curve: RationalBezierCurve, ts) -> np.ndarray:
    """Rational curve points via the Bernstein basis (not de Casteljau)."""
    ts = np.asarray(ts, dtype=float)
    n = curve.degree
    i = np.arange(n + 1)
    basis = comb(n, i)[None, :] * ts[:, None] ** i[None, :] * (1.0 - ts[:, None]) ** (n - i)[None, :]
    wb = basis * curve.weights[None, :]
    num = wb @ curve.control_points
    den = wb.sum(axis=1)
    return num / den[:, None]


def polyline_winding(q, curve: RationalBezierCurve, n: int) -> float:
    """Winding number of an n-chord polyline sampled uniformly in parameter.

    Computed as the sum of wrapped polar-angle differences seen from q; q must
    be off the polyline.
    """
    q = as_point(q)
    pts = bernstein_points(curve, np.linspace(0.0, 1.0, n + 1))
    phi = np.arctan2(pts[:, 1] - q[1], pts[:, 0] - q[0])
    d = np.diff(phi)
    d = (d + math.pi) % TWO_PI - math.pi
    return float(d.sum() / TWO_PI)


def shape_polyline_winding(q, curves, n: int) -> float:
    """Sum of polyline_winding over a list of curves."""
    return sum(polyline_winding(q, c, n) for c in curves)


def polyline_converges(q, curve: RationalBezierCurve, n: int, factor: float = 0.5) -> bool:
    """Halving self-consistency check run before the oracle is trusted."""
    coarse = polyline_winding(q, curve, n // 2)
    fine = polyline_winding(q, curve, n)
    finer = polyline_winding(q, curve, 2 * n)
    return abs(finer - fine) <= factor * abs(fine - coarse) + 1e-12


def quadrature_moments(segment_or_curve, x0, n: int = 64) -> MomentSet:
    """Centered chord moments by composite Gauss-Legendre quadrature.

    Accepts a curve (its chord is used) or an (a, b) pair of endpoints.
    Exact for the quadratic integrands at n >= 3 up to roundoff.
    """
    if isinstance(segment_or_curve, RationalBezierCurve):
        a, b = segment_or_curve.first, segment_or_curve.last
    else:
        a, b = (as_point(p) for p in segment_or_curve)
    x0 = as_point(x0)
    xi, wq = np.polynomial.legendre.leggauss(n)
    s = 0.5 * (xi + 1.0)
    w = 0.5 * wq
    d = b - a
    x = a[None, :] + s[:, None] * d[None, :]          # (n, 2)
    nvec = np.array([d[1], -d[0]])                     # n-hat * |dx/ds|
    y = x - x0[None, :]
    m0 = w.sum() * nvec
    m1 = np.einsum("s,si,j->ij", w, y, nvec)
    m2 = np.einsum("s,si,sj,k->ijk", w, y, y, nvec)
    length = math.hypot(*d)
    weighted_centroid = length * np.einsum("s,si->i", w, x)
    return MomentSet(m0, m1, m2, length, weighted_centroid, centered_about=x0.copy())


def fd_gradient(fn, at, h: float) -> np.ndarray:
    """Central-difference gradient; output axis 0 is the derivative component."""
    at = as_point(at)
    cols = []
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        cols.append((np.asarray(fn(at + e), dtype=float) - np.asarray(fn(at - e), dtype=float)) / (2.0 * h))
    return np.stack(cols, axis=0)


def write_fixture(path, config: OracleConfig, header: str, rows) -> None:
    """CSV fixture with a provenance line recording the oracle configuration."""
    with open(path, "w") as f:
        f.write(f"# oracle polyline_segments={config.polyline_segments_per_curve}"
                f" quadrature_points={config.quadrature_points}"
                f" fd_step_factor={config.fd_step_factor}\n")
        f.write(header.rstrip("\n") + "\n")
        for row in rows:
            f.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row) + "\n")

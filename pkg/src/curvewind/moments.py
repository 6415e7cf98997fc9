"""Moment tensors of boundary chords and the center-shift transform.

A cluster's far-field winding-number approximation is parameterized by the
integrals of n-hat, x (x) n-hat and x (x) x (x) n-hat over its boundary.  For a
curve whose queries are guaranteed to be far away, the curve may be replaced
by the chord joining its endpoints, for which all three integrals have closed
forms.  Uncentered moments are additive, so a tree of clusters is filled by
summing children and re-centering each node about its own centroid.

Orientation convention: the chord a -> b has (unnormalized) normal
(b.y - a.y, -(b.x - a.x)), so a counter-clockwise closed boundary yields
winding number +1 inside.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from curvewind.geometry import RationalBezierCurve, as_point


class MixedCentering(ValueError):
    """Uncentered-moment sum was given a centered operand."""


class AlreadyCentered(ValueError):
    """Centering transform applied twice."""


class ZeroMeasure(ValueError):
    """Centroid of an all-degenerate (zero total chord length) cluster."""


@dataclass
class MomentSet:
    """Moment tensors of orders 0/1/2 for one chord or a cluster of chords.

    m0 is integral n-hat dx, m1[i, j] is integral x_i * n_j dx and
    m2[i, j, k] is integral x_i * x_j * n_k dx (with x - x0 in place of x when
    centered_about is set).  weight_length and weighted_centroid track total
    chord length and the length-weighted midpoint sum for centroid bookkeeping.
    """

    m0: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    weight_length: float
    weighted_centroid: np.ndarray
    centered_about: Optional[np.ndarray] = None

    @property
    def is_centered(self) -> bool:
        return self.centered_about is not None

    def copy(self) -> "MomentSet":
        return MomentSet(
            self.m0.copy(), self.m1.copy(), self.m2.copy(),
            self.weight_length, self.weighted_centroid.copy(),
            None if self.centered_about is None else self.centered_about.copy(),
        )

    @staticmethod
    def zero() -> "MomentSet":
        return MomentSet(np.zeros(2), np.zeros((2, 2)), np.zeros((2, 2, 2)), 0.0, np.zeros(2))


def segment_moments_batch(a: np.ndarray, b: np.ndarray):
    """Uncentered chord moments for n segments at once.

    a, b have shape (n, 2).  Returns (m0, m1, m2, length, weighted_centroid)
    with shapes (n,2), (n,2,2), (n,2,2,2), (n,), (n,2).
    """
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    d = b - a
    m0 = np.stack([d[:, 1], -d[:, 0]], axis=1)
    mid = 0.5 * (a + b)
    m1 = mid[:, :, None] * m0[:, None, :]
    # integral over s in [0,1] of x_i(s) x_j(s):  a_i a_j + (a_i d_j + a_j d_i)/2 + d_i d_j / 3
    xx = (a[:, :, None] * a[:, None, :]
          + 0.5 * (a[:, :, None] * d[:, None, :] + d[:, :, None] * a[:, None, :])
          + (d[:, :, None] * d[:, None, :]) / 3.0)
    m2 = xx[:, :, :, None] * m0[:, None, None, :]
    length = np.hypot(d[:, 0], d[:, 1])
    return m0, m1, m2, length, length[:, None] * mid


def center_batch(m0, m1, m2, x0):
    """Shift first/second order moments to be about x0; m0 is unaffected.

    All arguments carry a leading batch axis; x0 has shape (n, 2).
    Returns (m1_centered, m2_centered).
    """
    m1c = m1 - x0[:, :, None] * m0[:, None, :]
    m2c = (m2
           - x0[:, :, None, None] * m1[:, None, :, :]
           - x0[:, None, :, None] * m1[:, :, None, :]
           + x0[:, :, None, None] * x0[:, None, :, None] * m0[:, None, None, :])
    return m1c, m2c


def segment_moments(a, b) -> MomentSet:
    """Exact uncentered moments of the segment a -> b (a == b gives all zeros)."""
    a = as_point(a)
    b = as_point(b)
    m0, m1, m2, length, wc = segment_moments_batch(a[None], b[None])
    return MomentSet(m0[0], m1[0], m2[0], float(length[0]), wc[0])


def curve_moments(curve: RationalBezierCurve) -> MomentSet:
    """Uncentered moments of a curve's chord (far-field replacement)."""
    return segment_moments(curve.first, curve.last)


def sum_moments(parts) -> MomentSet:
    """Componentwise sum of uncentered moment sets; empty input gives zeros."""
    total = MomentSet.zero()
    for p in parts:
        if p.is_centered:
            raise MixedCentering("cannot sum centered moment sets")
        total.m0 += p.m0
        total.m1 += p.m1
        total.m2 += p.m2
        total.weight_length += p.weight_length
        total.weighted_centroid += p.weighted_centroid
    return total


def center_moments(m: MomentSet, x0) -> MomentSet:
    """Re-express m about the expansion center x0."""
    if m.is_centered:
        raise AlreadyCentered(f"already centered about {m.centered_about}")
    x0 = as_point(x0)
    m1c, m2c = center_batch(m.m0[None], m.m1[None], m.m2[None], x0[None])
    return MomentSet(m.m0.copy(), m1c[0], m2c[0], m.weight_length,
                     m.weighted_centroid.copy(), x0)


def uncenter_moments(m: MomentSet) -> MomentSet:
    """Inverse of center_moments (used to cross-check tree aggregation)."""
    if not m.is_centered:
        return m.copy()
    x0 = m.centered_about
    m1 = m.m1 + x0[:, None] * m.m0[None, :]
    m2 = (m.m2
          + x0[:, None, None] * m.m1[None, :, :]
          + x0[None, :, None] * m.m1[:, None, :]
          + x0[:, None, None] * x0[None, :, None] * m.m0[None, None, :])
    return MomentSet(m.m0.copy(), m1, m2, m.weight_length, m.weighted_centroid.copy())


def centroid(m: MomentSet) -> np.ndarray:
    """Chord-length weighted centroid of the set; raises ZeroMeasure when empty."""
    if m.weight_length <= 0.0:
        raise ZeroMeasure("cluster has zero total chord length")
    return m.weighted_centroid / m.weight_length


def dump_moments_csv(moment_sets, labels=None) -> str:
    """Flat CSV of moment tensors, one row per set, for golden-file tests."""
    lines = ["label,centered," + ",".join(
        ["m0x", "m0y"]
        + [f"m1{i}{j}" for i in "xy" for j in "xy"]
        + [f"m2{i}{j}{k}" for i in "xy" for j in "xy" for k in "xy"]
        + ["length", "cx", "cy"])]
    for idx, m in enumerate(moment_sets):
        label = labels[idx] if labels else str(idx)
        vals = np.concatenate([m.m0.ravel(), m.m1.ravel(), m.m2.ravel(),
                               [m.weight_length], m.weighted_centroid.ravel()])
        lines.append(f"{label},{int(m.is_centered)}," + ",".join(f"{v:.17g}" for v in vals))
    return "\n".join(lines) + "\n"

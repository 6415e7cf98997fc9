"""Derivatives of the 2D Laplace Green's function and the far-field expansion.

With G(x; q) = ln||x - q|| / (2 pi), the winding number of a far cluster is
approximated by contracting the cluster's centered moments against the
gradient, Hessian and third-derivative tensor of G at the cluster center.
The closed forms below are hand-derived and guarded by finite-difference
checks in the test suite; G is harmonic away from q, so the Hessian is
trace-free and every contraction of the third-derivative tensor vanishes.
"""

from __future__ import annotations

import math

import numpy as np

from curvewind.geometry import as_point
from curvewind.moments import MomentSet

TWO_PI = 2.0 * math.pi

ORDERS = (0, 1, 2)


class SingularEvaluation(ArithmeticError):
    """Far-field tensors requested too close to the query point."""


def check_order(order: int) -> int:
    if order not in ORDERS:
        raise ValueError(f"expansion order must be one of {ORDERS}, got {order!r}")
    return order


def _displacement(x0, q, eps):
    d = as_point(x0) - as_point(q)
    r2 = float(d @ d)
    if r2 <= eps * eps or r2 == 0.0:
        raise SingularEvaluation(f"evaluation point within {eps} of query")
    return d, r2


def grad_g(x0, q, eps: float = 0.0) -> np.ndarray:
    """Gradient of G at x0: (x0 - q) / (2 pi r^2)."""
    d, r2 = _displacement(x0, q, eps)
    return d / (TWO_PI * r2)


def grad2_g(x0, q, eps: float = 0.0) -> np.ndarray:
    """Hessian of G at x0; symmetric and trace-free."""
    d, r2 = _displacement(x0, q, eps)
    return (np.eye(2) - 2.0 * np.outer(d, d) / r2) / (TWO_PI * r2)


def grad3_g(x0, q, eps: float = 0.0) -> np.ndarray:
    """Third derivative tensor of G at x0; fully symmetric, all traces zero."""
    d, r2 = _displacement(x0, q, eps)
    outer3 = d[:, None, None] * d[None, :, None] * d[None, None, :]
    eye = np.eye(2)
    sym = (eye[:, :, None] * d[None, None, :]
           + eye[:, None, :] * d[None, :, None]
           + eye[None, :, :] * d[:, None, None])
    return (8.0 * outer3 - 2.0 * r2 * sym) / (TWO_PI * r2 ** 3)


def pack_coefficients(m0: np.ndarray, m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Collapse centered moment tensors to the 9 contraction weights.

    The Hessian is symmetric and the third-derivative tensor is fully
    symmetric, so the 2+4+8 moment entries reduce to 9 independent weights.
    Accepts a leading batch axis.
    """
    m0 = np.asarray(m0, dtype=float)
    batched = m0.ndim == 2
    if not batched:
        m0, m1, m2 = m0[None], np.asarray(m1)[None], np.asarray(m2)[None]
    out = np.empty((len(m0), 9))
    out[:, 0] = m0[:, 0]
    out[:, 1] = m0[:, 1]
    out[:, 2] = m1[:, 0, 0]
    out[:, 3] = m1[:, 0, 1] + m1[:, 1, 0]
    out[:, 4] = m1[:, 1, 1]
    out[:, 5] = m2[:, 0, 0, 0]
    out[:, 6] = m2[:, 0, 0, 1] + m2[:, 0, 1, 0] + m2[:, 1, 0, 0]
    out[:, 7] = m2[:, 0, 1, 1] + m2[:, 1, 0, 1] + m2[:, 1, 1, 0]
    out[:, 8] = m2[:, 1, 1, 1]
    return out if batched else out[0]


def approx_winding_displaced(coeffs: np.ndarray, dx, dy, r2, order: int) -> np.ndarray:
    """Expansion evaluated from precomputed displacements d = center - q.

    coeffs is either a single (9,) row from pack_coefficients or an (n, 9)
    batch paired elementwise with dx/dy/r2; callers guarantee r2 > 0.
    """
    c = np.asarray(coeffs)
    s1 = 1.0 / (TWO_PI * r2)
    w = (c[..., 0] * dx + c[..., 1] * dy) * s1
    if order >= 1:
        ir2 = 1.0 / r2
        g2xx = (1.0 - 2.0 * dx * dx * ir2) * s1
        g2xy = (-2.0 * dx * dy * ir2) * s1
        w += c[..., 2] * g2xx + c[..., 3] * g2xy - c[..., 4] * g2xx  # g2yy = -g2xx (trace-free)
    if order >= 2:
        s3 = s1 * ir2 * ir2
        t_x = 2.0 * r2 * dx
        t_y = 2.0 * r2 * dy
        g3xxx = (8.0 * dx * dx * dx - 3.0 * t_x) * s3
        g3xxy = (8.0 * dx * dx * dy - t_y) * s3
        g3xyy = (8.0 * dx * dy * dy - t_x) * s3
        g3yyy = (8.0 * dy * dy * dy - 3.0 * t_y) * s3
        w += 0.5 * (c[..., 5] * g3xxx + c[..., 6] * g3xxy + c[..., 7] * g3xyy + c[..., 8] * g3yyy)
    return w


def approx_winding_packed(coeffs: np.ndarray, center, qx: np.ndarray, qy: np.ndarray,
                          order: int, eps: float = 0.0) -> np.ndarray:
    """Vectorized expansion for one cluster against many query points.

    coeffs is the (9,) output of pack_coefficients for moments centered at
    `center`; qx/qy are query coordinate arrays.
    """
    dx = center[0] - qx
    dy = center[1] - qy
    r2 = dx * dx + dy * dy
    if eps > 0.0 and np.any(r2 <= eps * eps):
        raise SingularEvaluation("query inside singular radius of a far cluster")
    return approx_winding_displaced(coeffs, dx, dy, r2, order)


def approx_winding(m: MomentSet, q, order: int, eps: float = 0.0) -> float:
    """Order-truncated far-field winding number of a cluster at q.

    m must be centered (about the cluster's expansion center); q is assumed
    outside the caller's far-field sphere.
    """
    check_order(order)
    if not m.is_centered:
        raise ValueError("approx_winding needs centered moments")
    q = as_point(q)
    coeffs = pack_coefficients(m.m0, m.m1, m.m2)
    out = approx_winding_packed(coeffs, m.centered_about, np.array([q[0]]), np.array([q[1]]),
                                order, eps)
    return float(out[0])

"""Adaptive curve subdivision: bound every piece's box by a fraction of the
shape's bounding-box diagonal.

Far-field accuracy of the accelerated evaluator depends on clusters being
small relative to the shape, so curves are bisected (always at the parameter
midpoint) until each piece's AABB diagonal drops below the threshold. The
pieces trace exactly the same points with the same orientation; only the
bookkeeping (fresh ids, a map back to source ids) changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from curvewind.geometry import RationalBezierCurve
from curvewind.svg import Shape2D


@dataclass
class SubdivisionConfig:
    max_diag_fraction: float = 0.10
    max_depth: int = 20

    def __post_init__(self):
        if not (0.0 < self.max_diag_fraction <= 1.0):
            raise ValueError("max_diag_fraction must be in (0, 1]")
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")


def adaptive_subdivide(shape: Shape2D, config: Optional[SubdivisionConfig] = None) -> Shape2D:
    """Bisect curves until every AABB diagonal <= fraction * global diagonal.

    The global diagonal is taken from the input shape once (subdividing can
    only shrink boxes). If nothing needs splitting the input shape is
    returned as-is; otherwise all curves get fresh sequential ids and
    shape.source_ids maps them back.
    """
    config = config or SubdivisionConfig()
    diagonal = shape.global_aabb.diagonal
    if diagonal == 0.0:
        return shape
    threshold = config.max_diag_fraction * diagonal

    pieces: list[tuple[RationalBezierCurve, int]] = []   # (piece, source id)
    cap_hits = 0
    any_split = False

    def refine(curve: RationalBezierCurve, source: int, depth: int) -> None:
        nonlocal cap_hits, any_split
        if curve.aabb().diagonal <= threshold:
            pieces.append((curve, source))
            return
        if depth >= config.max_depth:
            cap_hits += 1
            pieces.append((curve, source))
            return
        any_split = True
        left, right = curve.subdivide(0.5)
        refine(left, source, depth + 1)
        refine(right, source, depth + 1)

    for curve in shape.curves:
        refine(curve, curve.id, 0)

    if not any_split and cap_hits == 0:
        return shape

    curves = [RationalBezierCurve(piece.control_points, piece.weights, new_id)
              for new_id, (piece, _) in enumerate(pieces)]
    source_ids = {new_id: source for new_id, (_, source) in enumerate(pieces)}
    return Shape2D(curves, shape.global_aabb, shape.source_name,
                   source_ids=source_ids, depth_cap_hits=cap_hits)

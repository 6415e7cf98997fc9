"""Generalized winding numbers and containment queries for curved 2D boundaries.

The library computes the generalized winding number (GWN) of collections of
rational Bezier curves, either directly (exact signed-angle recursion per
curve) or through a BVH whose nodes carry precomputed moment data consumed
by a far-field Taylor approximation.  Containment decisions are made by
rounding the GWN.
"""

from curvewind.geometry import Aabb, RationalBezierCurve
from curvewind.svg import Shape2D, parse_svg_paths, viewbox_grid
from curvewind.subdivision import SubdivisionConfig, adaptive_subdivide
from curvewind.moments import (
    MomentSet,
    center_moments,
    centroid,
    curve_moments,
    segment_moments,
    sum_moments,
)
from curvewind.direct import (
    DirectConfig,
    DirectEvaluator,
    curve_winding,
    direct_field,
    segment_winding,
)
from curvewind.bvh import Bvh, BvhNode, build, is_far
from curvewind.taylor import approx_winding, grad2_g, grad3_g, grad_g
from curvewind.engine import (
    ErrorReport,
    FieldResult,
    QueryConfig,
    compare_to_direct,
    containment,
    containment_batch,
    evaluate_batch,
)
from curvewind.report import RunReport, load_report
from curvewind.experiments import run_experiment

__all__ = [
    "Aabb",
    "Bvh",
    "BvhNode",
    "DirectConfig",
    "DirectEvaluator",
    "ErrorReport",
    "FieldResult",
    "MomentSet",
    "QueryConfig",
    "RationalBezierCurve",
    "RunReport",
    "Shape2D",
    "SubdivisionConfig",
    "adaptive_subdivide",
    "approx_winding",
    "build",
    "center_moments",
    "centroid",
    "compare_to_direct",
    "containment",
    "containment_batch",
    "curve_moments",
    "curve_winding",
    "direct_field",
    "evaluate_batch",
    "grad2_g",
    "grad3_g",
    "grad_g",
    "is_far",
    "load_report",
    "parse_svg_paths",
    "run_experiment",
    "segment_moments",
    "segment_winding",
    "sum_moments",
    "viewbox_grid",
]

__version__ = "0.1.0"

"""Run artifacts: JSON run reports, delimited field tables, graymap images.

The JSON report validates against the schema shipped in
``curvewind/data/run_report_schema.json``; CSV writers use shortest
round-trip float formatting so identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Optional, Sequence

import jsonschema
import numpy as np

from curvewind.engine import Misclassification


@lru_cache(maxsize=1)
def report_schema() -> dict:
    text = resources.files("curvewind").joinpath("data/run_report_schema.json").read_text()
    return json.loads(text)


def _fmt(v) -> str:
    return repr(float(v))


def misclassification_records(queries, misclassified: Sequence[Misclassification]) -> list:
    """Attach query coordinates to engine misclassification entries."""
    queries = np.asarray(queries, dtype=float)
    records = []
    for m in misclassified:
        records.append({
            "x": float(queries[m.index, 0]),
            "y": float(queries[m.index, 1]),
            "direct_w": m.direct_value,
            "approx_w": m.approx_value,
            "fractional_part": m.fractional_part,
            "confidence": m.confidence,
        })
    return records


@dataclass
class RunReport:
    """Everything a run leaves behind besides the field itself."""

    input_name: str
    method: str
    query_count: int
    raw_curve_count: int
    subdivided_curve_count: int
    grid: Optional[tuple] = None
    beta: Optional[float] = None
    order: Optional[int] = None
    threads: int = 1
    seed: Optional[int] = None
    bvh_node_count: Optional[int] = None
    bvh_leaf_count: Optional[int] = None
    bvh_max_depth: Optional[int] = None
    depth_cap_hits: int = 0
    timings: dict = field(default_factory=dict)
    error_summary: Optional[dict] = None
    notes: str = ""

    def to_dict(self) -> dict:
        beta = self.beta
        if beta is not None:
            beta = "inf" if math.isinf(beta) else float(beta)
        bvh = None
        if self.bvh_node_count is not None:
            bvh = {"node_count": int(self.bvh_node_count),
                   "leaf_count": int(self.bvh_leaf_count),
                   "max_depth": int(self.bvh_max_depth)}
        timings = {k: 0.0 for k in ("parse", "subdivide", "moments", "build", "query")}
        for k, v in self.timings.items():
            timings[k] = float(v)
        return {
            "schema_version": 1,
            "input_name": self.input_name,
            "method": self.method,
            "grid": None if self.grid is None else [int(g) for g in self.grid],
            "query_count": int(self.query_count),
            "raw_curve_count": int(self.raw_curve_count),
            "subdivided_curve_count": int(self.subdivided_curve_count),
            "beta": beta,
            "order": None if self.order is None else int(self.order),
            "threads": int(self.threads),
            "seed": None if self.seed is None else int(self.seed),
            "bvh": bvh,
            "depth_cap_hits": int(self.depth_cap_hits),
            "timings": timings,
            "error_summary": self.error_summary,
            "notes": self.notes,
        }

    def validate(self) -> None:
        jsonschema.validate(self.to_dict(), report_schema())

    def write(self, path) -> None:
        payload = self.to_dict()
        jsonschema.validate(payload, report_schema())
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=False)
            fh.write("\n")


def load_report(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    jsonschema.validate(payload, report_schema())
    return payload


def write_field_csv(path, queries, values, inside, confidence) -> None:
    """One row per query: ``x,y,w,inside,confidence`` (inside as 0/1)."""
    queries = np.asarray(queries, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,w,inside,confidence\n")
        for i in range(len(queries)):
            fh.write(f"{_fmt(queries[i, 0])},{_fmt(queries[i, 1])},"
                     f"{_fmt(values[i])},{int(inside[i])},{_fmt(confidence[i])}\n")


def write_errors_csv(path, queries, direct_values, approx_values) -> None:
    queries = np.asarray(queries, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,w_direct,w_agglomerated,abs_error\n")
        for i in range(len(queries)):
            err = abs(float(approx_values[i]) - float(direct_values[i]))
            fh.write(f"{_fmt(queries[i, 0])},{_fmt(queries[i, 1])},"
                     f"{_fmt(direct_values[i])},{_fmt(approx_values[i])},{_fmt(err)}\n")


def write_field_pgm(path, grid_values, value_range=None):
    """16-bit binary graymap of a field sampled on a grid.

    ``grid_values`` is (ny, nx) with the row index increasing with y; the
    image is written top row = largest y. The linear value range used for
    the mapping is recorded in a header comment and returned.
    """
    grid_values = np.asarray(grid_values, dtype=float)
    if grid_values.ndim != 2:
        raise ValueError("grid_values must be a 2D array")
    ny, nx = grid_values.shape
    if value_range is None:
        lo, hi = float(grid_values.min()), float(grid_values.max())
    else:
        lo, hi = float(value_range[0]), float(value_range[1])
    span = hi - lo
    if span > 0.0:
        scaled = (grid_values - lo) * (65535.0 / span)
    else:
        scaled = np.zeros_like(grid_values)
    pixels = np.clip(np.rint(scaled), 0, 65535).astype(">u2")
    header = (f"P5\n"
              f"# winding field, w in [{_fmt(lo)}, {_fmt(hi)}] mapped"
              f" linearly to [0, 65535]\n"
              f"# top row = largest y\n"
              f"{nx} {ny}\n65535\n")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.flipud(pixels).tobytes())
    return lo, hi

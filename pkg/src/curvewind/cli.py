"""Command-line front end: fields over SVG inputs plus canned experiments.

Exit codes: 0 success, 1 input parse failure, 2 invalid flags or unknown
experiment, 3 I/O failure writing artifacts. Set ``CURVEWIND_LOG`` to
DEBUG/INFO/WARNING/ERROR to control verbosity.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from curvewind import experiments, plots, report, svg
from curvewind.bvh import Bvh
from curvewind.direct import DirectConfig, direct_field
from curvewind.engine import (QueryConfig, compare_to_direct,
                              containment_batch, evaluate_batch)
from curvewind.experiments import UnknownExperiment
from curvewind.subdivision import SubdivisionConfig, adaptive_subdivide
from curvewind.svg import MalformedPath

log = logging.getLogger("curvewind")


def _parse_grid(text: str):
    m = re.fullmatch(r"(\d+)[xX](\d+)", text)
    if not m or int(m.group(1)) < 1 or int(m.group(2)) < 1:
        raise argparse.ArgumentTypeError(f"expected WxH with positive sizes, got {text!r}")
    return int(m.group(1)), int(m.group(2))


def _parse_beta(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}")
    if value <= 0.0:
        raise argparse.ArgumentTypeError("beta must be positive")
    return value


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="curvewind",
        description="Winding-number fields and containment for curved 2D "
                    "boundaries, by direct evaluation or an accelerated "
                    "far-field approximation.")
    p.add_argument("--input", help="SVG document (or bare path data) to evaluate")
    p.add_argument("--grid", type=_parse_grid, default=(500, 500), metavar="WxH",
                   help="sample grid size (default 500x500)")
    p.add_argument("--method", choices=("direct", "agglomerated"),
                   default="agglomerated")
    p.add_argument("--beta", type=_parse_beta, default=2.0, metavar="R|inf",
                   help="far-field acceptance threshold (default 2; 'inf' "
                        "disables approximation)")
    p.add_argument("--order", type=int, choices=(0, 1, 2), default=2,
                   help="expansion order for far nodes (default 2)")
    p.add_argument("--subdiv-frac", type=float, default=0.10, metavar="F",
                   help="max piece box diagonal as a fraction of the global "
                        "diagonal (default 0.10)")
    p.add_argument("--subdiv-max-depth", type=int, default=20, metavar="D")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   metavar="N", help="worker threads for query batches")
    p.add_argument("--compare", action="store_true",
                   help="also evaluate directly and report errors "
                        "(agglomerated method only)")
    p.add_argument("--seed", type=int, default=0, metavar="S")
    p.add_argument("--out", default="curvewind-out", metavar="DIR")
    p.add_argument("--experiment", metavar="NAME",
                   help=f"run a canned sweep instead of a field: "
                        f"{', '.join(sorted(experiments.EXPERIMENTS))}")
    return p


def _configure_logging() -> None:
    level = os.environ.get("CURVEWIND_LOG", "WARNING").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
        level = "WARNING"
    logging.basicConfig(level=getattr(logging, level),
                        format="%(levelname)s %(name)s: %(message)s")


def _validate(args, parser) -> None:
    if args.experiment is None and args.input is None:
        parser.error("--input is required unless --experiment is given")
    if args.compare and args.method == "direct":
        parser.error("--compare only applies to --method agglomerated")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    if not (0.0 < args.subdiv_frac <= 1.0):
        parser.error("--subdiv-frac must be in (0, 1]")
    if args.subdiv_max_depth < 0:
        parser.error("--subdiv-max-depth must be non-negative")


def _run_field(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    text = Path(args.input).read_text(encoding="utf-8")
    t0 = time.perf_counter()
    shape = svg.parse_svg_paths(text, source_name=os.path.basename(args.input))
    parse_seconds = time.perf_counter() - t0
    log.info("parsed %d curves from %s", len(shape), args.input)

    nx, ny = args.grid
    queries = svg.viewbox_grid(text, nx, ny)
    xs = queries[:nx, 0]
    ys = queries[::nx, 1]

    t0 = time.perf_counter()
    refined = adaptive_subdivide(shape, SubdivisionConfig(
        max_diag_fraction=args.subdiv_frac, max_depth=args.subdiv_max_depth))
    subdivide_seconds = time.perf_counter() - t0
    log.info("subdivided to %d curves", len(refined))

    rep = report.RunReport(
        input_name=os.path.basename(args.input), method=args.method,
        query_count=len(queries), raw_curve_count=len(shape),
        subdivided_curve_count=len(refined), grid=(nx, ny),
        threads=args.threads, seed=args.seed,
        depth_cap_hits=refined.depth_cap_hits)
    rep.timings = {"parse": parse_seconds, "subdivide": subdivide_seconds,
                   "moments": 0.0, "build": 0.0, "query": 0.0}

    if args.method == "direct":
        t0 = time.perf_counter()
        values, _ = direct_field(queries, refined.curves,
                                 global_diagonal=refined.global_aabb.diagonal)
        rep.timings["query"] = time.perf_counter() - t0
    else:
        t0 = time.perf_counter()
        tree = Bvh(refined)
        rep.timings["build"] = time.perf_counter() - t0
        rep.timings["moments"] = tree.moment_seconds
        rep.beta = args.beta
        rep.order = args.order
        rep.bvh_node_count = len(tree)
        rep.bvh_leaf_count = tree.leaf_count
        rep.bvh_max_depth = tree.max_depth_reached
        cfg = QueryConfig(beta=args.beta, order=args.order,
                          direct=DirectConfig())
        if args.compare:
            err = compare_to_direct(tree, shape, queries, cfg,
                                    workers=args.threads)
            values = err.approx_values
            rep.timings["query"] = err.approx_seconds
            rep.error_summary = {
                "linf": err.linf, "l2": err.l2, "compared_count": len(queries),
                "misclassified": report.misclassification_records(
                    queries, err.misclassified)}
            report.write_errors_csv(out_dir / "errors.csv", queries,
                                    err.direct_values, err.approx_values)
            log.info("compare: linf %.3g, %d misclassified",
                     err.linf, len(err.misclassified))
        else:
            result = evaluate_batch(tree, queries, cfg, workers=args.threads)
            values = result.values
            rep.timings["query"] = result.query_seconds

    inside, confidence = containment_batch(values)
    report.write_field_csv(out_dir / "field.csv", queries, values,
                           inside, confidence)
    grid_values = values.reshape(ny, nx)
    lo, hi = report.write_field_pgm(out_dir / "field.pgm", grid_values)
    plots.save_field_figure(out_dir / "field.png", xs, ys, grid_values,
                            curves=shape.curves)
    rep.write(out_dir / "report.json")

    print(f"{args.method}: {len(queries)} queries over {len(refined)} curves "
          f"({len(shape)} before subdivision); w in [{lo:.3g}, {hi:.3g}]; "
          f"query {rep.timings['query']:.3f}s; artifacts in {out_dir}")
    return 0


def _run_experiment(args) -> int:
    result = experiments.run_experiment(
        args.experiment, args.out, seed=args.seed, threads=args.threads,
        grid=args.grid, beta=args.beta, order=args.order)
    print(f"{args.experiment}: {len(result['rows'])} rows -> {result['csv']}")
    for fig in result.get("figures", []):
        print(f"  figure {fig}")
    return 0


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    _configure_logging()
    _validate(args, parser)
    try:
        if args.experiment is not None:
            return _run_experiment(args)
        return _run_field(args)
    except UnknownExperiment as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MalformedPath as exc:
        print(f"error: cannot parse {args.input}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

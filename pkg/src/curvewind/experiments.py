"""Parameter sweeps: error/runtime protocols with CSV tables and figures.

Each experiment takes an output directory plus keyword parameters with
protocol defaults, seeds all randomness explicitly, writes a CSV table
keyed by the swept parameter and at least one figure, and returns the
rows it wrote. Timing columns are measured wall-clock and are the only
columns exempt from byte-for-byte reproducibility.
"""

from __future__ import annotations

import inspect
import time
from pathlib import Path

import numpy as np

from curvewind import plots, synth
from curvewind.bvh import Bvh
from curvewind.direct import direct_field
from curvewind.engine import (QueryConfig, compare_to_direct,
                              containment_batch, evaluate_batch)
from curvewind.geometry import Aabb
from curvewind.subdivision import SubdivisionConfig, adaptive_subdivide
from curvewind.svg import shape_from_curves


class UnknownExperiment(ValueError):
    """Raised for experiment names outside the registry."""


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _grid_queries(box: Aabb, nx: int, ny: int, pad_fraction: float = 0.2):
    pad = pad_fraction * box.diagonal
    lo = box.min - pad
    hi = box.max + pad
    xs = lo[0] + (hi[0] - lo[0]) * (np.arange(nx) + 0.5) / nx
    ys = lo[1] + (hi[1] - lo[1]) * (np.arange(ny) + 0.5) / ny
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    return np.column_stack([gx.ravel(), gy.ravel()]), xs, ys


def _prepare(shape, frac: float = 0.10):
    t0 = time.perf_counter()
    refined = adaptive_subdivide(shape, SubdivisionConfig(max_diag_fraction=frac))
    t1 = time.perf_counter()
    tree = Bvh(refined)
    t2 = time.perf_counter()
    return refined, tree, t1 - t0, t2 - t1


def _timed_direct(queries, refined):
    t0 = time.perf_counter()
    values, _ = direct_field(queries, refined.curves,
                             global_diagonal=refined.global_aabb.diagonal)
    return values, time.perf_counter() - t0


def _cell(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _write_rows(path, header, rows) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")
    return path


def _fit_slope(xs, ys) -> float:
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


def order_sweep(out_dir, seed: int = 0, threads: int = 1,
                grid=(500, 500), beta: float = 2.0) -> dict:
    """Error vs expansion order on two watertight shapes."""
    out_dir = _outdir(out_dir)
    rng = np.random.default_rng(seed)
    shapes = [("circle", shape_from_curves(synth.circle())),
              ("blob", shape_from_curves(synth.blob(rng)))]
    rows = []
    series = {}
    for name, shape in shapes:
        refined, tree, _, _ = _prepare(shape)
        queries, _, _ = _grid_queries(shape.global_aabb, *grid)
        w_direct, direct_seconds = _timed_direct(queries, refined)
        linfs, medians = [], []
        for order in (0, 1, 2):
            res = evaluate_batch(tree, queries, QueryConfig(beta=beta, order=order),
                                 workers=threads)
            err = np.abs(res.values - w_direct)
            linf = float(err.max())
            med = float(np.median(err))
            l2 = float(np.sqrt(np.mean(err ** 2)))
            rows.append([name, order, linf, med, l2,
                         res.query_seconds, direct_seconds])
            linfs.append(linf)
            medians.append(med)
        series[f"{name} linf"] = linfs
        series[f"{name} median"] = medians
    csv_path = _write_rows(out_dir / "order_sweep.csv",
                           ["shape", "order", "linf", "median", "l2",
                            "query_seconds", "direct_seconds"], rows)
    fig_path = plots.save_sweep_figure(out_dir / "order_sweep.png", [0, 1, 2],
                                       series, "expansion order", "absolute error",
                                       "error vs expansion order", logy=True)
    return {"rows": rows, "csv": csv_path, "figures": [fig_path]}


def beta_sweep(out_dir, seed: int = 0, threads: int = 1, grid=(500, 500),
               betas=(1.0, 2.0, 4.0, 8.0), orders=(0, 1, 2),
               repeats: int = 3) -> dict:
    """Error and runtime as the far-field threshold widens, per order."""
    out_dir = _outdir(out_dir)
    rng = np.random.default_rng(seed)
    shape = shape_from_curves(synth.blob(rng))
    refined, tree, _, _ = _prepare(shape)
    queries, _, _ = _grid_queries(shape.global_aabb, *grid)
    w_direct, direct_seconds = _timed_direct(queries, refined)
    rows = []
    err_series, time_series = {}, {}
    for order in orders:
        linfs, times = [], []
        for beta in betas:
            cfg = QueryConfig(beta=float(beta), order=order)
            samples = []
            for _ in range(repeats):
                res = evaluate_batch(tree, queries, cfg, workers=threads)
                samples.append(res.query_seconds)
            err = np.abs(res.values - w_direct)
            linf = float(err.max())
            l2 = float(np.sqrt(np.mean(err ** 2)))
            q = float(np.median(samples))
            rows.append([order, float(beta), linf, l2, q, repeats])
            linfs.append(linf)
            times.append(q)
        err_series[f"order {order}"] = linfs
        time_series[f"order {order}"] = times
    csv_path = _write_rows(out_dir / "beta_sweep.csv",
                           ["order", "beta", "linf", "l2",
                            "query_seconds", "repeats"], rows)
    figs = [plots.save_sweep_figure(out_dir / "beta_sweep_error.png", list(betas),
                                    err_series, "beta", "L-inf error",
                                    "error vs far-field threshold",
                                    logx=True, logy=True),
            plots.save_sweep_figure(out_dir / "beta_sweep_runtime.png", list(betas),
                                    time_series, "beta", "query seconds",
                                    "runtime vs far-field threshold", logx=True)]
    return {"rows": rows, "csv": csv_path, "figures": figs,
            "direct_seconds": direct_seconds}


def subdiv_sweep(out_dir, seed: int = 0, threads: int = 1, grid=(250, 250),
                 fractions=(0.4, 0.2, 0.1, 0.05), beta: float = 2.0,
                 order: int = 2) -> dict:
    """Preprocessing/query cost and error as subdivision gets finer."""
    out_dir = _outdir(out_dir)
    rng = np.random.default_rng(seed)
    shape = shape_from_curves(synth.blob(rng))
    queries, _, _ = _grid_queries(shape.global_aabb, *grid)
    rows = []
    linfs, pre_times, query_times = [], [], []
    for frac in fractions:
        refined, tree, t_sub, t_build = _prepare(shape, frac)
        w_direct, _ = _timed_direct(queries, refined)
        res = evaluate_batch(tree, queries, QueryConfig(beta=beta, order=order),
                             workers=threads)
        linf = float(np.abs(res.values - w_direct).max())
        rows.append([float(frac), len(refined), t_sub, t_build,
                     res.query_seconds, linf])
        linfs.append(linf)
        pre_times.append(t_sub + t_build)
        query_times.append(res.query_seconds)
    csv_path = _write_rows(out_dir / "subdiv_sweep.csv",
                           ["max_diag_fraction", "curve_count",
                            "subdivide_seconds", "build_seconds",
                            "query_seconds", "linf"], rows)
    figs = [plots.save_sweep_figure(out_dir / "subdiv_sweep_error.png",
                                    list(fractions), {"linf": linfs},
                                    "max box diagonal / global diagonal",
                                    "L-inf error", "error vs subdivision depth",
                                    logx=True, logy=True),
            plots.save_sweep_figure(out_dir / "subdiv_sweep_runtime.png",
                                    list(fractions),
                                    {"preprocessing": pre_times,
                                     "query": query_times},
                                    "max box diagonal / global diagonal",
                                    "seconds", "cost vs subdivision depth",
                                    logx=True)]
    return {"rows": rows, "csv": csv_path, "figures": figs}


def overlap(out_dir, seed: int = 0, threads: int = 1, grid=(250, 250),
            ks=(1, 2, 4, 8, 16), beta: float = 2.0, order: int = 0) -> dict:
    """Error growth over k stacked nearly-coincident 15-gons."""
    out_dir = _outdir(out_dir)
    rng = np.random.default_rng(seed)
    box = Aabb(np.array([-1.3, -1.3]), np.array([1.3, 1.3]))
    queries, _, _ = _grid_queries(box, *grid, pad_fraction=0.0)
    rows = []
    abs_errs, rel_errs = [], []
    for k in ks:
        shape = synth.stacked_polygons(k, rng)
        refined, tree, _, _ = _prepare(shape)
        w_direct, _ = _timed_direct(queries, refined)
        res = evaluate_batch(tree, queries, QueryConfig(beta=beta, order=order),
                             workers=threads)
        err = np.abs(res.values - w_direct)
        linf_abs = float(err.max())
        linf_rel = linf_abs / max(1.0, float(np.abs(w_direct).max()))
        inside_d, _ = containment_batch(w_direct)
        inside_a, _ = containment_batch(res.values)
        flips = int(np.count_nonzero(inside_d != inside_a))
        rows.append([k, len(refined), linf_abs, linf_rel, flips,
                     res.query_seconds])
        abs_errs.append(linf_abs)
        rel_errs.append(linf_rel)
    slope = _fit_slope(ks, abs_errs)
    csv_path = _write_rows(out_dir / "overlap.csv",
                           ["k", "curve_count", "linf_abs", "linf_rel",
                            "misclassified", "query_seconds"], rows)
    figs = [plots.save_sweep_figure(out_dir / "overlap.png", list(ks),
                                    {"absolute": abs_errs, "relative": rel_errs},
                                    "stacked polygon count", "L-inf error",
                                    "error vs overlap count", logx=True, logy=True,
                                    annotate=f"absolute-error slope {slope:.2f}")]
    return {"rows": rows, "csv": csv_path, "figures": figs, "slope": slope}


def disagreement(out_dir, seed: int = 0, threads: int = 1, shapes: int = 20,
                 queries_per_shape: int = 2000, beta: float = 4.0,
                 order: int = 2) -> dict:
    """Where rounding disagrees on deliberately opened loops, and how sure."""
    out_dir = _outdir(out_dir)
    rng = np.random.default_rng(seed)
    cfg = QueryConfig(beta=beta, order=order)
    rows = []
    records = []
    for si in range(shapes):
        shape = synth.opened_loop(rng)
        refined, tree, _, _ = _prepare(shape)
        box = shape.global_aabb
        pad = 0.2 * box.diagonal
        queries = rng.uniform(box.min - pad, box.max + pad,
                              size=(queries_per_shape, 2))
        rep = compare_to_direct(tree, shape, queries, cfg, workers=threads)
        worst_conf = max((m.confidence for m in rep.misclassified), default=0.0)
        worst_off = max((abs(m.fractional_part - 0.5) for m in rep.misclassified),
                        default=0.0)
        rows.append([si, queries_per_shape, len(rep.misclassified),
                     worst_conf, worst_off])
        for m in rep.misclassified:
            records.append([si, float(queries[m.index, 0]),
                            float(queries[m.index, 1]), m.direct_value,
                            m.approx_value, m.fractional_part, m.confidence])
    csv_path = _write_rows(out_dir / "disagreement.csv",
                           ["shape", "query_count", "disagreements",
                            "worst_confidence", "worst_frac_offset"], rows)
    _write_rows(out_dir / "disagreement_points.csv",
                ["shape", "x", "y", "direct_w", "approx_w",
                 "fractional_part", "confidence"], records)
    fracs = [r[5] for r in records]
    figs = [plots.save_histogram_figure(out_dir / "disagreement.png",
                                        fracs if fracs else [0.5],
                                        np.linspace(0.0, 1.0, 41),
                                        "ground-truth fractional part",
                                        "disagreement locations",
                                        vlines=(0.3, 0.7))]
    return {"rows": rows, "records": records, "csv": csv_path, "figures": figs}


def scaling(out_dir, seed: int = 0, threads: int = 1, grid=(500, 500),
            sizes=(100, 300, 1000, 3000, 10000), beta: float = 2.0,
            order: int = 2) -> dict:
    """Query time vs curve count for direct and agglomerated evaluation."""
    out_dir = _outdir(out_dir)
    rng = np.random.default_rng(seed)
    cfg = QueryConfig(beta=beta, order=order)
    rows = []
    direct_times, engine_times = [], []
    for n in sizes:
        shape = synth.random_small_arcs(n, rng)
        refined, tree, t_sub, t_build = _prepare(shape)
        queries, _, _ = _grid_queries(shape.global_aabb, *grid)
        w_direct, t_direct = _timed_direct(queries, refined)
        res = evaluate_batch(tree, queries, cfg, workers=threads)
        linf = float(np.abs(res.values - w_direct).max())
        speedup = t_direct / res.query_seconds if res.query_seconds > 0 else float("inf")
        rows.append([n, len(refined), t_sub + t_build, t_direct,
                     res.query_seconds, speedup, linf])
        direct_times.append(t_direct)
        engine_times.append(res.query_seconds)
    slopes = {"direct": _fit_slope(sizes, direct_times),
              "agglomerated": _fit_slope(sizes, engine_times)}
    csv_path = _write_rows(out_dir / "scaling.csv",
                           ["curve_count", "subdivided_count",
                            "preprocessing_seconds", "direct_seconds",
                            "query_seconds", "speedup", "linf"], rows)
    note = (f"slope direct {slopes['direct']:.2f}, "
            f"agglomerated {slopes['agglomerated']:.2f}")
    figs = [plots.save_sweep_figure(out_dir / "scaling.png", list(sizes),
                                    {"direct": direct_times,
                                     "agglomerated": engine_times},
                                    "curve count", "query seconds",
                                    "query time vs boundary size",
                                    logx=True, logy=True, annotate=note)]
    return {"rows": rows, "csv": csv_path, "figures": figs, "slopes": slopes}


EXPERIMENTS = {
    "order-sweep": order_sweep,
    "beta-sweep": beta_sweep,
    "subdiv-sweep": subdiv_sweep,
    "overlap": overlap,
    "disagreement": disagreement,
    "scaling": scaling,
}


def run_experiment(name: str, out_dir, **params) -> dict:
    """Dispatch by name; unknown parameter overrides are dropped."""
    try:
        fn = EXPERIMENTS[name]
    except KeyError:
        raise UnknownExperiment(
            f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}"
        ) from None
    accepted = inspect.signature(fn).parameters
    kwargs = {k: v for k, v in params.items() if k in accepted and v is not None}
    return fn(_outdir(out_dir), **kwargs)

"""Diagnostic figures rendered straight to files (headless backend)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _overlay_curves(ax, curves, color="tab:red"):
    ts = np.linspace(0.0, 1.0, 64)
    for c in curves:
        pts = c.evaluate_many(ts)
        ax.plot(pts[:, 0], pts[:, 1], color=color, linewidth=0.8)


def save_field_figure(path, xs, ys, grid_values, curves=None,
                      title="winding number field"):
    """Field heatmap over grid cell centers, optionally with the boundary."""
    fig, ax = plt.subplots(figsize=(6.0, 5.0), dpi=120)
    im = ax.imshow(np.asarray(grid_values), origin="lower", cmap="gray",
                   extent=(xs[0], xs[-1], ys[0], ys[-1]), aspect="equal",
                   interpolation="nearest")
    fig.colorbar(im, ax=ax, label="w")
    if curves:
        _overlay_curves(ax, curves)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def save_sweep_figure(path, x, series, xlabel, ylabel, title,
                      logx=False, logy=False, annotate=""):
    """One line with markers per entry of ``series`` ({label: values})."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    for label, ys in series.items():
        ax.plot(x, ys, marker="o", label=label)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if annotate:
        ax.text(0.02, 0.02, annotate, transform=ax.transAxes, fontsize=9,
                verticalalignment="bottom")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def save_histogram_figure(path, values, bins, xlabel, title, vlines=()):
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
    ax.hist(np.asarray(values, dtype=float), bins=bins, color="tab:blue",
            edgecolor="black", linewidth=0.5)
    for v in vlines:
        ax.axvline(v, color="tab:red", linestyle="--", linewidth=1.0)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    ax.set_title(title)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path

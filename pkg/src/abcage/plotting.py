"""Figure rendering for the CLI report path.

Every plot function writes a PNG next to the delimited data file it
illustrates.  The Agg backend is forced so rendering works headless.
"""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

DPI = 150


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def _swap_axis(ax, tau_swap: float):
    if tau_swap > 0 and np.isfinite(tau_swap):
        top = ax.secondary_xaxis(
            "top", functions=(lambda t: t / tau_swap, lambda s: s * tau_swap))
        top.set_xlabel("time (swap times)")


def plot_evolution(result, path, title: str | None = None) -> None:
    """Observable time series with time in us (bottom) and swaps (top)."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, values in result.columns.items():
        ax.plot(result.times_us, values, label=name, lw=1.4)
    ax.set_xlabel("time (us)")
    ax.set_ylabel("occupation / probability")
    ax.set_xlim(result.times_us[0], result.times_us[-1])
    _swap_axis(ax, result.tau_swap)
    if len(result.columns) <= 12:
        ax.legend(fontsize=8, ncol=2)
    if title:
        ax.set_title(title)
    _finish(fig, path)


def plot_bands(bandset, path, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(5, 4))
    for b in range(bandset.bands.shape[1]):
        ax.plot(bandset.k, bandset.bands[:, b], lw=1.6)
    ax.set_xlabel("k (rad)")
    ax.set_ylabel("energy (rad/us)")
    ax.set_xlim(-math.pi, math.pi)
    ax.set_title(title or f"flux = {bandset.flux:.3f} rad")
    _finish(fig, path)


def plot_spectrum(lines_mhz, path, title: str | None = None) -> None:
    """Stick spectrum of transition lines (MHz from the vacuum)."""
    lines_mhz = np.asarray(lines_mhz, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 3))
    ax.vlines(lines_mhz, 0, 1, lw=1.5)
    ax.set_xlabel("transition energy (MHz)")
    ax.set_yticks([])
    pad = max(1.0, 0.05 * (lines_mhz.max() - lines_mhz.min() + 1))
    ax.set_xlim(lines_mhz.min() - pad, lines_mhz.max() + pad)
    if title:
        ax.set_title(title)
    _finish(fig, path)


def plot_graph(graph, path, title: str | None = None) -> None:
    """Configuration-space connectivity on a circle layout.

    Solid edges are positive couplings, dashed edges negative; node labels
    are the occupation strings.
    """
    n = graph.n_nodes
    angles = 2 * math.pi * np.arange(n) / max(n, 1)
    xs, ys = np.cos(angles), np.sin(angles)
    fig, ax = plt.subplots(figsize=(6, 6))
    for (a, b, w) in graph.edges:
        style = "-" if w > 0 else "--"
        ax.plot([xs[a], xs[b]], [ys[a], ys[b]], style, color="tab:blue",
                lw=1.2, zorder=1)
    ax.scatter(xs, ys, s=420, c="white", edgecolors="black", zorder=2)
    for i, lbl in enumerate(graph.labels):
        ax.annotate(lbl, (xs[i], ys[i]), ha="center", va="center", fontsize=7,
                    zorder=3)
    ax.set_aspect("equal")
    ax.axis("off")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def plot_pipeline(times_us, tau_swap, series: dict, path,
                  title: str | None = None) -> None:
    """Corrected estimates with confidence intervals as error bars.

    series maps a column stem to (corrected, lo, hi) arrays.
    """
    times_us = np.asarray(times_us, dtype=float)
    fig, ax = plt.subplots(figsize=(7, 4))
    for name, (corr, lo, hi) in series.items():
        corr = np.asarray(corr)
        yerr = np.vstack([corr - np.asarray(lo), np.asarray(hi) - corr])
        ax.errorbar(times_us, corr, yerr=np.clip(yerr, 0, None), fmt=".",
                    ms=4, capsize=2, label=name)
    ax.set_xlabel("time (us)")
    ax.set_ylabel("corrected probability")
    ax.set_xlim(times_us[0], times_us[-1])
    _swap_axis(ax, tau_swap)
    ax.legend(fontsize=8, ncol=2)
    if title:
        ax.set_title(title)
    _finish(fig, path)

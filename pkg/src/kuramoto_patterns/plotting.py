"""Matplotlib renderings of the report CSV data (headless, file output only)."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .continuation import BranchPoint
from .search import ClusterFit, PatternCountRow

__all__ = ["render_pattern_scatter", "render_count_curves", "render_branch"]


def render_pattern_scatter(fit: ClusterFit, path: str | Path, title: str | None = None) -> None:
    """Energy vs. basin fraction for every pattern, colored by spectral gap.

    Long-link patterns get square markers; the dashed line is the empirical
    decay exp(-1.5 * energy).
    """
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    rows = fit.rows
    if rows:
        e = np.array([r["energy"] for r in rows])
        f = np.array([max(r["basin_fraction"], 1e-10) for r in rows])
        gap = np.array([r["spectral_gap"] for r in rows])
        long_mask = np.array([r["n_long_links"] > 0 for r in rows])
        for mask, marker, label in (
            (~long_mask, "o", "short links only"),
            (long_mask, "s", "has long link"),
        ):
            if mask.any():
                sc = ax.scatter(
                    e[mask], f[mask], c=gap[mask], marker=marker, s=22,
                    cmap="viridis", vmin=0.0, vmax=max(gap.max(), 1e-6),
                    label=label, edgecolors="none",
                )
        fig.colorbar(sc, ax=ax, label="spectral gap")
        grid = np.linspace(e.min(), e.max(), 200)
        ax.plot(grid, np.exp(-1.5 * grid), "k--", lw=1, label="exp(-1.5 E)")
        ax.legend(loc="best", fontsize=8)
    ax.set_yscale("log")
    ax.set_xlabel("pattern energy")
    ax.set_ylabel("basin fraction")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_count_curves(rows: Sequence[PatternCountRow], path: str | Path) -> None:
    """Fraction of graphs with k patterns, one curve per k, versus size n."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    kmax = max((len(r.counts) - 1 for r in rows), default=0)
    ns = [r.n for r in rows]
    for k in range(kmax + 1):
        ax.plot(ns, [r.fraction(k) for r in rows], marker="o", label=f"k={k}")
    ax.plot(
        ns, [r.fraction_with_patterns for r in rows],
        marker="s", ls="--", color="black", label="k>=1",
    )
    ax.set_xlabel("vertices")
    ax.set_ylabel("fraction of graphs")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_branch(points: Iterable[BranchPoint], path: str | Path,
                  energies: Sequence[float] | None = None) -> None:
    """Continuation diagram: energy and the leading eigenvalue along the branch."""
    pts = list(points)
    p = np.array([b.p for b in pts])
    eig = np.array([b.min_eig for b in pts])
    fold = np.array([b.is_fold for b in pts])
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    if energies is not None:
        ax1.plot(p, energies, "-o", ms=2.5)
        if fold.any():
            ax1.plot(p[fold], np.asarray(energies)[fold], "r*", ms=12, label="fold")
            ax1.legend(fontsize=8)
    ax1.set_xlabel("homotopy parameter p")
    ax1.set_ylabel("energy")
    ax2.plot(p, eig, "-o", ms=2.5)
    ax2.axhline(0.0, color="gray", lw=0.8)
    if fold.any():
        ax2.plot(p[fold], eig[fold], "r*", ms=12)
    ax2.set_xlabel("homotopy parameter p")
    ax2.set_ylabel("leading reduced-Jacobian eigenvalue")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

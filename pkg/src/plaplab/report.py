"""Figure rendering for run outputs.

Every experiment that writes delimited tables can also render a matching
figure next to them; these helpers own the matplotlib plumbing so the CLI
stays free of plotting state.  The Agg backend keeps rendering headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_trajectory_figure",
    "save_bounds_figure",
    "save_attraction_figure",
    "save_gap_figure",
    "save_sweep_figure",
]

plt.rcParams.update({"figure.dpi": 130, "axes.grid": True, "grid.alpha": 0.3})


def save_trajectory_figure(times, monitors: dict, path) -> None:
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax0.plot(times, monitors["l2_norm"], label="L2 norm")
    ax0.plot(times, monitors["E_norm"], label="energy norm")
    ax0.set_ylabel("norm")
    ax0.legend()
    ax1.semilogy(times, np.maximum(monitors["energy"], 1e-300), label="energy")
    res = np.maximum(monitors["inner_residual"], 1e-300)
    ax1.semilogy(times, res, label="inner residual", alpha=0.7)
    ax1.set_xlabel("t")
    ax1.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_bounds_figure(ts, drive, absorb_l2, absorb_energy, path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogy(ts, drive, label="drive level")
    ax.semilogy(ts, absorb_l2, label="absorbing bound, 0.5||u||^2")
    ax.semilogy(ts, absorb_energy, label="absorbing bound, ||u||_E^p")
    ax.set_xlabel("t")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_attraction_figure(depths, dists, tol, path) -> None:
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    ax.semilogy(depths, np.maximum(dists, 1e-300), marker="o", label="semidistance to section")
    ax.axhline(tol, color="k", ls="--", lw=1, label="tolerance")
    ax.set_xlabel("pullback depth")
    ax.set_ylabel("Hausdorff semidistance")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_gap_figure(curves: dict, path) -> None:
    """curves: eps -> (times, gap_sq, envelope)."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for eps, (ts, gap, env) in sorted(curves.items(), reverse=True):
        (line,) = ax.semilogy(ts[1:], np.maximum(gap[1:], 1e-300), label=f"gap^2, eps={eps:g}")
        ax.semilogy(ts[1:], env[1:], ls="--", color=line.get_color(), alpha=0.6)
    ax.set_xlabel("t")
    ax.set_ylabel("squared gap (solid), envelope (dashed)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_sweep_figure(rows, path) -> None:
    eps = [r.eps for r in rows if r.eps > 0]
    dist = [max(r.dist_h_to_base, 1e-300) for r in rows if r.eps > 0]
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    ax.loglog(eps, dist, marker="o", label="semidistance to base section")
    if len(eps) >= 2:
        ref = [dist[0] * (e / eps[0]) for e in eps]
        ax.loglog(eps, ref, ls=":", color="gray", label="linear reference")
    ax.set_xlabel("eps")
    ax.set_ylabel("Hausdorff semidistance")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)

"""Threshold-sweep figures rendered next to the delimited reports."""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .harness import SweepResult


def render_sweep_figure(sweep: SweepResult, path, title: str | None = None) -> None:
    """Kappa and accuracy against the decision threshold, saved to ``path``.

    Infinite endpoint thresholds are left off the curve; the best-by-kappa
    threshold, when defined, gets a marker line.
    """
    points = [(t, rep) for t, rep in sweep.rows if math.isfinite(t)]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if points:
        xs = [t for t, _ in points]
        ax.plot(xs, [rep.accuracy for _, rep in points], marker="o", markersize=3, label="accuracy")
        kappa_pts = [(t, rep.kappa) for t, rep in points if rep.kappa is not None]
        if kappa_pts:
            ax.plot(
                [t for t, _ in kappa_pts],
                [k for _, k in kappa_pts],
                marker="s",
                markersize=3,
                label="kappa",
            )
    if sweep.best_by_kappa is not None and math.isfinite(sweep.best_by_kappa):
        ax.axvline(sweep.best_by_kappa, color="gray", linestyle="--", linewidth=1, label="best kappa")
    ax.set_xlabel("decision threshold")
    ax.set_ylabel("metric value")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

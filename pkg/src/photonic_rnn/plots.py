"""Deterministic SVG figures (no timestamps, fixed element ids)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .compare import Comparison  # noqa: E402
from .dse import DsePoint  # noqa: E402

_RC = {"svg.hashsalt": "photonic-rnn", "svg.fonttype": "none", "font.family": "DejaVu Sans"}


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def dse_scatter(points: Sequence[DsePoint], best: DsePoint | None, path: str | Path) -> None:
    """EPB vs GOPS scatter of the feasible points, best point starred."""
    feasible = [p for p in points if p.feasible]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        ax.scatter([p.mean_gops for p in feasible], [p.mean_epb * 1e12 for p in feasible],
                   s=14, color="tab:blue", alpha=0.7, label="configurations", gid="points")
        if best is not None:
            ax.scatter([best.mean_gops], [best.mean_epb * 1e12], marker="*", s=260,
                       color="deeppink", edgecolor="black", zorder=3,
                       label=f"best {best.config}", gid="best-star")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("throughput (GOPS)")
        ax.set_ylabel("energy per bit (pJ/bit)")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        _save(fig, Path(path))


def comparison_bars(result: Comparison, metric: str, path: str | Path) -> None:
    """Grouped log-scale bars of baseline vs simulated EPB or GOPS per model tag."""
    if metric not in ("epb", "gops"):
        raise ValueError("metric must be 'epb' or 'gops'")
    tags = list(dict.fromkeys(r.model_tag for r in result.rows))
    names = list(dict.fromkeys(r.name for r in result.rows))
    series = names + ["simulated"]
    width = 0.8 / max(1, len(series))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(max(5, 1.6 * len(tags) + 2), 4))
        for k, label in enumerate(series):
            xs, ys = [], []
            for i, tag in enumerate(tags):
                rows = [r for r in result.rows if r.model_tag == tag]
                if label == "simulated":
                    value = (rows[0].sim_epb if metric == "epb" else rows[0].sim_gops) if rows else None
                else:
                    match = [r for r in rows if r.name == label]
                    value = None
                    if match:
                        value = match[0].baseline_epb if metric == "epb" else match[0].baseline_gops
                if value is not None:
                    xs.append(i + (k - (len(series) - 1) / 2) * width)
                    ys.append(value)
            ax.bar(xs, ys, width=width, label=label)
        ax.set_xticks(range(len(tags)))
        ax.set_xticklabels(tags)
        ax.set_yscale("log")
        ax.set_ylabel("energy per bit (pJ/bit)" if metric == "epb" else "throughput (GOPS)")
        ax.legend(fontsize=7, ncol=2)
        fig.tight_layout()
        _save(fig, Path(path))

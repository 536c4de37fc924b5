"""Matplotlib rendering of the batch reports, written next to the CSVs."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .analysis import ANOMALOUS, SegmentResult  # noqa: E402
from .instrumentation import ScalingResult  # noqa: E402


def render_report_figure(
    results: Sequence[SegmentResult],
    path: str | Path,
    epsilon: float,
) -> Path:
    """Whole-run mode: metric bar chart. Segmented mode: metric per segment."""
    path = Path(path)
    whole_run = len(results) == 1 and results[0].index == 0
    fig, ax = plt.subplots(figsize=(7, 4))
    if whole_run:
        entries = results[0].report.entries
        ids = [str(e.antigen) for e in entries]
        metrics = [e.metric for e in entries]
        colors = ["#c0392b" if e.label == ANOMALOUS else "#2980b9" for e in entries]
        ax.bar(ids, metrics, color=colors)
        ax.set_xlabel("antigen type")
        if len(ids) > 25:
            ax.set_xticks(ax.get_xticks()[:: max(1, len(ids) // 25)])
    else:
        by_type: dict[int, tuple[list[int], list[float]]] = {}
        for seg in results:
            for e in seg.report.entries:
                xs, ys = by_type.setdefault(e.antigen, ([], []))
                xs.append(seg.index)
                ys.append(e.metric)
        for antigen, (xs, ys) in sorted(by_type.items()):
            ax.plot(xs, ys, marker="o", label=f"type {antigen}")
        ax.set_xlabel("segment")
        if len(by_type) <= 12:
            ax.legend(fontsize=8)
    ax.axhline(epsilon, color="black", linestyle="--", linewidth=1, label="threshold")
    ax.set_ylabel("anomaly metric K")
    ax.set_title("Per-type anomaly metric" + ("" if whole_run else " by segment"))
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_scaling_figure(result: ScalingResult, path: str | Path) -> Path:
    """Log-log total operations against stream size with the fitted slope."""
    path = Path(path)
    ns = [row.n for row in result.rows]
    totals = [row.total for row in result.rows]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.loglog(ns, totals, "o", color="#2c3e50", label="measured total ops")
    anchor = totals[0]
    fit = [anchor * (n / ns[0]) ** result.slope for n in ns]
    ax.loglog(ns, fit, "-", color="#c0392b", label=f"fit slope {result.slope:.3f}")
    ax.set_xlabel("stream size n")
    ax.set_ylabel("total operations")
    ax.set_title(f"{result.mode} mode scaling")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_estimator_figure(
    labels: Sequence[str],
    lowers: Sequence[int],
    uppers: Sequence[int],
    measured: Sequence[int],
    path: str | Path,
    title: Optional[str] = None,
) -> Path:
    """Predicted ranges (bars) against measured counts (points) per interval."""
    path = Path(path)
    xs = range(len(labels))
    fig, ax = plt.subplots(figsize=(max(6, len(labels) * 0.9), 4))
    for x, lo, hi in zip(xs, lowers, uppers):
        ax.plot([x, x], [lo, hi], color="#2980b9", linewidth=6, alpha=0.5, solid_capstyle="butt")
    ax.plot(list(xs), list(measured), "o", color="#c0392b", label="measured")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("count")
    ax.set_title(title or "predicted range vs measured")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path

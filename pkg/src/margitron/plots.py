"""Rendering of training traces: per-epoch CSV tables and matplotlib
figures saved next to the JSON reports."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .trainer import EpochStats, ProtocolReport

__all__ = ["write_trace_csv", "save_convergence_figure", "save_protocol_figure"]

_TRACE_FIELDS = ("epoch", "updates", "total_updates", "norm", "threshold")


def write_trace_csv(trace: Iterable[EpochStats], path) -> Path:
    """Write the per-epoch trace as comma-separated rows."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_TRACE_FIELDS)
        for row in trace:
            writer.writerow([row.epoch, row.updates, row.total_updates, row.norm, row.threshold])
    return path


def _plot_trace(ax_updates, ax_norm, trace: Sequence[EpochStats], label: str | None = None):
    epochs = [s.epoch for s in trace]
    ax_updates.plot(epochs, [s.updates for s in trace], marker=".", label=label)
    ax_norm.plot(epochs, [s.norm for s in trace], marker=".", label=(f"{label} norm" if label else "norm"))
    ax_norm.plot(
        epochs,
        [s.threshold for s in trace],
        linestyle="--",
        label=(f"{label} threshold" if label else "threshold"),
    )


def save_convergence_figure(trace: Sequence[EpochStats], title: str, path) -> Path:
    """Two-panel convergence picture: updates per full epoch, and the
    weight-vector norm against the misclassification threshold."""
    path = Path(path)
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    _plot_trace(ax0, ax1, trace)
    ax0.set_ylabel("updates in epoch")
    if any(s.updates > 0 for s in trace):
        ax0.set_yscale("symlog")
    ax1.set_xlabel("full epoch")
    ax1.set_ylabel("norm / threshold")
    ax1.set_yscale("log")
    ax1.legend(loc="best", fontsize=8)
    ax0.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_protocol_figure(report: ProtocolReport, path) -> Path:
    """Stage-wise convergence picture for a two-stage protocol run."""
    path = Path(path)
    fig, axes = plt.subplots(2, 2, figsize=(10, 6), sharex="col")
    for col, stage in enumerate((report.stage1, report.stage2)):
        ax0, ax1 = axes[0][col], axes[1][col]
        _plot_trace(ax0, ax1, stage.train.trace)
        ax0.set_title(f"stage {col + 1} (epsilon={stage.epsilon:g}, b={stage.b:g})")
        ax0.set_ylabel("updates in epoch")
        if any(s.updates > 0 for s in stage.train.trace):
            ax0.set_yscale("symlog")
        ax1.set_xlabel("full epoch")
        ax1.set_ylabel("norm / threshold")
        ax1.set_yscale("log")
        ax1.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

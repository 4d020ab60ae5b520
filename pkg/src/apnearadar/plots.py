"""Static SVG plots: line charts for series, a heatmap for the sweep grid.

Outputs are self-contained (no external assets) and byte-identical across
runs: the SVG id hash salt is pinned and the creation-date metadata is
stripped.
"""

from __future__ import annotations

import io as _io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .detector import DetectionResult
from .io import _atomic_write_bytes
from .series import ScalarSeries
from .synth import SweepGrid

_HASH_SALT = "apnearadar"


def _save_svg(fig, path) -> None:
    plt.rcParams["svg.hashsalt"] = _HASH_SALT
    buffer = _io.BytesIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    _atomic_write_bytes(path, buffer.getvalue())


def plot_series(
    tracks: list[tuple[str, ScalarSeries]],
    path,
    title: str = "",
    ylabel: str = "",
) -> None:
    """Line chart of one or more labelled series on a shared time axis."""
    if not tracks:
        raise ValueError("nothing to plot")
    fig, ax = plt.subplots(figsize=(8.0, 3.0))
    for label, series in tracks:
        ax.plot(series.times(), series.values, linewidth=1.0, label=label)
    ax.set_xlabel("time (s)")
    if ylabel:
        ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(tracks) > 1:
        ax.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    _save_svg(fig, path)


def plot_detection(
    envelope: ScalarSeries,
    result: DetectionResult,
    path,
    label_threshold: float | None = None,
) -> None:
    """Two panels: the amplitude envelope, and the averaged labels with the
    final binary decision overlaid."""
    fig, (ax_env, ax_lab) = plt.subplots(
        2, 1, figsize=(8.0, 4.5), sharex=True, height_ratios=[1.0, 1.0]
    )
    ax_env.plot(envelope.times(), envelope.values, linewidth=1.0, color="tab:blue")
    ax_env.set_ylabel("envelope (mm)")
    ax_lab.plot(
        result.averaged.times(),
        result.averaged.values,
        linewidth=1.0,
        color="tab:orange",
        label="averaged labels",
    )
    ax_lab.step(
        result.labels.times(),
        result.labels.values,
        linewidth=1.0,
        color="tab:red",
        where="post",
        label="detected",
    )
    if label_threshold is not None:
        ax_lab.axhline(label_threshold, linewidth=0.8, color="gray", linestyle="--")
    ax_lab.set_ylim(-0.05, 1.05)
    ax_lab.set_xlabel("time (s)")
    ax_lab.set_ylabel("label")
    ax_lab.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    _save_svg(fig, path)


def plot_sweep(grid: SweepGrid, path) -> None:
    """Heatmap of the mean per-interval loss over the movement grid."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    image = ax.imshow(
        grid.bce,
        origin="lower",
        aspect="auto",
        interpolation="nearest",
        cmap="viridis",
    )
    ax.set_xticks(range(len(grid.movement_durations)))
    ax.set_xticklabels([f"{d:g}" for d in grid.movement_durations])
    ax.set_yticks(range(len(grid.movement_amplitudes)))
    ax.set_yticklabels([f"{a:g}" for a in grid.movement_amplitudes])
    ax.set_xlabel("movement duration (s)")
    ax.set_ylabel("movement amplitude (mm)")
    fig.colorbar(image, ax=ax, label="binary cross-entropy")
    fig.tight_layout()
    _save_svg(fig, path)

"""Autocorrelation heat maps with learned period vectors overlaid."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402

from evalkit.autocorr import AutocorrMap  # noqa: E402
from shared.exceptions import ArtifactIOError  # noqa: E402


def render_autocorr_heatmap(
    acmap: AutocorrMap,
    period_vectors: Sequence[Optional[tuple[float, float]]],
    path: str | Path,
    *,
    peaks: Sequence[tuple[int, int]] = (),
    title: Optional[str] = None,
) -> Path:
    """
    Save the map as a PNG, lags on the axes, period vectors as red arrows from the origin.

    Vectors are ``(dy, dx)`` in pixels; None entries are skipped. Detected
    peaks are marked with white circles.
    """
    path = Path(path)
    lag = acmap.max_lag
    figure = Figure(figsize=(6, 6))
    axes = figure.add_subplot(1, 1, 1)
    shown = axes.imshow(
        acmap.values,
        cmap="viridis",
        vmin=-1.0,
        vmax=1.0,
        origin="upper",
        extent=(-lag - 0.5, lag + 0.5, lag + 0.5, -lag - 0.5),
    )
    figure.colorbar(shown, ax=axes, fraction=0.046, pad=0.04)
    for vector in period_vectors:
        if vector is None:
            continue
        dy, dx = vector
        axes.annotate(
            "",
            xy=(dx, dy),
            xytext=(0.0, 0.0),
            arrowprops={"arrowstyle": "->", "color": "red", "lw": 2},
        )
    if peaks:
        axes.scatter(
            [dx for _, dx in peaks],
            [dy for dy, _ in peaks],
            s=30,
            facecolors="none",
            edgecolors="white",
        )
    axes.set_xlim(-lag - 0.5, lag + 0.5)
    axes.set_ylim(lag + 0.5, -lag - 0.5)
    axes.set_xlabel("lag dx (pixels)")
    axes.set_ylabel("lag dy (pixels)")
    if title:
        axes.set_title(title)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        figure.savefig(path, dpi=100)
    except OSError as exc:
        raise ArtifactIOError(f"cannot write heat map {path}: {exc}") from exc
    return path

"""Deterministic matplotlib rendering of report figures.

Figures are written as SVG with a fixed hash salt and no embedded date,
so repeated runs of the same configuration produce byte-identical
files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .errors import OutputError  # noqa: E402

_RC = {
    "svg.hashsalt": "spinwave",
    "svg.fonttype": "path",
    "figure.figsize": (7.0, 4.4),
    "figure.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linestyle": ":",
    "lines.linewidth": 1.2,
}


def line_plot(
    path: str,
    x,
    series: list[tuple[str, object]],
    xlabel: str,
    ylabel: str,
    title: str,
    marker: str | None = None,
    logx: bool = False,
):
    """One axes, one or more labeled series, saved as deterministic SVG."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for label, y in series:
            ax.plot(x, y, marker=marker, markersize=2.5, label=label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        if logx:
            ax.set_xscale("log")
        if len(series) > 1:
            ax.legend(frameon=False, fontsize=9)
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise OutputError(f"cannot write {path}: {exc}") from exc
        finally:
            plt.close(fig)

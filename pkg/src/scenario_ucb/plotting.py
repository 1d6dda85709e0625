"""Static figures of regret curves (matplotlib, file output only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "axes.linewidth": 0.8,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "figure.figsize": (4.5, 3.0),
    "savefig.dpi": 150,
    # fixed metadata keeps repeated renders byte-stable
    "svg.hashsalt": "scenario-ucb",
}


def plot_regret(path, series: dict, *, bands: dict | None = None, title: str | None = None,
                ylabel: str = "regret under re-draw", logx: bool = True) -> Path:
    """Line plot with one curve per entry of ``series`` (``label -> (t, values)``).

    ``bands`` optionally maps the same labels to ``(lower, upper)`` arrays
    drawn as shaded regions.
    """
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, (t, y) in series.items():
            (line,) = ax.plot(t, y, label=label)
            if bands and label in bands:
                lo, hi = bands[label]
                ax.fill_between(t, lo, hi, color=line.get_color(), alpha=0.2, linewidth=0)
        ax.axhline(0.0, color="0.6", linewidth=0.6, zorder=0)
        if logx:
            ax.set_xscale("log")
        ax.set_xlabel("iteration $T$")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else None)
        plt.close(fig)
    return path

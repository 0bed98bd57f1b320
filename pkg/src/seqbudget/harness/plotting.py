"""Static SVG chart of mean cumulative regret with a +/- one std band."""
from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed salt and no date so repeated renders are byte-identical
matplotlib.rcParams["svg.hashsalt"] = "seqbudget"


def render_svg(summary=None, bounds=(), title: str = "") -> bytes:
    """Render to SVG bytes. ``summary=None`` (no traces) still gives labelled axes."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        if summary is not None and len(summary.t):
            t = summary.t
            ax.plot(t, summary.regret_mean, color="C0", label="mean regret")
            ax.fill_between(t, summary.regret_mean - summary.regret_std,
                            summary.regret_mean + summary.regret_std,
                            color="C0", alpha=0.25, linewidth=0, label="+/- 1 std")
        for i, curve in enumerate(bounds):
            ax.plot(curve.t, curve.value, linestyle="--", color=f"C{i + 1}", label=curve.label)
        ax.set_xlabel("t")
        ax.set_ylabel("cumulative regret")
        if title:
            ax.set_title(title)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(loc="upper left", fontsize="small")
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        return buf.getvalue()
    finally:
        plt.close(fig)

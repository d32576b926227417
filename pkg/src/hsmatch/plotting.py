"""Payload/MSE line charts for sweep results."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "optimized": dict(color="#1f5fa8", marker="o", linestyle="-"),
    "traditional": dict(color="#b8452c", marker="s", linestyle="--"),
}


def plot_sweep(result, path) -> None:
    """One panel per image, payload on x, MSE on y, one line per method."""
    images = list(dict.fromkeys(r.image for r in result.rows))
    n = max(len(images), 1)
    fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 3.4), squeeze=False)
    for ax, name in zip(axes[0], images):
        methods = list(dict.fromkeys(r.method for r in result.rows if r.image == name))
        for method in methods:
            pts = sorted((r.bpp, r.mse) for r in result.rows
                         if r.image == name and r.method == method and r.ok)
            if not pts:
                continue
            x, y = zip(*pts)
            ax.plot(x, y, label=method, linewidth=1.4, markersize=4, **STYLE.get(method, {}))
        ax.set_title(name, fontsize=10)
        ax.set_xlabel("payload (bpp)")
        ax.set_ylabel("MSE")
        ax.grid(True, linewidth=0.4, alpha=0.5)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    # fixed salt and no date keep the SVG byte-stable between runs
    with matplotlib.rc_context({"svg.hashsalt": "hsmatch"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)

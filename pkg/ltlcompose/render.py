"""Figure output: an executed trace drawn over its map."""

import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402

from ltlcompose.gridworld import GridMap  # noqa: E402
from ltlcompose.mvpolicy import Trace  # noqa: E402

logger = logging.getLogger(__name__)


def _label_codes(grid: GridMap):
    # 0 free, 1 obstacle, 2.. one code per distinct label set
    labels = sorted({grid.label(c) for c in grid.free_cells() if grid.label(c)}, key=sorted)
    code = {label: i + 2 for i, label in enumerate(labels)}
    rows = []
    for y in range(grid.height):
        row = []
        for x in range(grid.width):
            if (x, y) in grid.obstacles:
                row.append(1)
            else:
                row.append(code.get(grid.label((x, y)), 0))
        rows.append(row)
    return rows, len(labels)


def render_trace(grid: GridMap, trace: Trace, path: str) -> str:
    """Write a PNG or SVG (chosen by suffix) of the map with the trace path."""
    rows, n_labels = _label_codes(grid)
    palette = ["white", "black"] + [plt.get_cmap("tab20")(i % 20) for i in range(n_labels)]

    fig, ax = plt.subplots(figsize=(max(3, grid.width * 0.6), max(3, grid.height * 0.6)))
    ax.imshow(rows, cmap=ListedColormap(palette), vmin=0, vmax=len(palette) - 1)
    for x, y in grid.free_cells():
        label = grid.label((x, y))
        if label:
            ax.text(x, y, "\n".join(sorted(label)), ha="center", va="center", fontsize=6)

    xs = [c[0] for c in trace.cells]
    ys = [c[1] for c in trace.cells]
    ax.plot(xs, ys, color="gold", linewidth=2, marker="o", markersize=3)
    ax.plot(xs[0], ys[0], color="red", marker="s", markersize=8)
    for e in trace.unsafe:
        ax.plot(e.cell[0], e.cell[1], color="red", marker="x", markersize=8)

    ax.set_xticks(range(grid.width))
    ax.set_yticks(range(grid.height))
    ax.set_title(" > ".join(s.policy for s in trace.segments) or "(no policies)", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    logger.info("rendered trace to %s", path)
    return path

"""Figure builders and renderers.

Rendering is a pure function of the CSV bytes and the spec: fixed style
sheet, fixed DPI, no timestamps, so output images are byte-diffable.
The ``build_*`` functions return matplotlib figures for inspection; the
``plot_*`` wrappers save them to ``spec.out``.
"""

from importlib import resources

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .objectives import contour_function, known_minimizers
from .spec import read_dataset, read_grid, read_summary, read_traces

__all__ = ["plot_traces", "plot_convergence", "plot_heatmap", "render",
           "build_traces", "build_convergence", "build_heatmap",
           "DATA_BOX"]

# region the ellipse dataset lives in; outlined when the grid extends past it
DATA_BOX = ((-1.0, 1.0), (-2.0, 2.0))

_STYLE = resources.files("plotviz") / "style" / "plotviz.mplstyle"


def _style():
    return plt.style.context(str(_STYLE))


def _label(spec, i):
    if spec.labels:
        return spec.labels[i]
    return str(spec.inputs[i])


def build_traces(spec):
    """Agent trajectories over the objective's contour lines; initial
    positions marked '+', known minimizers marked '*'."""
    objective = spec.objective or "camel6"
    fn = contour_function(objective)
    mins = known_minimizers(objective)
    with _style():
        return _traces_figure(spec, fn, mins)


def _traces_figure(spec, fn, mins):
    fig, axes = plt.subplots(
        1, len(spec.inputs), squeeze=False,
        figsize=(5.0 * len(spec.inputs), 4.5))
    for i, path in enumerate(spec.inputs):
        ax = axes[0, i]
        runs, agents, iters, xy = read_traces(path)
        xr = spec.x_range or (xy[:, 0].min() - 0.2, xy[:, 0].max() + 0.2)
        yr = spec.y_range or (xy[:, 1].min() - 0.2, xy[:, 1].max() + 0.2)
        gx, gy = np.meshgrid(np.linspace(*xr, 201), np.linspace(*yr, 201))
        ax.contour(gx, gy, fn(gx, gy), levels=25, linewidths=0.5,
                   cmap="viridis")
        first = iters.min()
        for run in np.unique(runs):
            for agent in np.unique(agents[runs == run]):
                sel = (runs == run) & (agents == agent)
                order = np.argsort(iters[sel])
                traj = xy[sel][order]
                ax.plot(traj[:, 0], traj[:, 1], color="0.2", lw=0.7,
                        alpha=0.8)
                start = xy[sel & (iters == first)]
                if len(start):
                    ax.plot(start[:, 0], start[:, 1], marker="+",
                            linestyle="none", color="crimson", markersize=7)
        ax.plot(mins[:, 0], mins[:, 1], marker="*", linestyle="none",
                color="gold", markeredgecolor="black", markersize=12)
        ax.set_xlim(*xr)
        ax.set_ylim(*yr)
        ax.set_title(_label(spec, i))
        ax.set_xlabel("$x_0$")
        ax.set_ylabel("$x_1$")
    fig.tight_layout()
    return fig


def build_convergence(spec):
    """Overlaid log-scale curves, one color per input: solid = median of
    the best agent, dotted = median of the worst."""
    with _style():
        return _convergence_figure(spec)


def _convergence_figure(spec):
    fig, ax = plt.subplots()
    for i, path in enumerate(spec.inputs):
        iters, best, worst = read_summary(path)
        color = f"C{i % 10}"
        ax.plot(iters, best, color=color, linestyle="-", label=_label(spec, i))
        ax.plot(iters, worst, color=color, linestyle=":")
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("distance to nearest minimizer")
    ax.legend()
    if spec.x_range:
        ax.set_xlim(*spec.x_range)
    if spec.y_range:
        ax.set_ylim(*spec.y_range)
    fig.tight_layout()
    return fig


def build_heatmap(spec):
    """Probability heatmap of the first input grid, with an optional
    dataset scatter overlay and the data box outlined when the grid
    extends beyond it."""
    with _style():
        return _heatmap_figure(spec)


def _heatmap_figure(spec):
    xs, ys, probs = read_grid(spec.inputs[0])
    fig, ax = plt.subplots()
    mesh = ax.pcolormesh(xs, ys, probs, vmin=0.0, vmax=1.0,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label="class-1 probability")
    (bx0, bx1), (by0, by1) = DATA_BOX
    if xs.min() < bx0 or xs.max() > bx1 or ys.min() < by0 or ys.max() > by1:
        ax.add_patch(plt.Rectangle((bx0, by0), bx1 - bx0, by1 - by0,
                                   fill=False, edgecolor="black",
                                   linestyle="--", linewidth=1.0))
    if spec.dataset:
        pts, labels, _ = read_dataset(spec.dataset)
        for label, color in ((0, "navy"), (1, "darkred")):
            sel = labels == label
            ax.plot(pts[sel, 0], pts[sel, 1], linestyle="none", marker=".",
                    markersize=2.5, color=color)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if spec.labels:
        ax.set_title(spec.labels[0])
    fig.tight_layout()
    return fig


_BUILDERS = {
    "traces": build_traces,
    "convergence": build_convergence,
    "heatmap": build_heatmap,
}


def _save(fig, out):
    # pinned metadata: no timestamps or library version strings in the bytes
    fig.savefig(out, format="png", metadata={"Software": "plotviz"})
    plt.close(fig)


def render(spec):
    """Build and save the figure for ``spec``; returns the output path."""
    _save(_BUILDERS[spec.kind](spec), spec.out)
    return spec.out


def plot_traces(spec):
    _save(build_traces(spec), spec.out)
    return spec.out


def plot_convergence(spec):
    _save(build_convergence(spec), spec.out)
    return spec.out


def plot_heatmap(spec):
    _save(build_heatmap(spec), spec.out)
    return spec.out

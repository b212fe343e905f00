"""Figure rendering for the optimizer harness's CSV artifacts."""

from .spec import FigureSpec, CsvFormatError
from .render import plot_traces, plot_convergence, plot_heatmap, render

__all__ = [
    "FigureSpec",
    "CsvFormatError",
    "plot_traces",
    "plot_convergence",
    "plot_heatmap",
    "render",
]

__version__ = "0.1.0"

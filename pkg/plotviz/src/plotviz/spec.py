"""Figure specification and CSV loading.

plotviz consumes only the documented CSV layouts of the harness:

* traces.csv     -> run,agent,iter,x0,...,x{d-1}
* summary.csv    -> iter,median_best,median_worst
* grid.csv       -> x,y,prob
* dataset.csv    -> x,y,label,split

Column mismatches are reported with the offending file and line number.
"""

import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "FigureSpec",
    "CsvFormatError",
    "read_traces",
    "read_summary",
    "read_grid",
    "read_dataset",
]

KINDS = ("traces", "convergence", "heatmap")


class CsvFormatError(ValueError):
    """Input CSV does not match the documented layout."""


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    out: str
    labels: list = field(default_factory=list)
    objective: Optional[str] = None   # contour background for traces
    x_range: Optional[tuple] = None
    y_range: Optional[tuple] = None
    dataset: Optional[str] = None     # scatter overlay for heatmaps

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; one of {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        for path in list(self.inputs) + ([self.dataset] if self.dataset else []):
            if not os.path.isfile(path):
                raise CsvFormatError(f"input CSV not found: {path}")
        if self.labels and len(self.labels) != len(self.inputs):
            raise ValueError("labels must match inputs one to one")


def _rows(path, expected_header, ncols):
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n")
        if header != expected_header:
            raise CsvFormatError(
                f"{path}:1: expected header {expected_header!r}, got {header!r}")
        out = []
        for lineno, line in enumerate(f, 2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != ncols:
                raise CsvFormatError(
                    f"{path}:{lineno}: expected {ncols} columns, got {len(parts)}")
            out.append(parts)
    if not out:
        raise CsvFormatError(f"{path}: no data rows")
    return out


def read_traces(path):
    """Load a 2D traces file; returns (runs, agents, iters, xy) arrays."""
    rows = _rows(path, "run,agent,iter,x0,x1", 5)
    try:
        arr = np.array([[float(v) for v in r] for r in rows])
    except ValueError as e:
        raise CsvFormatError(f"{path}: non-numeric value ({e})") from None
    return (arr[:, 0].astype(int), arr[:, 1].astype(int),
            arr[:, 2].astype(int), arr[:, 3:5])


def read_summary(path):
    """Load a summary file; returns (iters, median_best, median_worst)."""
    rows = _rows(path, "iter,median_best,median_worst", 3)
    try:
        arr = np.array([[float(v) for v in r] for r in rows])
    except ValueError as e:
        raise CsvFormatError(f"{path}: non-numeric value ({e})") from None
    return arr[:, 0], arr[:, 1], arr[:, 2]


def read_grid(path):
    """Load a probability grid; returns (xs, ys, probs[ny, nx])."""
    rows = _rows(path, "x,y,prob", 3)
    try:
        arr = np.array([[float(v) for v in r] for r in rows])
    except ValueError as e:
        raise CsvFormatError(f"{path}: non-numeric value ({e})") from None
    xs = np.unique(arr[:, 0])
    ys = np.unique(arr[:, 1])
    if len(xs) * len(ys) != len(arr):
        raise CsvFormatError(f"{path}: rows do not form a complete lattice")
    probs = np.full((len(ys), len(xs)), np.nan)
    xi = np.searchsorted(xs, arr[:, 0])
    yi = np.searchsorted(ys, arr[:, 1])
    probs[yi, xi] = arr[:, 2]
    if np.isnan(probs).any():
        raise CsvFormatError(f"{path}: duplicate or missing lattice points")
    return xs, ys, probs


def read_dataset(path):
    """Load a dataset overlay; returns (points, labels, is_train)."""
    rows = _rows(path, "x,y,label,split", 4)
    try:
        pts = np.array([[float(r[0]), float(r[1])] for r in rows])
        labels = np.array([int(r[2]) for r in rows])
    except ValueError as e:
        raise CsvFormatError(f"{path}: non-numeric value ({e})") from None
    for i, r in enumerate(rows, 2):
        if r[3] not in ("train", "test"):
            raise CsvFormatError(f"{path}:{i}: bad split value {r[3]!r}")
    is_train = np.array([r[3] == "train" for r in rows])
    return pts, labels, is_train

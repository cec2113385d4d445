"""Figure rendering over simulation CSV logs.

Read-only over the documented CSV schema (header row, `t`, center columns,
then per-vehicle columns suffixed `_<i>`); no simulation logic lives here.
Output is deterministic for a given CSV and spec: fixed styling, no
timestamps embedded.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

KINDS = ("trajectory", "pos-error", "vel-error", "inputs")
AXES = ("x", "y", "z")


class PlotError(Exception):
    pass


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    kind: str
    output: str
    axis: str = "x"            # pos-error / vel-error component
    vehicles: tuple = ()       # 1-based subset; empty means all

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if self.axis not in AXES:
            raise PlotError(f"axis must be one of {AXES}")


class Log:
    """Column-addressable view of one CSV log."""

    def __init__(self, columns, data):
        if data.size == 0 or data.shape[0] == 0:
            raise PlotError("log is empty")
        self.columns = list(columns)
        self.data = data
        self._index = {c: k for k, c in enumerate(self.columns)}

    @classmethod
    def read(cls, path):
        try:
            with open(path) as fh:
                header = fh.readline().strip()
        except OSError as err:
            raise PlotError(f"cannot read {path}: {err}") from err
        if not header:
            raise PlotError("log is empty")
        columns = header.split(",")
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", UserWarning)
                data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        except ValueError as err:
            raise PlotError(f"malformed CSV: {err}") from err
        if data.size == 0:
            raise PlotError("log is empty")
        if data.shape[1] != len(columns):
            raise PlotError("row width does not match header")
        return cls(columns, data)

    def col(self, name):
        if name not in self._index:
            raise PlotError(f"missing column {name!r}")
        return self.data[:, self._index[name]]

    @property
    def n(self):
        n = 0
        while f"x_{n + 1}" in self._index:
            n += 1
        if n == 0:
            raise PlotError("no vehicle columns found")
        return n


def _vehicle_list(log, spec):
    all_ids = list(range(1, log.n + 1))
    if not spec.vehicles:
        return all_ids
    bad = [i for i in spec.vehicles if i not in all_ids]
    if bad:
        raise PlotError(f"no such vehicles {bad}; log has 1..{log.n}")
    return list(spec.vehicles)


def curves(spec: PlotSpec):
    """Panelized curve data behind each figure kind.

    Returns a list of panels; each panel is (title, xlabel, ylabel,
    [(label, x, y), ...]).  Rendering is a thin layer over this, so tests
    and other consumers can inspect exactly what gets drawn.
    """
    log = Log.read(spec.input_csv)
    ids = _vehicle_list(log, spec)
    t = log.col("t")
    ax = spec.axis

    if spec.kind == "trajectory":
        panel = [
            (f"vehicle {i}", log.col(f"y_{i}"), log.col(f"x_{i}")) for i in ids
        ]
        return [("plan view", "east (m)", "north (m)", panel)]

    if spec.kind in ("pos-error", "vel-error"):
        if spec.kind == "pos-error":
            name, unit = "position error", "m"
            err = {i: log.col(f"{ax}_{i}") - log.col(f"r_{ax}_{i}") for i in ids}
        else:
            name, unit = "velocity error", "m/s"
            err = {
                i: log.col(f"ev_{ax}_{i}") + log.col(f"ehatv_{ax}_{i}")
                for i in ids
            }
        panel = [(f"vehicle {i}", t, err[i]) for i in ids]
        return [(f"{ax}-axis {name}", "time (s)", f"e_{ax} ({unit})", panel)]

    panels = []
    for col, title, unit in (
        ("thrust", "thrust", "N"),
        ("bank", "bank angle", "rad"),
        ("alpha", "angle of attack", "rad"),
    ):
        panel = [(f"vehicle {i}", t, log.col(f"{col}_{i}")) for i in ids]
        panels.append((title, "time (s)", f"{title} ({unit})", panel))
    return panels


def render(spec: PlotSpec) -> str:
    """Write the figure for `spec`; returns the output path."""
    panels = curves(spec)
    fig, axes = plt.subplots(
        len(panels), 1, figsize=(8.0, 3.2 * len(panels)), squeeze=False
    )
    for axis_obj, (title, xlabel, ylabel, lines) in zip(axes[:, 0], panels):
        for label, x, y in lines:
            axis_obj.plot(x, y, linewidth=1.0, label=label)
        axis_obj.set_title(title)
        axis_obj.set_xlabel(xlabel)
        axis_obj.set_ylabel(ylabel)
        axis_obj.grid(True, alpha=0.3)
        axis_obj.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(spec.output, dpi=110, metadata={})
    plt.close(fig)
    return spec.output

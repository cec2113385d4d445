"""Figure rendering for formation flight simulation CSV logs."""

from .render import KINDS, PlotError, PlotSpec, curves, render

__version__ = "0.1.0"

__all__ = ["KINDS", "PlotError", "PlotSpec", "curves", "render", "__version__"]

"""Figure renderer for wptuav experiment CSVs.

A pure view layer: it reads the simulator's documented CSV outputs and draws
them. It never recomputes physics and never imports the simulator.
"""

from .figures import KINDS, PlotSpec, build_figure, render
from .io import PlotInputError

__all__ = ["KINDS", "PlotSpec", "PlotInputError", "build_figure", "render"]

"""Figure rendering for kicked-top CSV output: GE-vs-time regime comparison
with an ensemble inset, and the GE / z-extent stacked panels."""

__version__ = "0.1.0"

from .render import FigureSpecError, load_spec, render_fig1, render_fig2

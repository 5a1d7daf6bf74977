"""Bar-chart rendering for benchmark CSV results."""

from .render import (
    BAR_ORDER,
    Bar,
    Panel,
    PlotInputError,
    PlotSpec,
    RenderResult,
    read_rows,
    render,
)

__version__ = "0.1.0"

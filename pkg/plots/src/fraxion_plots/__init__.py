"""Batch figure scripts over fraxion CSV/JSON artifacts."""

from .figspec import FIGURE_KINDS, EmptyInputError, FigureSpec, SchemaError
from .render import fit_slope, render

__version__ = "0.1.0"

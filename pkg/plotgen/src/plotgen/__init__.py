"""Figure rendering for sweep outputs (CSV in, SVG/PNG out)."""

from .recipes import CSV_COLUMNS, FigureRecipe, Panel, RecipeError, read_rows
from .render import MissingSeriesError, render, sample_point

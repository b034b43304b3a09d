"""Render figure recipes to static SVG/PNG files."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .recipes import FigureRecipe, RecipeError, read_rows, select_series


class MissingSeriesError(RecipeError):
    """A panel matched no rows; the figure is still written with a visible
    annotation, but rendering reports failure."""


def render(recipe: FigureRecipe, out_dir: str, recipe_dir: str = ".",
           fmt: str = "svg") -> tuple[str, bool]:
    """Render one figure; returns (output path, all panels complete)."""
    csv_path = os.path.join(recipe_dir, recipe.csv)
    rows = read_rows(csv_path)
    n = len(recipe.panels)
    fig, axes = plt.subplots(1, n, figsize=(5.2 * n, 4.0), squeeze=False)
    complete = True
    for ax, panel in zip(axes[0], recipe.panels):
        series = select_series(rows, panel)
        if not series:
            ax.text(0.5, 0.5, "missing series", ha="center", va="center",
                    transform=ax.transAxes, color="red", fontsize=14)
            complete = False
        for key in sorted(series):
            pts = series[key]
            ax.plot([x for x, _ in pts], [y for _, y in pts],
                    marker="o", markersize=3, label=", ".join(key))
        ax.set_title(panel.title or recipe.figure_id)
        ax.set_xlabel(panel.xlabel or panel.x)
        ax.set_ylabel(panel.ylabel or panel.y)
        if panel.logy:
            ax.set_yscale("log")
        if series:
            ax.legend(fontsize=7)
    os.makedirs(out_dir, exist_ok=True)
    out_path = os.path.join(out_dir, f"{recipe.figure_id}.{fmt}")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path, complete


def sample_point(recipe: FigureRecipe, recipe_dir: str = ".") -> tuple:
    """First plotted point of the first panel, straight from the CSV; used to
    verify that rendering never transforms values."""
    rows = read_rows(os.path.join(recipe_dir, recipe.csv))
    for panel in recipe.panels:
        series = select_series(rows, panel)
        for key in sorted(series):
            x, y = series[key][0]
            return panel, key, x, y
    raise MissingSeriesError("no plotted points at all")

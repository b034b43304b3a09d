"""CLI: `plotgen <recipe.yaml> --out <dir> [--png]`."""

from __future__ import annotations

import argparse
import os
import sys

from .recipes import FigureRecipe, RecipeError
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotgen",
        description="Render sweep CSV outputs into static figure files.")
    parser.add_argument("recipe", nargs="+", help="recipe YAML file(s)")
    parser.add_argument("--out", default="figures/out", help="output directory")
    parser.add_argument("--png", action="store_true",
                        help="emit PNG instead of SVG")
    args = parser.parse_args(argv)
    fmt = "png" if args.png else "svg"
    all_ok = True
    for path in args.recipe:
        try:
            recipe = FigureRecipe.from_yaml(path)
            out_path, complete = render(recipe, args.out,
                                        recipe_dir=os.path.dirname(path) or ".",
                                        fmt=fmt)
        except RecipeError as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        status = "ok" if complete else "MISSING SERIES"
        print(f"{recipe.figure_id}: wrote {out_path} [{status}]")
        all_ok = all_ok and complete
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())

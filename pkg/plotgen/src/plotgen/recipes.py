"""Figure recipes: declarative descriptions of how sweep CSV rows become
panels.  Rendering never recomputes physics; every plotted point is read
verbatim from the CSV."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import yaml


class RecipeError(Exception):
    """Malformed recipe or CSV that does not match the harness schema."""


CSV_COLUMNS = ["experiment", "protocol", "alpha", "eta", "p", "metric", "value",
               "success_prob", "status", "runtime_ms"]

_FLOAT_COLUMNS = ("alpha", "eta", "p", "value", "success_prob")


@dataclass
class Panel:
    """One axes: rows filtered by `where`, one line per value of `series`."""

    x: str                      # 'alpha', 'eta', or 'loss' (1 - eta)
    y: str = "value"
    where: dict = field(default_factory=dict)
    series: list[str] = field(default_factory=lambda: ["protocol", "p"])
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logy: bool = False
    negate: bool = False        # plot -y (for log plots of negative depths)


@dataclass
class FigureRecipe:
    figure_id: str
    csv: str                    # input path, relative to the recipe file
    panels: list[Panel]

    @staticmethod
    def from_yaml(path: str) -> "FigureRecipe":
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
        if not isinstance(data, dict):
            raise RecipeError(f"recipe {path} is not a mapping")
        try:
            panels = [Panel(**p) for p in data["panels"]]
            return FigureRecipe(data["figure_id"], data["csv"], panels)
        except (KeyError, TypeError) as err:
            raise RecipeError(f"bad recipe {path}: {err}") from None


def read_rows(csv_path: str) -> list[dict]:
    """Harness CSV rows with numeric columns parsed; schema is validated."""
    with open(csv_path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    if not lines:
        raise RecipeError(f"{csv_path} is empty")
    reader = csv.DictReader(lines)
    if reader.fieldnames != CSV_COLUMNS:
        raise RecipeError(f"{csv_path} does not match the sweep schema: "
                          f"{reader.fieldnames}")
    rows = []
    for row in reader:
        for key in _FLOAT_COLUMNS:
            row[key] = float(row[key]) if row[key] else None
        rows.append(row)
    if not rows:
        raise RecipeError(f"{csv_path} has a header but no rows")
    return rows


def x_value(row: dict, x: str) -> float:
    if x == "loss":
        return 1.0 - row["eta"]
    if x not in _FLOAT_COLUMNS:
        raise RecipeError(f"unknown x column {x!r}")
    return row[x]


def select_series(rows: list[dict], panel: Panel) -> dict[tuple, list[tuple]]:
    """Group matching ok-rows into {series key: sorted [(x, y)]}."""
    for key in panel.where:
        if key not in CSV_COLUMNS:
            raise RecipeError(f"unknown filter column {key!r}")
    out: dict[tuple, list[tuple]] = {}
    for row in rows:
        if row["status"] != "ok":
            continue
        if any(str(row[k]) != str(v) if k in ("protocol", "metric", "experiment")
               else abs(row[k] - float(v)) > 1e-12
               for k, v in panel.where.items()):
            continue
        key = tuple(f"{k}={row[k]}" for k in panel.series)
        y = row[panel.y]
        out.setdefault(key, []).append((x_value(row, panel.x),
                                        -y if panel.negate else y))
    for pts in out.values():
        pts.sort()
    return out

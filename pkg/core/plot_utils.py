"""Plot utilities."""

import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .schemas import ResultTable  # noqa: E402

# Fixed salt so SVG element ids do not change between runs
matplotlib.rcParams["svg.hashsalt"] = "rotor-optomechanics"
matplotlib.rcParams["svg.fonttype"] = "path"


class PlotRenderer:
    """Helper for deterministic vector plots."""

    def __init__(self, figsize: Tuple[float, float] = (6.0, 4.0), log_y: bool = True):
        self.figsize = figsize
        self.log_y = log_y

    @staticmethod
    def group_curves(table: ResultTable, x_column: str, y_column: str,
                     group_column: Optional[str]) -> Dict[float, List[Tuple[float, float]]]:
        """Split rows into curves keyed by the group column, dropping unplottable points."""
        xi = table.columns.index(x_column)
        yi = table.columns.index(y_column)
        gi = table.columns.index(group_column) if group_column else None
        curves: Dict[float, List[Tuple[float, float]]] = {}
        for row in table.rows:
            x, y = row[xi], row[yi]
            if not (math.isfinite(x) and math.isfinite(y)) or (y <= 0.0):
                continue
            key = row[gi] if gi is not None else 0.0
            curves.setdefault(key, []).append((x, y))
        return curves

    def save_svg(self, table: ResultTable, path: Path, x_column: str, y_column: str,
                 group_column: Optional[str] = None) -> Path:
        """Draw y against x, one curve per group value, and save as SVG."""
        if len(table.rows) < 2:
            raise ValueError(f"need at least 2 rows to plot, got {len(table.rows)}")
        curves = self.group_curves(table, x_column, y_column, group_column)
        if not curves:
            raise ValueError("no finite positive points to plot")

        fig, ax = plt.subplots(figsize=self.figsize)
        for key in sorted(curves):
            xs, ys = zip(*curves[key])
            label = f"{group_column} = {key:.3g}" if group_column else None
            ax.plot(xs, ys, linewidth=1.5, label=label)
        if self.log_y:
            ax.set_yscale("log")
        ax.set_xlabel(x_column)
        ax.set_ylabel(y_column)
        if group_column:
            ax.legend()
        ax.grid(True, which="both", linewidth=0.3)
        fig.tight_layout()

        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        return path

"""Output writer for CSV tables and plots."""

import io
import sys
from pathlib import Path
from typing import IO, Optional, Union

import numpy as np

from .schemas import ResultTable
from .plot_utils import PlotRenderer

SIGNIFICANT_DIGITS = 17


def format_value(value: float) -> str:
    """Fixed 17-significant-digit rendering; identical floats give identical text."""
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


class OutputWriter:
    """Writes result tables as CSV with `#` metadata headers."""

    def __init__(self, output_dir: Optional[Path] = None):
        self.output_dir = Path(output_dir) if output_dir is not None else None
        if self.output_dir is not None:
            self.output_dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def render(table: ResultTable) -> str:
        """Render a table to CSV text."""
        header = [f"# {key} = {value}" for key, value in table.metadata.items()]
        header += [f"# {note}" for note in table.annotations]
        header.append(",".join(table.columns))
        data = np.asarray(table.rows, dtype=float).reshape(len(table.rows), len(table.columns))
        buffer = io.StringIO()
        # comment markers are already on the metadata lines; the column row stays bare
        np.savetxt(buffer, data, fmt=f"%.{SIGNIFICANT_DIGITS}g", delimiter=",",
                   header="\n".join(header), comments="")
        return buffer.getvalue()

    def write_table(self, table: ResultTable, target: Union[str, Path, IO[str], None] = None) -> Optional[Path]:
        """Write a table to a path, a stream, or stdout."""
        text = self.render(table)
        if target is None and self.output_dir is not None:
            target = self.output_dir / f"{table.name}.csv"
        if target is None or target == "-":
            sys.stdout.write(text)
            return None
        if hasattr(target, "write"):
            target.write(text)
            return None
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        # newline="" keeps the bytes identical across platforms
        with open(path, "w", newline="") as f:
            f.write(text)
        return path

    def write_plot(self, table: ResultTable, path: Union[str, Path], x_column: str,
                   y_column: str, group_column: Optional[str] = None) -> Path:
        """Render a table as an SVG plot."""
        renderer = PlotRenderer()
        return renderer.save_svg(table, Path(path), x_column, y_column, group_column)

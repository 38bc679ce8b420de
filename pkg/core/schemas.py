"""Pydantic schemas for result data."""

from typing import Dict, List, Optional, Sequence
from pydantic import BaseModel, Field


class ResultTable(BaseModel):
    """A table of numeric results with metadata lines."""
    name: str
    columns: List[str]
    rows: List[List[float]] = Field(default_factory=list)
    metadata: Dict[str, str] = Field(default_factory=dict)
    annotations: List[str] = Field(default_factory=list)
    plot_path: Optional[str] = None

    def append(self, row: Sequence[float]) -> None:
        """Append one data row."""
        if len(row) != len(self.columns):
            raise ValueError(
                f"row has {len(row)} values, table '{self.name}' has {len(self.columns)} columns"
            )
        self.rows.append([float(v) for v in row])

    def column(self, name: str) -> List[float]:
        """Return one column by name."""
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

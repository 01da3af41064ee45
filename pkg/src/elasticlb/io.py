"""Reading UCR-format datasets and writing result tables."""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Any, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .core import TimeSeries, ValidationError, znormalize

__all__ = ["Dataset", "load_ucr_tsv", "write_results_csv", "NN_COLUMNS", "TLB_COLUMNS", "LABEL_COLUMNS"]

NN_COLUMNS = ["dataset", "measure", "bound", "window", "queries", "candidates", "pruned", "dp_calls",
              "pruning_ratio", "wall_ms", "speedup", "accuracy"]
TLB_COLUMNS = ["dataset", "measure", "bound", "tlb_mean", "tlb_min", "tlb_max", "pairs"]
LABEL_COLUMNS = ["index", "label", "core"]


@dataclass(frozen=True)
class Dataset:
    """A named collection of labelled series."""

    name: str
    series: tuple

    def __len__(self) -> int:
        return len(self.series)

    @property
    def values(self) -> List[np.ndarray]:
        return [s.values for s in self.series]

    @property
    def labels(self) -> list:
        return [s.label for s in self.series]


def _parse_label(tok: str) -> Any:
    try:
        v = float(tok)
    except ValueError:
        return tok
    if math.isfinite(v) and v == int(v):
        return int(v)
    return v


def load_ucr_tsv(path: str, name: Optional[str] = None, znorm: bool = False) -> Dataset:
    """Load a UCR-style file: one series per line, class label first.

    Fields are separated by tabs, commas or whitespace. Blank lines are
    skipped. Rows must all have the same length.

    Raises
    ------
    ValidationError
        On an empty file, ragged rows, non-numeric or non-finite values.
    """
    if name is None:
        name = os.path.splitext(os.path.basename(path))[0]
    series = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if "\t" in line:
                toks = [t.strip() for t in line.split("\t")]
            elif "," in line:
                toks = [t.strip() for t in line.split(",")]
            else:
                toks = line.split()
            if len(toks) < 2:
                raise ValidationError(f"{path}:{lineno}: a row needs a label and at least one value")
            try:
                vals = np.array([float(t) for t in toks[1:]], dtype=np.float64)
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: non-numeric value") from None
            if not np.all(np.isfinite(vals)):
                raise ValidationError(f"{path}:{lineno}: NaN or infinite value")
            if width is None:
                width = vals.size
            elif vals.size != width:
                raise ValidationError(f"{path}:{lineno}: row has {vals.size} values, expected {width}")
            if znorm:
                vals = znormalize(vals)
            series.append(TimeSeries(vals, _parse_label(toks[0])))
    if not series:
        raise ValidationError(f"{path}: no series found")
    return Dataset(name, tuple(series))


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_results_csv(path: str, rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> None:
    """Write ``rows`` as CSV with a header; floats use 12 significant digits.

    Unknown keys in a row are an error; missing keys are written empty. An
    empty ``rows`` produces a header-only file.
    """
    columns = list(columns)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            extra = set(row) - set(columns)
            if extra:
                raise ValidationError(f"row has unknown columns: {', '.join(sorted(extra))}")
            writer.writerow([_fmt(row.get(c)) for c in columns])

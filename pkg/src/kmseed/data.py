"""Dataset container, CSV round-trip, and min-max normalization."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["DataSet", "load_csv", "save_csv", "minmax_normalize"]


@dataclass(frozen=True)
class DataSet:
    """An immutable numeric dataset with optional dense integer labels.

    points is an (n_points, n_dims) float64 array of finite values. labels,
    when present, is an int64 vector of length n_points whose values are
    exactly {0, ..., n_classes - 1} with every id occurring at least once.
    Arrays are copied and marked read-only on construction, so instances can
    be shared freely across threads.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2:
            raise ValueError(f"points must be 2-D, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"points must be non-empty, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            bad = np.argwhere(~np.isfinite(pts))[0]
            raise ValueError(
                f"non-finite value at row {bad[0] + 1}, column {bad[1] + 1}"
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

        if self.labels is not None:
            lab = np.array(self.labels, dtype=np.int64, copy=True)
            if lab.shape != (pts.shape[0],):
                raise ValueError(
                    f"labels must have shape ({pts.shape[0]},), got {lab.shape}"
                )
            uniq = np.unique(lab)
            if uniq[0] != 0 or uniq[-1] != len(uniq) - 1:
                raise ValueError(
                    "labels must be dense ids 0..K-1 with every id present; "
                    f"got values {uniq.tolist()}"
                )
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_dims(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> int | None:
        """Number of label classes, or None for unlabeled data."""
        if self.labels is None:
            return None
        return int(self.labels.max()) + 1


def _label_token_order(tokens: set[str]) -> list[str]:
    # Numeric-aware deterministic order: if every raw label parses as a
    # number, sort numerically, otherwise lexicographically.  Makes dense
    # re-encoding stable and load->save->load the identity.
    try:
        return sorted(tokens, key=lambda t: (float(t), t))
    except ValueError:
        return sorted(tokens)


def load_csv(
    path: str | Path,
    *,
    delimiter: str = ",",
    has_header: bool = False,
    label_column: int | str | None = None,
    name: str | None = None,
) -> DataSet:
    """Load a delimited numeric file into a DataSet.

    label_column selects a class column by zero-based index or the string
    "last"; its raw values (numeric or not) are re-encoded to dense ids
    0..K-1 in numeric-aware sorted order.  All remaining cells must parse as
    finite floats.  Malformed input raises ValueError naming the offending
    row and column (1-based, counting data rows only).
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    rows = [r for r in rows if r]  # drop blank lines
    if has_header and rows:
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")

    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(
                f"{path}: row {i + 1} has {len(row)} fields, expected {width}"
            )

    if label_column == "last":
        label_idx: int | None = width - 1
    elif label_column is None:
        label_idx = None
    else:
        label_idx = int(label_column)
        if not 0 <= label_idx < width:
            raise ValueError(
                f"{path}: label column {label_idx} out of range for width {width}"
            )
    if label_idx is not None and width < 2:
        raise ValueError(f"{path}: need at least one feature column besides labels")

    feature_cols = [c for c in range(width) if c != label_idx]
    pts = np.empty((len(rows), len(feature_cols)), dtype=np.float64)
    raw_labels: list[str] = []
    for i, row in enumerate(rows):
        for out_c, c in enumerate(feature_cols):
            tok = row[c].strip()
            try:
                v = float(tok)
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric value {tok!r} at row {i + 1}, "
                    f"column {c + 1}"
                ) from None
            if not math.isfinite(v):
                raise ValueError(
                    f"{path}: non-finite value {tok!r} at row {i + 1}, "
                    f"column {c + 1}"
                )
            pts[i, out_c] = v
        if label_idx is not None:
            raw_labels.append(row[label_idx].strip())

    labels = None
    if label_idx is not None:
        order = _label_token_order(set(raw_labels))
        code = {tok: j for j, tok in enumerate(order)}
        labels = np.array([code[t] for t in raw_labels], dtype=np.int64)

    return DataSet(pts, labels, name=name if name is not None else path.stem)


def save_csv(
    data: DataSet,
    path: str | Path,
    *,
    delimiter: str = ",",
) -> None:
    """Write a DataSet as delimited text; labels, if any, go in the last column.

    Floats are written with shortest round-trip formatting, so
    load_csv(save_csv(d)) reproduces points and labels exactly.
    """
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter)
        for i in range(data.n_points):
            row: list[str] = [repr(float(v)) for v in data.points[i]]
            if data.labels is not None:
                row.append(str(int(data.labels[i])))
            w.writerow(row)


def minmax_params(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-attribute (min, range) for min-max scaling; constant columns get range 1."""
    mins = points.min(axis=0)
    rng = points.max(axis=0) - mins
    rng = np.where(rng == 0.0, 1.0, rng)
    return mins, rng


def minmax_normalize(data: DataSet) -> DataSet:
    """Rescale every attribute into [0, 1] by (x - min) / (max - min).

    Constant attributes map to 0 rather than dividing by zero.  Applying the
    transform twice is the identity after the first application.
    """
    mins, rng = minmax_params(data.points)
    scaled = (data.points - mins) / rng
    return DataSet(scaled, data.labels, name=data.name)

"""Fetch-or-cache access to the three UCI tables the golden tests need.

Files are looked up in the directory named by the KMSEED_DATA environment
variable (default ./data), and downloaded from the UCI archive into it when
missing.  Run `python3 tests/_uci.py` to prefetch everything.  Offline with
an empty cache, loaders raise RuntimeError telling the user exactly which
files to place where.
"""

from __future__ import annotations

import os
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np

from kmseed.data import DataSet

_BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"
FILES = {
    "breast-cancer-wisconsin.data": f"{_BASE}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
    "magic04.data": f"{_BASE}/magic/magic04.data",
    "SPECTF.train": f"{_BASE}/spect/SPECTF.train",
    "SPECTF.test": f"{_BASE}/spect/SPECTF.test",
}


def data_dir() -> Path:
    return Path(os.environ.get("KMSEED_DATA", "data"))


def _fetch(filename: str) -> Path:
    path = data_dir() / filename
    if path.exists():
        return path
    url = FILES[filename]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with urllib.request.urlopen(url, timeout=30) as resp:
            body = resp.read()
        path.write_bytes(body)
        return path
    except (urllib.error.URLError, OSError) as exc:
        raise RuntimeError(
            f"UCI file {filename!r} is neither cached nor downloadable "
            f"({exc}). Place it at {path} (source: {url}) or set KMSEED_DATA "
            "to a directory containing it."
        ) from exc


def _parse_rows(path: Path, delimiter: str = ",") -> list[list[str]]:
    rows = []
    for line in path.read_text().splitlines():
        line = line.strip()
        if line:
            rows.append(line.split(delimiter))
    return rows


def load_bcw() -> DataSet:
    """Breast Cancer Wisconsin (Original): drop the id column and the 16
    rows with missing attribute values; 683 x 9, labels 2/4 -> 0/1."""
    rows = _parse_rows(_fetch("breast-cancer-wisconsin.data"))
    keep = [r for r in rows if "?" not in r]
    pts = np.array([[float(v) for v in r[1:-1]] for r in keep])
    labels = np.array([0 if r[-1] == "2" else 1 for r in keep], dtype=np.int64)
    return DataSet(pts, labels, name="bcw")


def load_magic() -> DataSet:
    """MAGIC Gamma Telescope: 19020 x 10, labels g/h -> 0/1."""
    rows = _parse_rows(_fetch("magic04.data"))
    pts = np.array([[float(v) for v in r[:-1]] for r in rows])
    labels = np.array([0 if r[-1] == "g" else 1 for r in rows], dtype=np.int64)
    return DataSet(pts, labels, name="magic")


def load_spectf() -> DataSet:
    """SPECTF Heart, train and test concatenated: 267 x 44, diagnosis label
    in the first column."""
    rows = _parse_rows(_fetch("SPECTF.train")) + _parse_rows(_fetch("SPECTF.test"))
    pts = np.array([[float(v) for v in r[1:]] for r in rows])
    labels = np.array([int(r[0]) for r in rows], dtype=np.int64)
    return DataSet(pts, labels, name="spectf")


if __name__ == "__main__":
    for fname in FILES:
        print(f"{fname}: {_fetch(fname)}")

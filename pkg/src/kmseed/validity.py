"""External cluster validity indices over a contingency table.

Implements the adjusted Rand index with the Hubert-Arabie expected-value
correction (Hubert & Arabie 1985), the van Dongen split-join distance
normalized by 2n (van Dongen 2000), and the variation of information
(Meila 2007) normalized to [0, 1].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb, log

import numpy as np

__all__ = [
    "ContingencyTable",
    "contingency",
    "adjusted_rand",
    "van_dongen",
    "variation_of_information",
]


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-tabulation of two partitions of the same n items.

    counts[i, j] is how many items fall in cluster i of the first partition
    and cluster j of the second.  Row and column sums are the partition
    cluster sizes; every row and column is non-empty by construction when
    built via contingency().
    """

    counts: np.ndarray

    def __post_init__(self) -> None:
        c = np.array(self.counts, dtype=np.int64, copy=True)
        if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
            raise ValueError(f"counts must be a non-empty 2-D table, got {c.shape}")
        if (c < 0).any():
            raise ValueError("counts must be non-negative")
        if c.sum() < 1:
            raise ValueError("counts must tabulate at least one item")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def contingency(labels_a: np.ndarray, labels_b: np.ndarray) -> ContingencyTable:
    """Tabulate two label vectors; label values need not be dense."""
    a = np.asarray(labels_a).ravel()
    b = np.asarray(labels_b).ravel()
    if a.shape != b.shape:
        raise ValueError(f"label vectors differ in length: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("label vectors are empty")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    rows = int(ai.max()) + 1
    cols = int(bi.max()) + 1
    counts = np.zeros((rows, cols), dtype=np.int64)
    np.add.at(counts, (ai, bi), 1)
    return ContingencyTable(counts)


def _pair_sums(t: ContingencyTable) -> tuple[int, int, int]:
    """(sum over cells, sum over rows, sum over columns) of C(count, 2),
    as exact Python integers."""
    cells = sum(comb(int(v), 2) for v in t.counts.ravel() if v > 1)
    rows = sum(comb(int(v), 2) for v in t.row_sums)
    cols = sum(comb(int(v), 2) for v in t.col_sums)
    return cells, rows, cols


def _is_identical_partition(t: ContingencyTable) -> bool:
    # identical up to relabeling: each row and each column has exactly one
    # non-zero cell
    nz_rows = (t.counts > 0).sum(axis=1)
    nz_cols = (t.counts > 0).sum(axis=0)
    return bool((nz_rows == 1).all() and (nz_cols == 1).all())


def adjusted_rand(table: ContingencyTable) -> float:
    """Adjusted Rand index: 1 for identical partitions, ~0 expected for
    independent ones; can be negative.

    Pair counts are kept as exact integers so the degenerate case where the
    index's maximum equals its expectation is detected exactly; that case
    returns 1.0 when the partitions are identical up to relabeling and 0.0
    otherwise, with a warning.
    """
    if table.n < 2:
        raise ValueError(f"adjusted Rand needs n >= 2 items, got n={table.n}")
    cells, rows, cols = _pair_sums(table)
    total_pairs = comb(table.n, 2)
    # denominator (max - expected) scaled by 2 * total_pairs to stay integer
    denom = total_pairs * (rows + cols) - 2 * rows * cols
    if denom == 0:
        warnings.warn(
            "adjusted Rand degenerate: expected index equals maximum index",
            RuntimeWarning,
            stacklevel=2,
        )
        return 1.0 if _is_identical_partition(table) else 0.0
    num = 2 * (total_pairs * cells - rows * cols)
    return num / denom


def van_dongen(table: ContingencyTable) -> float:
    """van Dongen split-join distance normalized by 2n; 0 for identical
    partitions, toward 1 for maximally mismatched ones."""
    n = table.n
    best_in_rows = int(table.counts.max(axis=1).sum())
    best_in_cols = int(table.counts.max(axis=0).sum())
    return (2 * n - best_in_rows - best_in_cols) / (2 * n)


def variation_of_information(
    table: ContingencyTable, normalization: float | None = None
) -> float:
    """Variation of information between the two partitions, in nats,
    normalized into [0, 1].

    VI = 2 H(joint) - H(rows) - H(cols); the default normalization constant
    is ln n (its maximum over partitions of n items), overridable via the
    normalization argument.
    """
    n = table.n
    if n < 2:
        raise ValueError(f"variation of information needs n >= 2 items, got n={n}")

    def entropy(counts: np.ndarray) -> float:
        # sorted accumulation makes the sum invariant to label order, so
        # identical partitions yield exactly 2H - H - H = 0
        total = 0.0
        for v in sorted(int(c) for c in counts.ravel() if c > 0):
            p = v / n
            total -= p * log(p)
        return total

    vi = 2.0 * entropy(table.counts) - entropy(table.row_sums) - entropy(table.col_sums)
    scale = log(n) if normalization is None else float(normalization)
    if scale <= 0.0:
        raise ValueError(f"normalization must be positive, got {scale}")
    # clamp away float dust: the raw value is >= 0 and <= ln n mathematically
    return min(max(vi / scale, 0.0), 1.0)

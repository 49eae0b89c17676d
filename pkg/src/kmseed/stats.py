"""Rank-based comparison of treatments over blocks.

Friedman's two-way rank test (Friedman 1937) with the Iman-Davenport F
correction (Iman & Davenport 1980), pairwise z comparisons of mean ranks,
and two multiple-comparison procedures: Holm's step-down (Holm 1979) and
the Bergmann-Hommel exhaustive-sets procedure (Bergmann & Hommel 1988),
which is uniformly at least as powerful as Holm on the all-pairs family.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import sqrt

import numpy as np
from scipy.stats import chi2 as chi2_dist
from scipy.stats import f as f_dist
from scipy.stats import norm, rankdata

__all__ = [
    "RankTable",
    "TestOutcome",
    "PairwiseZ",
    "PairDecision",
    "PosthocResult",
    "rank_blocks",
    "friedman",
    "iman_davenport",
    "pairwise_pvalues",
    "bergmann_hommel",
    "holm",
    "stirling2",
]

_BH_MAX_TREATMENTS = 9


@dataclass(frozen=True)
class RankTable:
    """Within-block ranks of T treatments over B blocks (1 = best), ties
    sharing the mean rank."""

    ranks: np.ndarray
    direction: str

    @property
    def b_blocks(self) -> int:
        return self.ranks.shape[0]

    @property
    def t_treatments(self) -> int:
        return self.ranks.shape[1]

    @property
    def mean_ranks(self) -> np.ndarray:
        return self.ranks.mean(axis=0)


@dataclass(frozen=True)
class TestOutcome:
    """A test statistic with its degrees of freedom, p-value, and the
    significance level it was run at.  degenerate flags an infinite
    statistic (p forced to 0)."""

    statistic: float
    df: tuple[int, ...]
    p_value: float
    alpha: float
    degenerate: bool = False

    @property
    def rejected(self) -> bool:
        return self.p_value <= self.alpha


@dataclass(frozen=True)
class PairwiseZ:
    """Symmetric z and two-sided p matrices for all treatment pairs, plus
    the mean ranks they were computed from."""

    z: np.ndarray
    p: np.ndarray
    mean_ranks: np.ndarray


@dataclass(frozen=True)
class PairDecision:
    i: int
    j: int
    z: float
    p_value: float
    rejected: bool


@dataclass(frozen=True)
class PosthocResult:
    """Per-pair accept/reject decisions of a multiple-comparison procedure."""

    method: str
    alpha: float
    decisions: tuple[PairDecision, ...]

    def rejected_pairs(self) -> set[tuple[int, int]]:
        return {(d.i, d.j) for d in self.decisions if d.rejected}


def rank_blocks(values: np.ndarray, direction: str = "lower_is_better") -> RankTable:
    """Rank treatments within each block; ties get the mean of the tied
    rank positions.  direction says whether small or large raw values are
    good (rank 1)."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2:
        raise ValueError(f"values must be 2-D (blocks x treatments), got {v.shape}")
    b, t = v.shape
    if b < 2 or t < 2:
        raise ValueError(f"need at least 2 blocks and 2 treatments, got {b}x{t}")
    if not np.isfinite(v).all():
        raise ValueError("values must be finite")
    if direction == "higher_is_better":
        v = -v
    elif direction != "lower_is_better":
        raise ValueError(f"unknown direction {direction!r}")
    ranks = rankdata(v, method="average", axis=1)
    return RankTable(ranks=ranks, direction=direction)


def friedman(table: RankTable, alpha: float = 0.05) -> TestOutcome:
    """Friedman's chi-squared statistic over the rank table, with T - 1
    degrees of freedom.  All-tied tables give a statistic of exactly 0."""
    b, t = table.b_blocks, table.t_treatments
    col_sums = table.ranks.sum(axis=0)
    stat = (12.0 * float((col_sums**2).sum())) / (b * t * (t + 1)) - 3.0 * b * (t + 1)
    stat = max(stat, 0.0)  # float dust guard; the statistic is non-negative
    p = float(chi2_dist.sf(stat, t - 1))
    return TestOutcome(statistic=stat, df=(t - 1,), p_value=p, alpha=alpha)


def iman_davenport(
    friedman_statistic: float, b_blocks: int, t_treatments: int, alpha: float = 0.05
) -> TestOutcome:
    """The less conservative F-form of the Friedman statistic, with
    (T - 1, (T - 1)(B - 1)) degrees of freedom.

    The transform has a pole at the statistic's maximum B(T - 1): a table
    of B identical rankings lands exactly there, and is reported as
    degenerate with an infinite statistic and p = 0 (maximal evidence
    against "all equivalent").
    """
    b, t = b_blocks, t_treatments
    if b < 2 or t < 2:
        raise ValueError(f"need at least 2 blocks and 2 treatments, got {b}x{t}")
    if not 0.0 <= friedman_statistic <= b * (t - 1):
        raise ValueError(
            f"Friedman statistic must lie in [0, B(T-1)] = [0, {b * (t - 1)}], "
            f"got {friedman_statistic}"
        )
    df = (t - 1, (t - 1) * (b - 1))
    denom = b * (t - 1) - friedman_statistic
    if denom <= 0.0:
        return TestOutcome(
            statistic=float("inf"), df=df, p_value=0.0, alpha=alpha, degenerate=True
        )
    stat = (b - 1) * friedman_statistic / denom
    p = float(f_dist.sf(stat, *df))
    return TestOutcome(statistic=stat, df=df, p_value=p, alpha=alpha)


def pairwise_pvalues(table: RankTable) -> PairwiseZ:
    """z statistics and two-sided normal p-values for every treatment pair,
    from the mean-rank differences over the shared standard error
    sqrt(T(T+1) / 6B)."""
    b, t = table.b_blocks, table.t_treatments
    mean_ranks = table.mean_ranks
    se = sqrt(t * (t + 1) / (6.0 * b))
    diff = mean_ranks[:, None] - mean_ranks[None, :]
    z = diff / se
    p = 2.0 * norm.sf(np.abs(z))
    np.fill_diagonal(p, 1.0)
    return PairwiseZ(z=z, p=np.minimum(p, 1.0), mean_ranks=mean_ranks)


def _partitions(items: tuple[int, ...]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1 :]
        yield part + [[first]]


@lru_cache(maxsize=None)
def _exhaustive_pair_sets(t: int) -> tuple[frozenset[int], ...]:
    """All distinct non-empty sets of pair-hypotheses that can be exactly
    the true ones under some grouping of t treatments into equal classes.

    Pairs are indexed by their position in combinations(range(t), 2).
    """
    pair_index = {pair: idx for idx, pair in enumerate(combinations(range(t), 2))}
    seen: set[frozenset[int]] = set()
    for part in _partitions(tuple(range(t))):
        pairs = frozenset(
            pair_index[(min(a, b), max(a, b))]
            for block in part
            for a, b in combinations(sorted(block), 2)
        )
        if pairs:
            seen.add(pairs)
    return tuple(sorted(seen, key=lambda s: (len(s), sorted(s))))


def _pair_list(t: int) -> list[tuple[int, int]]:
    return list(combinations(range(t), 2))


def _check_p_matrix(p_matrix: np.ndarray) -> np.ndarray:
    p = np.asarray(p_matrix, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 2:
        raise ValueError(f"p_matrix must be square with T >= 2, got {p.shape}")
    if not ((p >= 0.0) & (p <= 1.0)).all():
        raise ValueError("p-values must lie in [0, 1]")
    if not np.allclose(p, p.T):
        raise ValueError("p_matrix must be symmetric")
    return p


def bergmann_hommel(p_matrix: np.ndarray, alpha: float = 0.05) -> PosthocResult:
    """Exhaustive-sets multiple comparison over all treatment pairs.

    A pair is accepted if it belongs to any exhaustive set I whose smallest
    p-value exceeds alpha / |I|; everything else is rejected.  The
    exhaustive sets are enumerated from all groupings of the treatments and
    cached per T; beyond 9 treatments the enumeration is intractable and
    holm() should be used instead.
    """
    p = _check_p_matrix(p_matrix)
    t = p.shape[0]
    if t > _BH_MAX_TREATMENTS:
        raise ValueError(
            f"bergmann_hommel supports at most {_BH_MAX_TREATMENTS} treatments "
            f"(got {t}); use holm() instead"
        )
    pairs = _pair_list(t)
    p_flat = np.array([p[i, j] for i, j in pairs])
    accepted: set[int] = set()
    for subset in _exhaustive_pair_sets(t):
        if min(p_flat[i] for i in subset) > alpha / len(subset):
            accepted |= subset
    decisions = tuple(
        PairDecision(
            i=i,
            j=j,
            z=float(norm.isf(min(p[i, j], 1.0) / 2.0)),
            p_value=float(p[i, j]),
            rejected=idx not in accepted,
        )
        for idx, (i, j) in enumerate(pairs)
    )
    return PosthocResult(method="bergmann_hommel", alpha=alpha, decisions=decisions)


def holm(p_matrix: np.ndarray, alpha: float = 0.05) -> PosthocResult:
    """Holm's step-down procedure over all treatment pairs: the ascending
    k-th smallest p-value (1-based) is tested against alpha / (m - k + 1),
    and the first failure accepts it and everything after."""
    p = _check_p_matrix(p_matrix)
    t = p.shape[0]
    pairs = _pair_list(t)
    m = len(pairs)
    p_flat = np.array([p[i, j] for i, j in pairs])
    order = np.argsort(p_flat, kind="stable")
    rejected = np.zeros(m, dtype=bool)
    for rank_pos, idx in enumerate(order):
        if p_flat[idx] <= alpha / (m - rank_pos):
            rejected[idx] = True
        else:
            break
    decisions = tuple(
        PairDecision(
            i=i,
            j=j,
            z=float(norm.isf(min(p[i, j], 1.0) / 2.0)),
            p_value=float(p_flat[idx]),
            rejected=bool(rejected[idx]),
        )
        for idx, (i, j) in enumerate(pairs)
    )
    return PosthocResult(method="holm", alpha=alpha, decisions=decisions)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind: the count of ways to partition n
    labeled items into k non-empty groups.  Exact integer arithmetic;
    bounds 1 <= k <= n <= 200."""
    if not 1 <= k <= n <= 200:
        raise ValueError(f"need 1 <= k <= n <= 200, got n={n}, k={k}")
    prev = [0] * (k + 1)
    prev[1] = 1  # S(1, 1)
    for m in range(2, n + 1):
        cur = [0] * (k + 1)
        for j in range(1, min(m, k) + 1):
            cur[j] = j * prev[j] + prev[j - 1]
        prev = cur
    return prev[k]

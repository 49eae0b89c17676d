"""Center initialization methods for k-means.

Eight linear-time seeding strategies: six randomized (Forgy's random
assignment, MacQueen's distinct random points, the maximin farthest-point
rule, the subset-refinement scheme of Bradley and Fayyad, k-means++ and its
greedy variant) and two deterministic divisive ones (variance partitioning
and principal-axis partitioning).  All take the data matrix plus an explicit
numpy Generator, so runs are reproducible from seeds alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kmeans import KMeansConfig, cluster

__all__ = [
    "Centers",
    "InitConfig",
    "METHODS",
    "DETERMINISTIC_METHODS",
    "initialize",
    "forgy",
    "macqueen_random",
    "maximin",
    "bradley_fayyad",
    "kmeanspp",
    "greedy_kmeanspp",
    "var_part",
    "pca_part",
]

_FORGY_RETRIES = 100
_POWER_TOL = 1e-10
_POWER_MAX_ITERS = 1000


@dataclass(frozen=True)
class Centers:
    """A (k, n_dims) array of initial centers plus provenance."""

    coords: np.ndarray
    method: str
    seed: int | None = None

    def __post_init__(self) -> None:
        c = np.array(self.coords, dtype=np.float64, copy=True)
        if c.ndim != 2 or c.shape[0] < 1:
            raise ValueError(f"coords must be (k, d) with k >= 1, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def k(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class InitConfig:
    """Which method to run and with what knobs.

    candidates=None lets greedy k-means++ use its default 2 + floor(ln k).
    first_center_rule applies to maximin only: "random" picks the first
    center uniformly, "max_norm" picks the point with the largest norm.
    kmeans configures the internal refinement runs of bradley_fayyad.
    """

    method: str
    k: int
    seed: int | None = None
    j_subsets: int = 10
    candidates: int | None = None
    first_center_rule: str = "random"
    kmeans: KMeansConfig = field(default_factory=lambda: KMeansConfig(accelerate=False))


def _points_of(data) -> np.ndarray:
    pts = np.ascontiguousarray(getattr(data, "points", data), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"points must be a non-empty 2-D array, got shape {pts.shape}")
    return pts


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n_points={n}, got k={k}")


def _sq_dists_to(x: np.ndarray, center: np.ndarray) -> np.ndarray:
    return ((x - center) ** 2).sum(axis=1)


def forgy(x, k: int, rng: np.random.Generator) -> Centers:
    """Assign every point to a uniform random cluster; centers are the centroids.

    Retries (bounded) until all k clusters are non-empty, then errors.
    """
    x = _points_of(x)
    _check_k(k, x.shape[0])
    for _ in range(_FORGY_RETRIES):
        labels = rng.integers(0, k, size=x.shape[0])
        counts = np.bincount(labels, minlength=k)
        if (counts > 0).all():
            sums = np.zeros((k, x.shape[1]))
            np.add.at(sums, labels, x)
            return Centers(sums / counts[:, None], method="forgy")
    raise ValueError(
        f"forgy: no assignment with all {k} clusters non-empty in "
        f"{_FORGY_RETRIES} tries (k too close to n_points={x.shape[0]}?)"
    )


def macqueen_random(x, k: int, rng: np.random.Generator) -> Centers:
    """Pick k distinct points uniformly at random as the centers.

    Distinctness is by exact value, so duplicated rows cannot yield
    coincident centers; errors if the data has fewer than k distinct rows.
    """
    x = _points_of(x)
    _check_k(k, x.shape[0])
    chosen: list[int] = []
    seen: set[bytes] = set()
    for i in rng.permutation(x.shape[0]):
        key = x[i].tobytes()
        if key in seen:
            continue
        seen.add(key)
        chosen.append(int(i))
        if len(chosen) == k:
            return Centers(x[chosen], method="macqueen")
    raise ValueError(
        f"macqueen: only {len(chosen)} distinct points available, need k={k}"
    )


def maximin(
    x, k: int, rng: np.random.Generator, first_center_rule: str = "random"
) -> Centers:
    """Farthest-point seeding: each next center maximizes the distance to
    the nearest already-chosen center; ties go to the lowest point index.

    The first center is a uniform random point, or with
    first_center_rule="max_norm" the point of greatest norm (a fully
    deterministic variant).
    """
    x = _points_of(x)
    _check_k(k, x.shape[0])
    if first_center_rule == "random":
        first = int(rng.integers(x.shape[0]))
    elif first_center_rule == "max_norm":
        first = int(np.argmax((x**2).sum(axis=1)))
    else:
        raise ValueError(f"unknown first_center_rule {first_center_rule!r}")
    chosen = [first]
    min_d2 = _sq_dists_to(x, x[first])
    while len(chosen) < k:
        nxt = int(np.argmax(min_d2))
        chosen.append(nxt)
        np.minimum(min_d2, _sq_dists_to(x, x[nxt]), out=min_d2)
    return Centers(x[chosen], method="maximin")


def kmeanspp(x, k: int, rng: np.random.Generator) -> Centers:
    """D-squared sampling: after a uniform first center, each point is drawn
    with probability proportional to its squared distance to the nearest
    chosen center.  Falls back to uniform when all those distances are zero.
    """
    x = _points_of(x)
    _check_k(k, x.shape[0])
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    min_d2 = _sq_dists_to(x, x[chosen[0]])
    while len(chosen) < k:
        total = min_d2.sum()
        if total > 0.0:
            nxt = int(rng.choice(n, p=min_d2 / total))
        else:
            nxt = int(rng.integers(n))
        chosen.append(nxt)
        np.minimum(min_d2, _sq_dists_to(x, x[nxt]), out=min_d2)
    return Centers(x[chosen], method="kmeanspp")


def greedy_kmeanspp(
    x, k: int, rng: np.random.Generator, candidates: int | None = None
) -> Centers:
    """k-means++ with greedy candidate selection in every round.

    Each round draws `candidates` points (uniformly in the first round,
    D-squared afterwards) and keeps the one whose selection leaves the
    smallest total squared distance field.  Default candidate count is
    2 + floor(ln k); candidates=1 reduces exactly to plain k-means++.
    """
    x = _points_of(x)
    _check_k(k, x.shape[0])
    n = x.shape[0]
    if candidates is None:
        candidates = 2 + int(math.floor(math.log(k)))
    if candidates < 1:
        raise ValueError(f"candidates must be >= 1, got {candidates}")

    chosen: list[int] = []
    min_d2 = np.full(n, np.inf)
    for _ in range(k):
        if not chosen:
            cand = rng.integers(n, size=candidates)
        else:
            total = min_d2.sum()
            if total > 0.0:
                cand = rng.choice(n, size=candidates, replace=True, p=min_d2 / total)
            else:
                cand = rng.integers(n, size=candidates)
        # potential of each candidate: total field if it were selected
        cand_d2 = ((x[cand][:, None, :] - x[None, :, :]) ** 2).sum(axis=2)
        pots = np.minimum(min_d2[None, :], cand_d2).sum(axis=1)
        best = int(cand[int(np.argmin(pots))])
        chosen.append(best)
        np.minimum(min_d2, _sq_dists_to(x, x[best]), out=min_d2)
    return Centers(x[chosen], method="greedy_kmeanspp")


def bradley_fayyad(
    x,
    k: int,
    rng: np.random.Generator,
    j_subsets: int = 10,
    kmeans_config: KMeansConfig | None = None,
) -> Centers:
    """Refinement seeding: cluster J random subsets, then cluster the pooled
    subset solutions with each solution as a start and keep the best.

    The data is split into j_subsets near-equal random subsets; each is
    clustered (MacQueen start) to produce a candidate center set.  All
    candidate sets are pooled into a superset, the superset is clustered
    once per candidate start, and the start with the lowest superset SSE
    wins.  The internal runs use kmeans_config (naive path by default).
    """
    x = _points_of(x)
    _check_k(k, x.shape[0])
    n = x.shape[0]
    if j_subsets < 1:
        raise ValueError(f"j_subsets must be >= 1, got {j_subsets}")
    if k > n // j_subsets:
        raise ValueError(
            f"k={k} exceeds subset size {n // j_subsets} "
            f"(n_points={n}, j_subsets={j_subsets}); lower j_subsets or k"
        )
    config = kmeans_config or KMeansConfig(accelerate=False)

    subsets = np.array_split(rng.permutation(n), j_subsets)
    candidate_sets: list[np.ndarray] = []
    for idx in subsets:
        sub = x[idx]
        start = macqueen_random(sub, k, rng)
        candidate_sets.append(cluster(sub, start.coords, config).centers)

    superset = np.vstack(candidate_sets)
    best_sse = np.inf
    best_centers: np.ndarray | None = None
    for cand in candidate_sets:
        res = cluster(superset, cand, config)
        if res.sse < best_sse:
            best_sse = res.sse
            best_centers = res.centers
    assert best_centers is not None
    return Centers(best_centers, method="bradley_fayyad")


def _split_cluster_sse(x: np.ndarray, idx: np.ndarray) -> float:
    pts = x[idx]
    return float(((pts - pts.mean(axis=0)) ** 2).sum())


def _divisive(x: np.ndarray, k: int, split_fn, method: str) -> Centers:
    """Shared skeleton: repeatedly split the positive-SSE cluster with the
    greatest SSE (ties to the lowest cluster index) until k clusters exist.
    """
    clusters: list[np.ndarray] = [np.arange(x.shape[0])]
    sses: list[float] = [_split_cluster_sse(x, clusters[0])]
    while len(clusters) < k:
        order = sorted(range(len(clusters)), key=lambda i: (-sses[i], i))
        target = next((i for i in order if sses[i] > 0.0), None)
        if target is None:
            raise ValueError(
                f"{method}: cannot reach k={k}, every remaining cluster "
                "has identical points"
            )
        left_mask = split_fn(x[clusters[target]])
        idx = clusters[target]
        left, right = idx[left_mask], idx[~left_mask]
        if left.size == 0 or right.size == 0:
            # numeric guard: a rounded threshold can swallow one side even
            # though the cluster is splittable; peel the extreme points off
            pts = x[idx]
            ref = pts[0]
            far = int(np.argmax(((pts - ref) ** 2).sum(axis=1)))
            outlier = (pts == pts[far]).all(axis=1)
            left, right = idx[~outlier], idx[outlier]
        clusters[target] = left
        clusters.append(right)
        sses[target] = _split_cluster_sse(x, left)
        sses.append(_split_cluster_sse(x, right))
    coords = np.stack([x[idx].mean(axis=0) for idx in clusters])
    return Centers(coords, method=method)


def var_part(x, k: int) -> Centers:
    """Deterministic divisive seeding: split the worst cluster at its mean
    along the attribute of greatest variance; centers are the final
    cluster centroids.
    """
    x = _points_of(x)
    _check_k(k, x.shape[0])

    def split(pts: np.ndarray) -> np.ndarray:
        axis = int(np.argmax(pts.var(axis=0)))
        return pts[:, axis] <= pts[:, axis].mean()

    return _divisive(x, k, split, method="var_part")


def _principal_direction(centered: np.ndarray) -> np.ndarray:
    """Dominant eigenvector of the covariance, by power iteration started
    from the axis of greatest variance (tolerance 1e-10, at most 1000
    rounds)."""
    cov = centered.T @ centered / centered.shape[0]
    v = np.zeros(cov.shape[0])
    v[int(np.argmax(np.diag(cov)))] = 1.0
    for _ in range(_POWER_MAX_ITERS):
        w = cov @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            break
        w /= norm
        if np.linalg.norm(w - v) < _POWER_TOL:
            v = w
            break
        v = w
    return v


def pca_part(x, k: int) -> Centers:
    """Deterministic divisive seeding: split the worst cluster by the sign
    of the projection onto its principal axis (the hyperplane through the
    mean orthogonal to the dominant eigenvector).
    """
    x = _points_of(x)
    _check_k(k, x.shape[0])

    def split(pts: np.ndarray) -> np.ndarray:
        centered = pts - pts.mean(axis=0)
        v = _principal_direction(centered)
        return centered @ v <= 0.0

    return _divisive(x, k, split, method="pca_part")


# method id -> (callable signature kind, deterministic?)
METHODS: dict[str, bool] = {
    "forgy": False,
    "macqueen": False,
    "maximin": False,
    "bradley_fayyad": False,
    "kmeanspp": False,
    "greedy_kmeanspp": False,
    "var_part": True,
    "pca_part": True,
}

DETERMINISTIC_METHODS = frozenset(m for m, det in METHODS.items() if det)


def initialize(data, config: InitConfig, rng: np.random.Generator | None = None) -> Centers:
    """Run the configured seeding method and stamp provenance on the result.

    Deterministic methods ignore the RNG.  When rng is not supplied one is
    built from config.seed with the default bit generator.
    """
    x = _points_of(data)
    if config.method not in METHODS:
        raise ValueError(
            f"unknown method {config.method!r}; expected one of {sorted(METHODS)}"
        )
    if rng is None:
        rng = np.random.default_rng(config.seed)

    m = config.method
    if m == "forgy":
        out = forgy(x, config.k, rng)
    elif m == "macqueen":
        out = macqueen_random(x, config.k, rng)
    elif m == "maximin":
        out = maximin(x, config.k, rng, first_center_rule=config.first_center_rule)
    elif m == "bradley_fayyad":
        out = bradley_fayyad(
            x, config.k, rng, j_subsets=config.j_subsets, kmeans_config=config.kmeans
        )
    elif m == "kmeanspp":
        out = kmeanspp(x, config.k, rng)
    elif m == "greedy_kmeanspp":
        out = greedy_kmeanspp(x, config.k, rng, candidates=config.candidates)
    elif m == "var_part":
        out = var_part(x, config.k)
    else:
        out = pca_part(x, config.k)
    return Centers(out.coords, method=out.method, seed=config.seed)

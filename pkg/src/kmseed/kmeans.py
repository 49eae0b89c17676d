"""Batch k-means (Lloyd's algorithm) in naive and bound-accelerated forms.

Both paths share the same assignment semantics (nearest center, ties to the
lowest index), the same empty-cluster repair, and the same centroid/SSE
arithmetic, so the accelerated variant returns results identical to the
naive one and is checked against it in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

__all__ = [
    "KMeansConfig",
    "ClusteringResult",
    "assign_points",
    "compute_sse",
    "lloyd",
    "lloyd_accelerated",
    "cluster",
]

# Rows per chunk are sized so a chunk of the n x k distance matrix stays
# around 2e7 float64 entries.
_CHUNK_BUDGET = 20_000_000


@dataclass(frozen=True)
class KMeansConfig:
    """Convergence and execution settings for the clustering phase.

    eps is the relative SSE improvement threshold: the loop stops after
    iteration i once (sse[i-1] - sse[i]) / sse[i] <= eps, or after max_iters
    iterations, whichever comes first.  eps=inf stops after exactly one
    iteration.  accelerate selects the bound-pruned assignment path.
    """

    eps: float = 1e-6
    max_iters: int = 100
    accelerate: bool = True

    def __post_init__(self) -> None:
        if not self.eps >= 0.0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class ClusteringResult:
    """Outcome of one clustering run.

    sse_trace[0] is the SSE induced by the initial centers before any
    centroid update; sse_trace[i] is the SSE after iteration i's update, so
    iterations == len(sse_trace) - 1.  distance_evals[i] counts point-center
    distance computations started during iteration i+1's assignment phase
    (repair passes included).  sse always equals the objective recomputed
    from centers and assignment.
    """

    centers: np.ndarray
    assignment: np.ndarray
    sse: float
    iterations: int
    converged_by: str  # "eps" | "max_iters"
    sse_trace: list[float] = field(default_factory=list)
    distance_evals: list[int] = field(default_factory=list)


# Tests may set this to a list to collect every sse_trace produced, for the
# global monotonicity assertion.  Never enabled in production.
TRACE_LOG: list[list[float]] | None = None


def _as_points(data) -> np.ndarray:
    pts = getattr(data, "points", data)
    pts = np.ascontiguousarray(pts, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"points must be a non-empty 2-D array, got shape {pts.shape}")
    return pts


def _check_centers(centers: np.ndarray, n: int, dim: int) -> np.ndarray:
    c = np.ascontiguousarray(getattr(centers, "coords", centers), dtype=np.float64)
    if c.ndim != 2 or c.shape[1] != dim:
        raise ValueError(f"centers must be (k, {dim}), got shape {c.shape}")
    k = c.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n_points={n}, got k={k}")
    return c


def _full_assign(
    x: np.ndarray, centers: np.ndarray, need_second: bool
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """One exhaustive assignment pass: (assignment, best_d2, second_d2)."""
    n, dim = x.shape
    k = centers.shape[0]
    assign = np.empty(n, dtype=np.int64)
    best = np.empty(n, dtype=np.float64)
    second = np.empty(n, dtype=np.float64) if (need_second and k > 1) else None
    step = max(1, _CHUNK_BUDGET // max(1, k * dim))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        d2 = ((x[lo:hi, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        idx = d2.argmin(axis=1)  # argmin takes the lowest index on ties
        assign[lo:hi] = idx
        best[lo:hi] = d2[np.arange(hi - lo), idx]
        if second is not None:
            second[lo:hi] = np.partition(d2, 1, axis=1)[:, 1]
    if need_second and second is None:
        second = np.full(n, np.inf)
    return assign, best, second


def _centroids(x: np.ndarray, assign: np.ndarray, k: int, prev: np.ndarray) -> np.ndarray:
    sums = np.zeros((k, x.shape[1]), dtype=np.float64)
    np.add.at(sums, assign, x)
    counts = np.bincount(assign, minlength=k)
    out = prev.copy()
    nz = counts > 0
    out[nz] = sums[nz] / counts[nz, None]
    return out


def _sse_to_assigned(
    x: np.ndarray, centers: np.ndarray, assign: np.ndarray
) -> tuple[float, np.ndarray]:
    sq = ((x - centers[assign]) ** 2).sum(axis=1)
    return float(sq.sum()), sq


def _repair_empties(
    x: np.ndarray,
    centers: np.ndarray,
    assign: np.ndarray,
    best_d2: np.ndarray,
    need_second: bool,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray | None, int, bool]:
    """Relocate empty centers to the point farthest from its own center.

    Each relocation is followed by a fresh exhaustive assignment; at most k
    rounds.  Returns (assign, centers, best_d2, second_d2, extra_evals,
    repaired).
    """
    n = x.shape[0]
    k = centers.shape[0]
    second = None
    evals = 0
    repaired = False
    for _ in range(k):
        counts = np.bincount(assign, minlength=k)
        empties = np.flatnonzero(counts == 0)
        if empties.size == 0:
            break
        repaired = True
        centers = centers.copy()
        # farthest point from its currently assigned center; ties -> lowest index
        centers[empties[0]] = x[int(np.argmax(best_d2))]
        assign, best_d2, second = _full_assign(x, centers, need_second)
        evals += n * k
    return assign, centers, best_d2, second, evals, repaired


@njit(cache=True)
def _pruned_assign(x, centers, assign, upper, lower, best_sq, s_half):  # pragma: no cover
    """Assignment pass that skips points whose bounds prove their center.

    upper[i] must be the exact distance from point i to its assigned center
    (maintained by the caller, with best_sq[i] its exact square); lower[i] a
    lower bound on the distance to any other center; s_half[j] half the
    distance from center j to its nearest other center.  A point is
    rescanned only when upper >= max(lower, s_half[assigned]); the strict
    inequality on the skip keeps tie-breaking identical to the exhaustive
    pass.  Rescans abort the per-dimension accumulation once it exceeds the
    current second-best distance.  Returns the number of point-center
    evaluations started.
    """
    n, dim = x.shape
    k = centers.shape[0]
    evals = 0
    for i in range(n):
        a = assign[i]
        m = lower[i]
        if s_half[a] > m:
            m = s_half[a]
        if upper[i] < m:
            continue
        best = np.inf
        second = np.inf
        who = 0
        for j in range(k):
            acc = 0.0
            for t in range(dim):
                diff = x[i, t] - centers[j, t]
                acc += diff * diff
                if acc > second:
                    break
            evals += 1
            if acc < best:
                second = best
                best = acc
                who = j
            elif acc < second:
                second = acc
        assign[i] = who
        upper[i] = np.sqrt(best)
        lower[i] = np.sqrt(second)
        best_sq[i] = best
    return evals


def _half_separation(centers: np.ndarray) -> np.ndarray:
    k = centers.shape[0]
    if k == 1:
        return np.full(1, np.inf)
    d2 = ((centers[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    return 0.5 * np.sqrt(d2.min(axis=1))


def assign_points(data, centers) -> tuple[np.ndarray, float]:
    """Nearest-center assignment (ties to the lowest index) and its SSE."""
    x = _as_points(data)
    c = _check_centers(centers, x.shape[0], x.shape[1])
    assign, best_d2, _ = _full_assign(x, c, need_second=False)
    return assign, float(best_d2.sum())


def compute_sse(data, assignment: np.ndarray, centers) -> float:
    """Sum of squared distances from each point to its assigned center."""
    x = _as_points(data)
    c = np.ascontiguousarray(getattr(centers, "coords", centers), dtype=np.float64)
    if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] != x.shape[1]:
        raise ValueError(f"centers must be (k, {x.shape[1]}), got {c.shape}")
    assign = np.asarray(assignment, dtype=np.int64)
    if assign.shape != (x.shape[0],):
        raise ValueError(
            f"assignment must have shape ({x.shape[0]},), got {assign.shape}"
        )
    if assign.size and (assign.min() < 0 or assign.max() >= c.shape[0]):
        raise ValueError("assignment contains ids outside 0..k-1")
    sse, _ = _sse_to_assigned(x, c, assign)
    return sse


def _finish(result: ClusteringResult) -> ClusteringResult:
    if TRACE_LOG is not None:
        TRACE_LOG.append(list(result.sse_trace))
    return result


def lloyd(data, initial_centers, config: KMeansConfig | None = None) -> ClusteringResult:
    """Naive Lloyd iteration: exhaustive assignment every pass."""
    config = config or KMeansConfig(accelerate=False)
    x = _as_points(data)
    centers = _check_centers(initial_centers, x.shape[0], x.shape[1]).copy()
    n = x.shape[0]
    k = centers.shape[0]

    assign, best_d2, _ = _full_assign(x, centers, need_second=False)
    trace = [float(best_d2.sum())]
    evals_log: list[int] = []
    converged_by = "max_iters"

    for it in range(1, config.max_iters + 1):
        if it > 1:
            assign, best_d2, _ = _full_assign(x, centers, need_second=False)
        iter_evals = n * k
        assign, centers, best_d2, _, extra, _ = _repair_empties(
            x, centers, assign, best_d2, need_second=False
        )
        iter_evals += extra
        centers = _centroids(x, assign, k, centers)
        sse_i, _ = _sse_to_assigned(x, centers, assign)
        trace.append(sse_i)
        evals_log.append(iter_evals)
        prev = trace[-2]
        rel = (prev - sse_i) / sse_i if sse_i > 0.0 else 0.0
        if rel <= config.eps:
            converged_by = "eps"
            break

    return _finish(
        ClusteringResult(
            centers=centers,
            assignment=assign,
            sse=trace[-1],
            iterations=len(trace) - 1,
            converged_by=converged_by,
            sse_trace=trace,
            distance_evals=evals_log,
        )
    )


def lloyd_accelerated(
    data, initial_centers, config: KMeansConfig | None = None
) -> ClusteringResult:
    """Lloyd iteration with exact pruning; results identical to lloyd().

    Per-point upper/lower distance bounds plus half the center-to-center
    separation let most points keep their assignment without any distance
    computation; rescanned points use per-dimension early abort.  All skip
    tests are strict inequalities backed by the triangle inequality, so
    assignments, iteration counts, and SSE traces match the naive path.
    """
    config = config or KMeansConfig()
    x = _as_points(data)
    centers = _check_centers(initial_centers, x.shape[0], x.shape[1]).copy()
    n = x.shape[0]
    k = centers.shape[0]

    assign, best_d2, second_d2 = _full_assign(x, centers, need_second=True)
    trace = [float(best_d2.sum())]
    evals_log: list[int] = []
    best_sq = best_d2.copy()
    upper = np.sqrt(best_d2)
    lower = np.sqrt(second_d2)
    converged_by = "max_iters"

    for it in range(1, config.max_iters + 1):
        if it > 1:
            s_half = _half_separation(centers)
            iter_evals = int(
                _pruned_assign(x, centers, assign, upper, lower, best_sq, s_half)
            )
        else:
            iter_evals = n * k
        counts = np.bincount(assign, minlength=k)
        if (counts == 0).any():
            # best_sq holds the exact squared distance to the assigned
            # center, which the relocation argmax needs
            assign, centers, best_d2, second_d2, extra, _ = _repair_empties(
                x, centers, assign, best_sq, need_second=True
            )
            iter_evals += extra
            best_sq = best_d2.copy()
            upper = np.sqrt(best_d2)
            lower = np.sqrt(second_d2)
        new_centers = _centroids(x, assign, k, centers)
        shift = np.sqrt(((new_centers - centers) ** 2).sum(axis=1))
        sse_i, sq = _sse_to_assigned(x, new_centers, assign)
        trace.append(sse_i)
        evals_log.append(iter_evals)
        best_sq = sq
        upper = np.sqrt(sq)  # exact against the new centers, free tighten
        lower = lower - shift.max()
        centers = new_centers
        prev = trace[-2]
        rel = (prev - sse_i) / sse_i if sse_i > 0.0 else 0.0
        if rel <= config.eps:
            converged_by = "eps"
            break

    return _finish(
        ClusteringResult(
            centers=centers,
            assignment=assign,
            sse=trace[-1],
            iterations=len(trace) - 1,
            converged_by=converged_by,
            sse_trace=trace,
            distance_evals=evals_log,
        )
    )


def cluster(data, initial_centers, config: KMeansConfig | None = None) -> ClusteringResult:
    """Dispatch to the accelerated or naive path per config.accelerate."""
    config = config or KMeansConfig()
    if config.accelerate:
        return lloyd_accelerated(data, initial_centers, config)
    return lloyd(data, initial_centers, config)

import itertools

import numpy as np
import pytest

from kmseed.kmeans import (
    ClusteringResult,
    KMeansConfig,
    assign_points,
    cluster,
    compute_sse,
    lloyd,
    lloyd_accelerated,
)


def brute_force_best_sse(x, k):
    """Minimum SSE over every assignment of points to k clusters."""
    best = np.inf
    for labels in itertools.product(range(k), repeat=len(x)):
        labels = np.array(labels)
        if len(set(labels.tolist())) < k:
            continue
        sse = 0.0
        for j in range(k):
            pts = x[labels == j]
            sse += ((pts - pts.mean(axis=0)) ** 2).sum()
        best = min(best, sse)
    return best


def test_config_validation():
    with pytest.raises(ValueError):
        KMeansConfig(eps=-1.0)
    with pytest.raises(ValueError):
        KMeansConfig(max_iters=0)
    KMeansConfig(eps=0.0)  # allowed
    KMeansConfig(eps=np.inf)  # allowed


def test_assign_points_example_and_ties():
    x = np.array([[0.0], [4.0], [10.0]])
    centers = np.array([[0.0], [10.0]])
    assign, sse = assign_points(x, centers)
    assert assign.tolist() == [0, 0, 1]  # 4 is nearer 0; would tie at 5
    assert sse == 16.0

    # exact tie -> lowest center index
    assign_tie, _ = assign_points(np.array([[5.0], [7.0]]), centers)
    assert assign_tie.tolist() == [0, 1]


def test_compute_sse_matches_manual_and_validates():
    x = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 3.0]])
    centers = np.array([[1.0, 1.0], [5.0, 5.0]])
    assign = np.array([0, 0, 0])
    manual = sum(((p - centers[0]) ** 2).sum() for p in x)
    assert compute_sse(x, assign, centers) == pytest.approx(manual, rel=1e-15)

    with pytest.raises(ValueError, match="outside"):
        compute_sse(x, np.array([0, 0, 2]), centers)
    with pytest.raises(ValueError):
        compute_sse(x, np.array([0, 0]), centers)


def test_lloyd_two_pair_example():
    x = np.array([[0.0], [2.0], [10.0], [12.0]])
    init = np.array([[1.0], [3.0]])
    res = lloyd(x, init)
    assert res.sse_trace[0] == 132.0  # 1 + 1 + 49 + 81
    assert sorted(res.centers.ravel().tolist()) == [1.0, 11.0]
    assert res.sse == 4.0
    assert res.iterations == 2
    assert res.converged_by == "eps"
    assert res.sse_trace == [132.0, 4.0, 4.0]
    assert res.iterations == len(res.sse_trace) - 1
    # this instance is small enough to check optimality outright
    assert res.sse == brute_force_best_sse(x, 2)


def test_eps_infinity_runs_exactly_one_iteration():
    x = np.array([[0.0], [2.0], [10.0], [12.0]])
    res = lloyd(x, np.array([[1.0], [3.0]]), KMeansConfig(eps=np.inf))
    assert res.iterations == 1
    assert res.converged_by == "eps"
    assert res.sse_trace == [132.0, 4.0]


def test_max_iters_cap(rng):
    x = rng.normal(size=(120, 2))  # one blob: slow, boring convergence
    init = x[:4].copy()
    res = lloyd(x, init, KMeansConfig(eps=0.0, max_iters=3))
    assert res.iterations == 3
    assert res.converged_by == "max_iters"


def test_zero_sse_terminates():
    x = np.array([[1.0, 1.0], [1.0, 1.0], [5.0, 5.0]])
    res = lloyd(x, np.array([[1.0, 1.0], [5.0, 5.0]]), KMeansConfig(eps=0.0))
    assert res.sse == 0.0
    assert res.converged_by == "eps"


def test_single_cluster():
    x = np.array([[0.0], [1.0], [2.0]])
    res = lloyd(x, np.array([[5.0]]))
    assert res.centers.tolist() == [[1.0]]
    assert res.sse == 2.0
    assert res.assignment.tolist() == [0, 0, 0]
    acc = lloyd_accelerated(x, np.array([[5.0]]))
    assert acc.sse == res.sse
    assert acc.distance_evals[1:] == [0] * (acc.iterations - 1)


def test_final_state_is_consistent(rng):
    x = rng.normal(size=(200, 3))
    init = x[rng.choice(200, 5, replace=False)]
    res = lloyd(x, init)
    # sse recomputable from centers + assignment
    assert compute_sse(x, res.assignment, res.centers) == pytest.approx(
        res.sse, rel=1e-12
    )
    # every cluster non-empty, centers are the centroids
    counts = np.bincount(res.assignment, minlength=5)
    assert (counts > 0).all()
    for j in range(5):
        np.testing.assert_allclose(
            res.centers[j], x[res.assignment == j].mean(axis=0), rtol=1e-12, atol=1e-12
        )


def test_empty_cluster_repair_relocates_to_farthest():
    x = np.array([[0.0], [1.0], [2.0], [100.0]])
    init = np.array([[40.0], [200.0]])  # second center captures nothing
    res = lloyd(x, init)
    counts = np.bincount(res.assignment, minlength=2)
    assert (counts > 0).all()
    assert sorted(res.centers.ravel().tolist()) == [1.0, 100.0]
    # iteration 1 needed an extra full pass for the repair
    assert res.distance_evals[0] == 2 * 4 * 2
    acc = lloyd_accelerated(x, init)
    assert (acc.assignment == res.assignment).all()
    assert acc.sse == res.sse


def test_validation_errors(rng):
    x = rng.normal(size=(5, 2))
    with pytest.raises(ValueError):
        lloyd(x, rng.normal(size=(6, 2)))  # k > n
    with pytest.raises(ValueError):
        lloyd(x, rng.normal(size=(2, 3)))  # dim mismatch
    with pytest.raises(ValueError):
        lloyd(np.empty((0, 2)), rng.normal(size=(1, 2)))


def test_naive_distance_evals_are_full_passes(rng):
    x = rng.normal(size=(60, 2))
    init = x[:3].copy()
    res = lloyd(x, init)
    assert all(ev == 60 * 3 for ev in res.distance_evals)


def _random_instance(rs):
    n = int(rs.integers(40, 400))
    d = int(rs.integers(1, 6))
    k = int(rs.integers(2, 9))
    centers = rs.uniform(0, 10, size=(k, d))
    x = centers[rs.integers(0, k, size=n)] + rs.normal(size=(n, d))
    init = x[rs.choice(n, k, replace=False)]
    return x, init


def test_accelerated_identical_to_naive_on_random_instances():
    for seed in range(20):
        rs = np.random.default_rng(seed)
        x, init = _random_instance(rs)
        a = lloyd(x, init)
        b = lloyd_accelerated(x, init)
        assert (a.assignment == b.assignment).all(), f"seed {seed}"
        assert a.iterations == b.iterations, f"seed {seed}"
        assert a.sse_trace == b.sse_trace, f"seed {seed}"
        assert (a.centers == b.centers).all(), f"seed {seed}"


def test_accelerated_prunes_after_first_iteration():
    rs = np.random.default_rng(99)
    centers = rs.uniform(0, 30, size=(6, 3))
    x = centers[rs.integers(0, 6, size=2000)] + rs.normal(size=(2000, 3))
    init = x[rs.choice(2000, 6, replace=False)]
    naive = lloyd(x, init)
    acc = lloyd_accelerated(x, init)
    assert acc.iterations == naive.iterations
    assert acc.distance_evals[0] == 2000 * 6
    assert all(ev < 2000 * 6 for ev in acc.distance_evals[1:])


def test_cluster_dispatches_on_config():
    x = np.array([[0.0], [2.0], [10.0], [12.0]])
    init = np.array([[1.0], [3.0]])
    naive = cluster(x, init, KMeansConfig(accelerate=False))
    fast = cluster(x, init, KMeansConfig(accelerate=True))
    assert isinstance(naive, ClusteringResult)
    assert naive.sse == fast.sse == 4.0


def test_accepts_dataset_and_centers_objects():
    from kmseed.data import DataSet
    from kmseed.seeding import Centers

    ds = DataSet([[0.0], [2.0], [10.0], [12.0]])
    c = Centers([[1.0], [3.0]], method="manual")
    res = lloyd(ds, c)
    assert res.sse == 4.0

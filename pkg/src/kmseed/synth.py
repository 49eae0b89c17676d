"""Synthetic Gaussian mixtures with a clustering-difficulty score.

Mixtures are equal-weight spherical unit-variance Gaussians whose centers
are rejection-sampled to keep a minimum pairwise separation; the data is
then min-max scaled into the unit box (true centers transformed
identically).  Difficulty is scored by running the clustering phase from
the true centers and averaging three agreement gaps against the true
labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import DataSet, minmax_params, save_csv
from .kmeans import KMeansConfig, cluster
from .seeding import Centers
from .validity import adjusted_rand, contingency, van_dongen, variation_of_information

__all__ = [
    "MixtureSpec",
    "ComplexityScore",
    "generate_mixture",
    "complexity_score",
    "classify_complexity",
    "write_mixture",
]

_PLACEMENT_TRIES = 200
_PLACEMENT_RESTARTS = 50


@dataclass(frozen=True)
class MixtureSpec:
    """Shape of a synthetic mixture: points, dimensions, components,
    center separation (in units of the component sigma=1), and seed."""

    n_points: int
    n_dims: int
    n_clusters: int
    separation: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_points < 1:
            raise ValueError(f"n_points must be >= 1, got {self.n_points}")
        if self.n_dims < 1:
            raise ValueError(f"n_dims must be >= 1, got {self.n_dims}")
        if not 1 <= self.n_clusters <= self.n_points:
            raise ValueError(
                f"need 1 <= n_clusters <= n_points, got {self.n_clusters}"
            )
        if not self.separation > 0.0:
            raise ValueError(f"separation must be > 0, got {self.separation}")


@dataclass(frozen=True)
class ComplexityScore:
    """Difficulty of recovering the true labels from the true centers.

    components are the three [0, 1] disagreement terms (inverted adjusted
    Rand, van Dongen, normalized variation of information); score is their
    mean and label the thresholded class.
    """

    score: float
    label: str  # "easy" | "moderate" | "difficult"
    components: tuple[float, float, float]


def classify_complexity(score: float) -> str:
    """Map a [0, 1] difficulty score to its class; intervals closed above
    (0.25 is easy, 0.5 is moderate)."""
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score must be in [0, 1], got {score}")
    if score <= 0.25:
        return "easy"
    if score <= 0.5:
        return "moderate"
    return "difficult"


def _place_centers(spec: MixtureSpec, rng: np.random.Generator) -> np.ndarray:
    """Rejection-sample component centers with pairwise distance >=
    separation, inside a box sized to make that feasible."""
    k, d, sep = spec.n_clusters, spec.n_dims, spec.separation
    side = sep * (np.ceil(k ** (1.0 / d)) + 1.0)
    for _ in range(_PLACEMENT_RESTARTS):
        centers: list[np.ndarray] = []
        for _ in range(k):
            for _ in range(_PLACEMENT_TRIES):
                cand = rng.uniform(0.0, side, size=d)
                if all(np.linalg.norm(cand - c) >= sep for c in centers):
                    centers.append(cand)
                    break
            else:
                break  # this restart failed to place every center
        if len(centers) == k:
            return np.stack(centers)
    raise ValueError(
        f"could not place {k} centers at separation {sep} in {d} dims; "
        "reduce separation or n_clusters"
    )


def generate_mixture(spec: MixtureSpec) -> tuple[DataSet, Centers]:
    """Draw a labeled mixture and its true centers, both scaled into the
    unit box.

    Component sizes are equal-weight multinomial except that each component
    is guaranteed at least one point (so the label invariant of DataSet
    holds); the remainder is uniform and the order shuffled.  Same spec,
    same output, bit for bit.
    """
    rng = np.random.default_rng(spec.seed)
    raw_centers = _place_centers(spec, rng)

    comp = np.concatenate(
        [
            np.arange(spec.n_clusters),
            rng.integers(0, spec.n_clusters, size=spec.n_points - spec.n_clusters),
        ]
    )
    rng.shuffle(comp)
    points = raw_centers[comp] + rng.standard_normal((spec.n_points, spec.n_dims))

    mins, rngs = minmax_params(points)
    scaled = (points - mins) / rngs
    true_centers = (raw_centers - mins) / rngs

    name = (
        f"mixture-k{spec.n_clusters}-n{spec.n_points}-d{spec.n_dims}"
        f"-s{spec.separation:g}-seed{spec.seed}"
    )
    ds = DataSet(scaled, comp, name=name)
    return ds, Centers(true_centers, method="mixture", seed=spec.seed)


def complexity_score(
    data: DataSet,
    true_centers: Centers | np.ndarray,
    config: KMeansConfig | None = None,
) -> ComplexityScore:
    """Score how hard a labeled dataset is to cluster: run the clustering
    phase from the true centers and average the disagreement of the result
    with the true labels over three indices, each clamped to [0, 1]."""
    if data.labels is None:
        raise ValueError("complexity scoring needs a labeled dataset")
    k = data.n_classes
    if k < 2:
        raise ValueError("complexity scoring needs at least 2 classes")
    coords = getattr(true_centers, "coords", true_centers)
    if coords.shape[0] != k:
        raise ValueError(
            f"true_centers has {coords.shape[0]} rows, expected n_classes={k}"
        )
    res = cluster(data.points, coords, config or KMeansConfig())
    table = contingency(data.labels, res.assignment)
    inv_rand = min(max(1.0 - adjusted_rand(table), 0.0), 1.0)
    vd = min(max(van_dongen(table), 0.0), 1.0)
    vi = variation_of_information(table)
    score = (inv_rand + vd + vi) / 3.0
    return ComplexityScore(
        score=score, label=classify_complexity(score), components=(inv_rand, vd, vi)
    )


def write_mixture(
    data: DataSet,
    spec: MixtureSpec,
    csv_path: str | Path,
    score: ComplexityScore | None = None,
) -> Path:
    """Serialize a generated mixture to CSV (labels last) plus a JSON
    sidecar recording the spec, seed, and difficulty.  Returns the sidecar
    path."""
    csv_path = Path(csv_path)
    save_csv(data, csv_path)
    meta = {
        "name": data.name,
        "n_points": spec.n_points,
        "n_dims": spec.n_dims,
        "n_clusters": spec.n_clusters,
        "separation": spec.separation,
        "seed": spec.seed,
    }
    if score is not None:
        meta["complexity"] = score.score
        meta["complexity_class"] = score.label
    sidecar = csv_path.with_suffix(csv_path.suffix + ".meta.json")
    sidecar.write_text(json.dumps(meta, indent=2) + "\n")
    return sidecar

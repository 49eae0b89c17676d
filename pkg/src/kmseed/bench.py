"""Experiment harness: repeated seeded runs, summary statistics, rank
tests, and report emission.

A run is one seeding followed by one clustering to convergence.  Every run
draws its RNG from a splittable seed stream keyed by (dataset, method,
run), so any subset of the experiment can be reproduced independently and
the schedule order never matters.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import DataSet, load_csv, minmax_normalize
from .kmeans import KMeansConfig, cluster
from .seeding import DETERMINISTIC_METHODS, METHODS, InitConfig, initialize
from .stats import (
    PairwiseZ,
    PosthocResult,
    RankTable,
    TestOutcome,
    bergmann_hommel,
    friedman,
    holm,
    iman_davenport,
    pairwise_pvalues,
    rank_blocks,
)
from .synth import MixtureSpec, generate_mixture
from .validity import adjusted_rand, contingency, van_dongen, variation_of_information

__all__ = [
    "CRITERIA",
    "LABEL_CRITERIA",
    "ExperimentConfig",
    "RunRecord",
    "CriterionStats",
    "RunStats",
    "ReportBundle",
    "RankingReport",
    "parse_source",
    "run_experiment",
    "rank_and_test",
    "emit_report",
]

CRITERIA = (
    "initial_sse",
    "final_sse",
    "rand",
    "vd",
    "vi",
    "iterations",
    "cpu_time",
)
LABEL_CRITERIA = frozenset({"rand", "vd", "vi"})
_INTEGER_CRITERIA = frozenset({"initial_sse", "final_sse", "iterations", "cpu_time"})
_BH_MAX_TREATMENTS = 9
_CLIQUE_MAX_TREATMENTS = 16


@dataclass(frozen=True)
class ExperimentConfig:
    """What to run: data sources, methods, repetition count, and knobs.

    sources entries may be file paths, "synth:..." spec strings,
    MixtureSpec instances, or ready DataSet objects.  k=None means use each
    dataset's class count.  runs applies to stochastic methods;
    deterministic ones always run once.  generator picks the bit generator
    for the per-run streams ("pcg64" or "mt19937").
    """

    sources: tuple = ()
    methods: tuple[str, ...] = tuple(METHODS)
    runs: int = 100
    k: int | None = None
    seed: int = 0
    kmeans: KMeansConfig = field(default_factory=KMeansConfig)
    normalize: bool = True
    generator: str = "pcg64"
    alpha: float = 0.05
    # CSV loading options for path sources
    delimiter: str = ","
    has_header: bool = False
    label_column: int | str | None = "last"

    def __post_init__(self) -> None:
        if not self.sources:
            raise ValueError("at least one data source is required")
        if not self.methods:
            raise ValueError("at least one method is required")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(
                    f"unknown method {m!r}; expected one of {sorted(METHODS)}"
                )
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods must be unique")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.generator not in ("pcg64", "mt19937"):
            raise ValueError(f"generator must be pcg64 or mt19937, got {self.generator}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class RunRecord:
    """One seeding + clustering run; validity fields are None when the
    dataset has no labels."""

    run: int
    initial_sse: float
    final_sse: float
    iterations: int
    cpu_time: float
    rand: float | None = None
    vd: float | None = None
    vi: float | None = None

    def criterion(self, name: str) -> float | None:
        return getattr(self, name)


@dataclass(frozen=True)
class CriterionStats:
    minimum: float
    mean: float
    stdev: float

    def by_name(self, statistic: str) -> float:
        if statistic not in ("min", "mean", "stdev"):
            raise ValueError(f"unknown statistic {statistic!r}")
        return self.minimum if statistic == "min" else getattr(self, statistic)


@dataclass(frozen=True)
class RunStats:
    """min / mean / population-stdev per criterion over a method's runs."""

    per_criterion: dict[str, CriterionStats]

    def get(self, criterion: str) -> CriterionStats | None:
        return self.per_criterion.get(criterion)


@dataclass
class ReportBundle:
    """Everything an experiment produced, keyed by (dataset, method)."""

    datasets: list[str]
    methods: list[str]
    records: dict[tuple[str, str], list[RunRecord]]
    stats: dict[tuple[str, str], RunStats]
    k_used: dict[str, int]
    labeled: dict[str, bool]
    config: ExperimentConfig


def parse_source(text: str, base_seed: int = 0, index: int = 0):
    """Interpret a CLI data source: a "synth:k=..,n=..,d=..,sep=..[,seed=..]"
    mixture spec, or anything else as a file path.

    Unseeded synth sources get a seed derived from base_seed and their
    position, so repeated sources differ but the whole run stays
    reproducible.
    """
    if not text.startswith("synth:"):
        return text
    fields: dict[str, str] = {}
    body = text[len("synth:") :]
    for part in body.split(","):
        if not part:
            continue
        if "=" not in part:
            raise ValueError(f"bad synth field {part!r} in {text!r}")
        key, val = part.split("=", 1)
        fields[key.strip()] = val.strip()
    required = {"k", "n", "d", "sep"}
    missing = required - fields.keys()
    if missing:
        raise ValueError(f"synth spec {text!r} missing {sorted(missing)}")
    unknown = fields.keys() - required - {"seed"}
    if unknown:
        raise ValueError(f"synth spec {text!r} has unknown fields {sorted(unknown)}")
    if "seed" in fields:
        seed = int(fields["seed"])
    else:
        seed = int(
            np.random.SeedSequence(base_seed, spawn_key=(1_000_003, index))
            .generate_state(1)[0]
        )
    try:
        return MixtureSpec(
            n_points=int(fields["n"]),
            n_dims=int(fields["d"]),
            n_clusters=int(fields["k"]),
            separation=float(fields["sep"]),
            seed=seed,
        )
    except ValueError as exc:
        raise ValueError(f"bad synth spec {text!r}: {exc}") from exc


def _resolve_source(src, config: ExperimentConfig, index: int) -> DataSet:
    if isinstance(src, DataSet):
        return minmax_normalize(src) if config.normalize else src
    if isinstance(src, MixtureSpec):
        return generate_mixture(src)[0]  # generated data is already unit-box
    parsed = parse_source(str(src), base_seed=config.seed, index=index)
    if isinstance(parsed, MixtureSpec):
        return generate_mixture(parsed)[0]
    ds = load_csv(
        parsed,
        delimiter=config.delimiter,
        has_header=config.has_header,
        label_column=config.label_column,
    )
    return minmax_normalize(ds) if config.normalize else ds


def _population_stats(values: list[float]) -> CriterionStats:
    arr = np.asarray(values, dtype=np.float64)
    return CriterionStats(
        minimum=float(arr.min()),
        mean=float(arr.mean()),
        stdev=float(arr.std(ddof=0)),
    )


def _run_once(
    ds: DataSet,
    method: str,
    k: int,
    run_idx: int,
    rng: np.random.Generator,
    config: ExperimentConfig,
) -> RunRecord:
    init_cfg = InitConfig(method=method, k=k, kmeans=config.kmeans)
    t0 = time.process_time_ns()
    centers = initialize(ds.points, init_cfg, rng)
    result = cluster(ds.points, centers.coords, config.kmeans)
    t1 = time.process_time_ns()
    rand = vd = vi = None
    if ds.labels is not None and ds.n_points >= 2:
        table = contingency(ds.labels, result.assignment)
        rand = adjusted_rand(table)
        vd = van_dongen(table)
        vi = variation_of_information(table)
    return RunRecord(
        run=run_idx,
        initial_sse=result.sse_trace[0],
        final_sse=result.sse,
        iterations=result.iterations,
        cpu_time=(t1 - t0) / 1e9,
        rand=rand,
        vd=vd,
        vi=vi,
    )


# methods keep a fixed stream index regardless of which subset a config
# selects, so a smaller experiment reproduces the full grid's records
_METHOD_STREAM = {m: i for i, m in enumerate(METHODS)}


def _make_rng(config: ExperimentConfig, d_idx: int, method: str, run_idx: int):
    ss = np.random.SeedSequence(
        config.seed, spawn_key=(d_idx, _METHOD_STREAM[method], run_idx)
    )
    bitgen = np.random.PCG64(ss) if config.generator == "pcg64" else np.random.MT19937(ss)
    return np.random.Generator(bitgen)


def run_experiment(config: ExperimentConfig) -> ReportBundle:
    """Execute the full grid: every method on every dataset, runs times
    (once for deterministic methods), recording all seven criteria."""
    datasets: list[DataSet] = []
    for idx, src in enumerate(config.sources):
        datasets.append(_resolve_source(src, config, idx))
    names = [ds.name for ds in datasets]
    if len(set(names)) != len(names):
        raise ValueError(f"dataset names must be unique, got {names}")

    records: dict[tuple[str, str], list[RunRecord]] = {}
    stats: dict[tuple[str, str], RunStats] = {}
    k_used: dict[str, int] = {}
    labeled: dict[str, bool] = {}

    for d_idx, ds in enumerate(datasets):
        if config.k is not None:
            k = config.k
        elif ds.n_classes is not None:
            k = ds.n_classes
        else:
            raise ValueError(
                f"dataset {ds.name!r} has no labels; supply k explicitly"
            )
        if k > ds.n_points:
            raise ValueError(
                f"k={k} exceeds n_points={ds.n_points} for dataset {ds.name!r}"
            )
        k_used[ds.name] = k
        labeled[ds.name] = ds.labels is not None

        for method in config.methods:
            n_runs = 1 if method in DETERMINISTIC_METHODS else config.runs
            cell: list[RunRecord] = []
            for r in range(n_runs):
                rng = _make_rng(config, d_idx, method, r)
                cell.append(_run_once(ds, method, k, r, rng, config))
            records[(ds.name, method)] = cell
            per_crit: dict[str, CriterionStats] = {}
            for crit in CRITERIA:
                vals = [rec.criterion(crit) for rec in cell]
                if any(v is None for v in vals):
                    continue
                per_crit[crit] = _population_stats(vals)
            stats[(ds.name, method)] = RunStats(per_crit)

    return ReportBundle(
        datasets=names,
        methods=list(config.methods),
        records=records,
        stats=stats,
        k_used=k_used,
        labeled=labeled,
        config=config,
    )


@dataclass
class RankingReport:
    """Outcome of the rank pipeline for one criterion x statistic."""

    criterion: str
    statistic: str
    alpha: float
    rank_table: RankTable | None
    friedman: TestOutcome | None
    iman: TestOutcome | None
    pairwise: PairwiseZ | None
    posthoc: PosthocResult | None
    ordering: str
    note: str = ""


def _maximal_cliques(n: int, connected) -> list[tuple[int, ...]]:
    """All maximal cliques of a small graph, via bitmask enumeration."""
    if n > _CLIQUE_MAX_TREATMENTS:
        raise ValueError(f"too many treatments for clique enumeration: {n}")
    cliques: list[int] = []
    for mask in range(1, 1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        if all(
            connected(members[i], members[j])
            for i in range(len(members))
            for j in range(i + 1, len(members))
        ):
            cliques.append(mask)
    maximal = [
        m for m in cliques if not any(other != m and other & m == m for other in cliques)
    ]
    return [tuple(i for i in range(n) if m >> i & 1) for m in maximal]


def _ordering_string(
    methods: list[str], mean_ranks: np.ndarray, rejected: set[tuple[int, int]]
) -> str:
    """Group methods into maximal sets with no significant internal
    difference, ordered worst to best by mean rank; braces for groups of
    two or more, " < " between groups."""

    def connected(a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) not in rejected

    groups = _maximal_cliques(len(methods), connected)
    # worst first: higher mean rank = worse (rank 1 is best)
    groups.sort(key=lambda g: -float(np.mean([mean_ranks[i] for i in g])))
    parts = []
    for g in groups:
        names = [methods[i] for i in g]  # input order within a group
        parts.append(names[0] if len(names) == 1 else "{" + ", ".join(names) + "}")
    return " < ".join(parts)


def rank_and_test(
    bundle: ReportBundle,
    criterion: str,
    statistic: str = "mean",
    alpha: float | None = None,
) -> RankingReport:
    """Rank methods per dataset on one criterion/statistic, test for any
    difference (Friedman + its F form), and on significance run the
    pairwise post-hoc (Bergmann-Hommel up to 9 methods, Holm beyond)."""
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    alpha = bundle.config.alpha if alpha is None else alpha
    b = len(bundle.datasets)
    t = len(bundle.methods)
    if b < 2:
        raise ValueError(f"need at least 2 datasets to rank over, got {b}")
    if t < 2:
        raise ValueError(f"need at least 2 methods to compare, got {t}")

    values = np.empty((b, t))
    for i, ds in enumerate(bundle.datasets):
        for j, m in enumerate(bundle.methods):
            cs = bundle.stats[(ds, m)].get(criterion)
            if cs is None:
                raise ValueError(
                    f"criterion {criterion!r} unavailable for dataset {ds!r} "
                    "(no labels)"
                )
            values[i, j] = cs.by_name(statistic)

    direction = "higher_is_better" if criterion == "rand" else "lower_is_better"
    if np.all(values == values[:, :1]):
        # every method tied on every dataset: nothing to test
        return RankingReport(
            criterion=criterion,
            statistic=statistic,
            alpha=alpha,
            rank_table=None,
            friedman=None,
            iman=None,
            pairwise=None,
            posthoc=None,
            ordering="{" + ", ".join(bundle.methods) + "}",
            note="no significant differences (all values tied)",
        )

    table = rank_blocks(values, direction)
    fr = friedman(table, alpha)
    iman = iman_davenport(fr.statistic, b, t, alpha)
    if not iman.rejected:
        return RankingReport(
            criterion=criterion,
            statistic=statistic,
            alpha=alpha,
            rank_table=table,
            friedman=fr,
            iman=iman,
            pairwise=None,
            posthoc=None,
            ordering="{" + ", ".join(bundle.methods) + "}",
            note="no significant differences",
        )

    pw = pairwise_pvalues(table)
    if t <= _BH_MAX_TREATMENTS:
        ph = bergmann_hommel(pw.p, alpha)
    else:
        ph = holm(pw.p, alpha)
    ordering = _ordering_string(bundle.methods, table.mean_ranks, ph.rejected_pairs())
    note = "" if ph.rejected_pairs() else "post-hoc rejected no pairs"
    return RankingReport(
        criterion=criterion,
        statistic=statistic,
        alpha=alpha,
        rank_table=table,
        friedman=fr,
        iman=iman,
        pairwise=pw,
        posthoc=ph,
        ordering=ordering,
        note=note,
    )


def _round_half_up(v: float) -> int:
    return int(np.floor(v + 0.5))


def _fmt_value(value: float, criterion: str) -> str:
    if criterion in _INTEGER_CRITERIA:
        return str(_round_half_up(value))
    return f"{value:.3f}"


def _fmt_cpu(value: float) -> str:
    # CPU time tables are in milliseconds, rounded to integers
    return str(_round_half_up(value * 1e3))


def _cell_text(cs: CriterionStats, criterion: str, row: str) -> str:
    fmt = _fmt_cpu if criterion == "cpu_time" else lambda v: _fmt_value(v, criterion)
    if row == "min":
        return fmt(cs.minimum)
    return f"{fmt(cs.mean)}±{fmt(cs.stdev)}"


def _sanitize(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", name)


def _write_table(
    path: Path, header: list[str], rows: list[list[str]], fmt: str
) -> None:
    lines: list[str] = []
    if fmt == "markdown":
        lines.append("| " + " | ".join(header) + " |")
        lines.append("| " + " | ".join("---" for _ in header) + " |")
        for r in rows:
            lines.append("| " + " | ".join(r) + " |")
    else:
        lines.append(",".join(header))
        for r in rows:
            lines.append(",".join(r))
    path.write_text("\n".join(lines) + "\n")


def emit_report(
    bundle: ReportBundle,
    out_dir: str | Path,
    fmt: str = "csv",
    statistics: tuple[str, ...] = ("min", "mean", "stdev"),
) -> list[Path]:
    """Write summary tables (per criterion: a min row and a mean±stdev row
    per dataset), ranking files (per statistic), and raw per-run CSVs.

    Output is byte-deterministic for a given bundle: fixed iteration
    order, fixed number formatting, no timestamps.  Returns the paths
    written.
    """
    if fmt not in ("csv", "markdown"):
        raise ValueError(f"format must be csv or markdown, got {fmt!r}")
    if not bundle.datasets or not bundle.methods:
        raise ValueError("cannot emit a report for an empty bundle")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = "md" if fmt == "markdown" else "csv"
    written: list[Path] = []

    all_labeled = all(bundle.labeled[ds] for ds in bundle.datasets)
    criteria = [c for c in CRITERIA if all_labeled or c not in LABEL_CRITERIA]

    for crit in criteria:
        header = ["dataset", "row", *bundle.methods]
        rows: list[list[str]] = []
        for ds in bundle.datasets:
            for row_kind in ("min", "mean"):
                cells = [
                    _cell_text(bundle.stats[(ds, m)].per_criterion[crit], crit, row_kind)
                    for m in bundle.methods
                ]
                rows.append([ds, row_kind if row_kind == "min" else "mean±stdev", *cells])
        path = out_dir / f"{crit}.{ext}"
        _write_table(path, header, rows, fmt)
        written.append(path)

    if len(bundle.datasets) >= 2 and len(bundle.methods) >= 2:
        for stat in statistics:
            header = ["criterion", "ordering", "iman_davenport_p", "note"]
            rows = []
            for crit in criteria:
                rep = rank_and_test(bundle, crit, stat)
                p_text = "" if rep.iman is None else f"{rep.iman.p_value:.3e}"
                rows.append([crit, rep.ordering, p_text, rep.note])
            path = out_dir / f"rankings_{stat}.{ext}"
            _write_table(path, header, rows, fmt)
            written.append(path)

    for ds in bundle.datasets:
        for m in bundle.methods:
            recs = bundle.records[(ds, m)]
            path = out_dir / f"raw_{_sanitize(ds)}_{m}.csv"
            lines = ["run,initial_sse,final_sse,rand,vd,vi,iterations,cpu_time"]
            for rec in recs:
                lines.append(
                    ",".join(
                        [
                            str(rec.run),
                            repr(rec.initial_sse),
                            repr(rec.final_sse),
                            "" if rec.rand is None else repr(rec.rand),
                            "" if rec.vd is None else repr(rec.vd),
                            "" if rec.vi is None else repr(rec.vi),
                            str(rec.iterations),
                            repr(rec.cpu_time),
                        ]
                    )
                )
            path.write_text("\n".join(lines) + "\n")
            written.append(path)

    return written

"""Seeding methods for k-means, with a benchmark harness and rank-based
significance tests.

The package splits into: data handling (`data`), synthetic mixtures and
difficulty scoring (`synth`), the eight seeding methods (`seeding`), the
clustering phase in naive and accelerated forms (`kmeans`), external
validity indices (`validity`), rank statistics (`stats`), and the
experiment harness (`bench`, `cli`).
"""

from .bench import (
    CRITERIA,
    ExperimentConfig,
    RankingReport,
    ReportBundle,
    RunRecord,
    RunStats,
    emit_report,
    rank_and_test,
    run_experiment,
)
from .data import DataSet, load_csv, minmax_normalize, save_csv
from .kmeans import (
    ClusteringResult,
    KMeansConfig,
    assign_points,
    cluster,
    compute_sse,
    lloyd,
    lloyd_accelerated,
)
from .seeding import (
    METHODS,
    Centers,
    InitConfig,
    bradley_fayyad,
    forgy,
    greedy_kmeanspp,
    initialize,
    kmeanspp,
    macqueen_random,
    maximin,
    pca_part,
    var_part,
)
from .stats import (
    PosthocResult,
    RankTable,
    TestOutcome,
    bergmann_hommel,
    friedman,
    holm,
    iman_davenport,
    pairwise_pvalues,
    rank_blocks,
    stirling2,
)
from .synth import (
    ComplexityScore,
    MixtureSpec,
    classify_complexity,
    complexity_score,
    generate_mixture,
    write_mixture,
)
from .validity import (
    ContingencyTable,
    adjusted_rand,
    contingency,
    van_dongen,
    variation_of_information,
)

__version__ = "0.1.0"

__all__ = [
    "CRITERIA",
    "Centers",
    "ClusteringResult",
    "ComplexityScore",
    "ContingencyTable",
    "DataSet",
    "ExperimentConfig",
    "InitConfig",
    "KMeansConfig",
    "METHODS",
    "MixtureSpec",
    "PosthocResult",
    "RankTable",
    "RankingReport",
    "ReportBundle",
    "RunRecord",
    "RunStats",
    "TestOutcome",
    "adjusted_rand",
    "assign_points",
    "bergmann_hommel",
    "bradley_fayyad",
    "classify_complexity",
    "cluster",
    "complexity_score",
    "compute_sse",
    "contingency",
    "emit_report",
    "forgy",
    "friedman",
    "generate_mixture",
    "greedy_kmeanspp",
    "holm",
    "iman_davenport",
    "initialize",
    "kmeanspp",
    "lloyd",
    "lloyd_accelerated",
    "load_csv",
    "macqueen_random",
    "maximin",
    "minmax_normalize",
    "pairwise_pvalues",
    "pca_part",
    "rank_and_test",
    "rank_blocks",
    "run_experiment",
    "save_csv",
    "stirling2",
    "van_dongen",
    "var_part",
    "variation_of_information",
    "write_mixture",
]

"""Command line front end for the benchmark harness."""

from __future__ import annotations

import argparse
import sys

from .bench import (
    CRITERIA,
    LABEL_CRITERIA,
    ExperimentConfig,
    emit_report,
    rank_and_test,
    run_experiment,
)
from .kmeans import KMeansConfig

# short CLI names -> internal method ids, in canonical order
METHOD_ALIASES: dict[str, str] = {
    "forgy": "forgy",
    "macqueen": "macqueen",
    "maximin": "maximin",
    "bf": "bradley_fayyad",
    "kmeanspp": "kmeanspp",
    "greedy": "greedy_kmeanspp",
    "varpart": "var_part",
    "pcapart": "pca_part",
}


def _parse_methods(text: str) -> tuple[str, ...]:
    if text.strip() == "all":
        return tuple(METHOD_ALIASES.values())
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok not in METHOD_ALIASES:
            raise argparse.ArgumentTypeError(
                f"unknown method {tok!r}; choose from "
                f"{', '.join(METHOD_ALIASES)} or 'all'"
            )
        out.append(METHOD_ALIASES[tok])
    if not out:
        raise argparse.ArgumentTypeError("no methods given")
    return tuple(out)


def _parse_k(text: str) -> int | None:
    if text.strip() == "auto":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"k must be an integer or 'auto', got {text!r}"
        ) from None


def _parse_label_column(text: str) -> int | str | None:
    t = text.strip()
    if t == "none":
        return None
    if t == "last":
        return "last"
    try:
        return int(t)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"label column must be an integer, 'last', or 'none', got {text!r}"
        ) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kmseed",
        description=(
            "Benchmark k-means seeding methods: repeated seeded runs per "
            "dataset, summary tables, and rank-based significance tests."
        ),
    )
    p.add_argument(
        "--data",
        action="append",
        required=True,
        metavar="PATH|SPEC",
        help=(
            "data source; repeatable. A CSV path, or a synthetic mixture "
            "spec like synth:k=4,n=1024,d=2,sep=4[,seed=7]"
        ),
    )
    p.add_argument(
        "--methods",
        type=_parse_methods,
        default=tuple(METHOD_ALIASES.values()),
        help=(
            "comma list of methods (forgy, macqueen, maximin, bf, kmeanspp, "
            "greedy, varpart, pcapart) or 'all' (default)"
        ),
    )
    p.add_argument(
        "--k",
        type=_parse_k,
        default=None,
        help="cluster count, or 'auto' to use each dataset's class count (default)",
    )
    p.add_argument("--runs", type=int, default=100, help="runs per stochastic method")
    p.add_argument("--seed", type=int, default=0, help="base seed for the run streams")
    p.add_argument("--max-iters", type=int, default=100, help="clustering iteration cap")
    p.add_argument(
        "--eps",
        type=float,
        default=1e-6,
        help="relative SSE improvement threshold for convergence",
    )
    p.add_argument(
        "--no-normalize",
        action="store_true",
        help="skip min-max scaling of loaded datasets",
    )
    p.add_argument(
        "--naive",
        action="store_true",
        help="use the exhaustive assignment path instead of the accelerated one",
    )
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument(
        "--format", choices=("csv", "markdown"), default="csv", help="report format"
    )
    p.add_argument("--out", default=None, metavar="DIR", help="directory for report files")
    p.add_argument(
        "--label-column",
        type=_parse_label_column,
        default="last",
        help="label column of CSV sources: index, 'last' (default), or 'none'",
    )
    p.add_argument("--delimiter", default=",", help="CSV delimiter (default ',')")
    p.add_argument(
        "--header", action="store_true", help="CSV sources have a header row"
    )
    p.add_argument(
        "--rng",
        choices=("pcg64", "mt19937"),
        default="pcg64",
        help="bit generator for the per-run streams",
    )
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ExperimentConfig(
            sources=tuple(args.data),
            methods=args.methods,
            runs=args.runs,
            k=args.k,
            seed=args.seed,
            kmeans=KMeansConfig(
                eps=args.eps, max_iters=args.max_iters, accelerate=not args.naive
            ),
            normalize=not args.no_normalize,
            generator=args.rng,
            alpha=args.alpha,
            delimiter=args.delimiter,
            has_header=args.header,
            label_column=args.label_column,
        )
        bundle = run_experiment(config)

        all_labeled = all(bundle.labeled[ds] for ds in bundle.datasets)
        shown = [c for c in CRITERIA if all_labeled or c not in LABEL_CRITERIA]
        for ds in bundle.datasets:
            print(f"dataset {ds} (k={bundle.k_used[ds]})")
            for m in bundle.methods:
                st = bundle.stats[(ds, m)]
                bits = []
                for crit in shown:
                    cs = st.get(crit)
                    if cs is not None:
                        bits.append(f"{crit}: min {cs.minimum:.6g} mean {cs.mean:.6g}")
                print(f"  {m:18s} " + "  ".join(bits))
        if len(bundle.datasets) >= 2 and len(bundle.methods) >= 2:
            print("rankings on mean values (worst < best):")
            for crit in shown:
                rep = rank_and_test(bundle, crit, "mean")
                tail = f"  [{rep.note}]" if rep.note else ""
                print(f"  {crit:12s} {rep.ordering}{tail}")
        if args.out is not None:
            paths = emit_report(bundle, args.out, fmt=args.format)
            print(f"wrote {len(paths)} files to {args.out}")
    except (ValueError, OSError) as exc:
        print(f"kmseed: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``caseminer {mine,extract,cluster,report,all,synth}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from caseminer import pipeline
from caseminer.errors import ValidationError


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, help="INI config file; flags override it")
    p.add_argument("-v", "--verbose", action="count", default=0)

    io = p.add_argument_group("inputs and artifacts")
    io.add_argument("--cases", type=Path, help="directory of case files")
    io.add_argument("--parses", type=Path, help="CoNLL-U parses of the candidate clauses")
    io.add_argument("--out-dir", type=Path, help="where artifacts go (default ./caseminer-out)")
    io.add_argument("--annotation", type=Path, help="cluster annotation JSON")
    io.add_argument("--gold-labels", type=Path, help="CSV case_id,factor_code")
    io.add_argument("--taxonomy", type=Path, help="factor taxonomy JSON (default: bundled)")
    for key in pipeline.ARTIFACTS:
        io.add_argument("--" + key.replace("_", "-"), type=Path, dest=key, help=argparse.SUPPRESS)
    io.add_argument(
        "--emit-curve", nargs="?", const=True, default=None, metavar="CSV",
        help="write the (eps, cluster count) sweep curves; optional output path",
    )

    m = p.add_argument_group("phrase mining")
    m.add_argument("--sections", type=lambda s: tuple(x for x in s.split(",") if x))
    m.add_argument("--tokenizer", choices=("chars", "whitespace"))
    m.add_argument("--min-count", type=int)
    m.add_argument("--top-k", type=int)
    m.add_argument("--rounds", type=int)
    m.add_argument("--score-threshold", type=float)

    e = p.add_argument_group("extraction and similarity")
    e.add_argument("--reverse-labels", type=lambda s: tuple(x for x in s.split(",") if x))
    e.add_argument("--metric", dest="metric_kind", choices=("raw", "offset_normalized"))

    c = p.add_argument_group("clustering")
    c.add_argument("--min-pts", type=int)
    c.add_argument("--eps-lo", type=float)
    c.add_argument("--eps-hi", type=float)
    c.add_argument("--eps-step", type=float)
    c.add_argument("--max-rounds", type=int)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="caseminer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "mine": "clean and segment cases, mine phrases, write the user lexicon and clause list",
        "extract": "apply the extraction rules to parses; write candidate sets and the distance matrix",
        "cluster": "multi-density DBSCAN over the distance matrix",
        "report": "keyphrase sets, recall and co-occurrence reports",
        "all": "run mine, extract, cluster and report in order",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    synth = sub.add_parser("synth", help="write the synthetic planted-fact fixture")
    synth.add_argument("--out", type=Path, required=True)
    synth.add_argument("--seed", type=int, default=7)
    synth.add_argument("--clauses", type=int, default=300)
    synth.add_argument("--cases", type=int, default=40)
    return parser


def config_from_args(args: argparse.Namespace) -> pipeline.PipelineConfig:
    overrides = pipeline.load_config(args.config) if args.config else {}
    keys = [
        "cases", "parses", "out_dir", "annotation", "gold_labels", "taxonomy", *pipeline.ARTIFACTS,
        "sections", "tokenizer", "min_count", "top_k", "rounds", "score_threshold",
        "reverse_labels", "metric_kind", "min_pts", "eps_lo", "eps_hi", "eps_step", "max_rounds",
    ]
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if args.emit_curve is not None:
        overrides["emit_curve"] = True
        if args.emit_curve is not True:
            overrides["curve_out"] = Path(args.emit_curve)
    return pipeline.make_config(overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(getattr(args, "verbose", 0), 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "synth":
        from caseminer.synthetic import make_corpus, write_fixture

        write_fixture(make_corpus(seed=args.seed, n_clauses=args.clauses, n_cases=args.cases), args.out)
        return 0
    try:
        cfg = config_from_args(args)
    except (OSError, ValidationError, ValueError) as exc:
        print(f"caseminer: config: {exc}", file=sys.stderr)
        return 2
    try:
        pipeline.run_pipeline(cfg, args.command)
    except pipeline.StageError as exc:
        print(f"caseminer: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

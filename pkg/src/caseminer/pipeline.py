"""Stage orchestration: mine -> extract -> cluster -> report.

Every stage reads its inputs from disk and writes its artifacts to disk, so
stages can be run one at a time or all together with identical results.
"""
from __future__ import annotations

import configparser
import csv
import json
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from caseminer import analysis, clustering, corpus, extraction, phrase_mining, similarity
from caseminer.errors import ValidationError

log = logging.getLogger(__name__)

STAGES = ("mine", "extract", "cluster", "report")

ARTIFACTS = {
    "lexicon_out": "lexicon.txt",
    "clauses_out": "clauses.tsv",
    "candidates_out": "candidates.jsonl",
    "matrix_out": "matrix.npz",
    "clusters_out": "clusters.json",
    "curve_out": "curve.csv",
    "keyphrases_out": "keyphrases.jsonl",
    "recall_out": "recall.csv",
    "cooccurrence_out": "cooccurrence.csv",
    "report_out": "report.json",
}


class StageError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass
class PipelineConfig:
    cases: Path | None = None
    parses: Path | None = None
    out_dir: Path = Path("caseminer-out")
    annotation: Path | None = None
    gold_labels: Path | None = None
    taxonomy: Path | None = None
    lexicon_out: Path | None = None
    clauses_out: Path | None = None
    candidates_out: Path | None = None
    matrix_out: Path | None = None
    clusters_out: Path | None = None
    curve_out: Path | None = None
    keyphrases_out: Path | None = None
    recall_out: Path | None = None
    cooccurrence_out: Path | None = None
    report_out: Path | None = None
    emit_curve: bool = False
    sections: tuple[str, ...] = corpus.DEFAULT_EXTRACT_SECTIONS
    tokenizer: str = "chars"
    mining: phrase_mining.MiningConfig = field(default_factory=phrase_mining.MiningConfig)
    reverse_labels: tuple[str, ...] = tuple(sorted(extraction.DEFAULT_REVERSE_LABELS))
    metric_kind: str = "offset_normalized"
    clustering: clustering.ClusteringConfig = field(default_factory=clustering.ClusteringConfig)

    def path(self, key: str) -> Path:
        explicit = getattr(self, key)
        return Path(explicit) if explicit is not None else Path(self.out_dir) / ARTIFACTS[key]

    def validate(self) -> None:
        unknown = set(self.sections) - set(corpus.SECTION_KINDS)
        if unknown:
            raise ValidationError(f"unknown sections {sorted(unknown)}")
        if self.metric_kind not in similarity.METRIC_KINDS:
            raise ValidationError(f"unknown metric {self.metric_kind!r}")
        if self.tokenizer not in ("chars", "whitespace"):
            raise ValidationError(f"unknown tokenizer {self.tokenizer!r}")
        self.clustering.validate(self.metric_kind)


_PATH_KEYS = {f.name for f in fields(PipelineConfig) if f.name in ARTIFACTS} | {
    "cases", "parses", "out_dir", "annotation", "gold_labels", "taxonomy",
}


def _csv_tuple(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def _opt_int(value: str) -> int | None:
    return None if value.strip().lower() in ("", "none") else int(value)


def _opt_float(value: str) -> float | None:
    return None if value.strip().lower() in ("", "none") else float(value)


def load_config(path: str | Path) -> dict:
    """Read an INI config into a flat dict of PipelineConfig overrides.

    Relative paths are resolved against the config file's directory.
    """
    path = Path(path)
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    base = path.parent
    out: dict = {}
    known = {
        "paths": _PATH_KEYS,
        "corpus": {"sections", "tokenizer"},
        "mining": {"min_count", "top_k", "rounds", "score_threshold"},
        "extraction": {"reverse_labels"},
        "similarity": {"metric"},
        "clustering": {"min_pts", "eps_lo", "eps_hi", "eps_step", "max_rounds", "emit_curve"},
    }
    for section in parser.sections():
        if section not in known:
            raise ValidationError(f"{path}: unknown section [{section}]")
        extra = set(parser[section]) - known[section]
        if extra:
            raise ValidationError(f"{path}: unknown keys in [{section}]: {sorted(extra)}")
    if parser.has_section("paths"):
        for key, value in parser["paths"].items():
            p = Path(value)
            out[key] = p if p.is_absolute() else base / p
    sec = parser["corpus"] if parser.has_section("corpus") else {}
    if "sections" in sec:
        out["sections"] = _csv_tuple(sec["sections"])
    if "tokenizer" in sec:
        out["tokenizer"] = sec["tokenizer"].strip()
    sec = parser["mining"] if parser.has_section("mining") else {}
    for key, conv in (("min_count", int), ("top_k", _opt_int), ("rounds", int), ("score_threshold", _opt_float)):
        if key in sec:
            out[key] = conv(sec[key])
    if parser.has_section("extraction") and "reverse_labels" in parser["extraction"]:
        out["reverse_labels"] = _csv_tuple(parser["extraction"]["reverse_labels"])
    if parser.has_section("similarity") and "metric" in parser["similarity"]:
        out["metric_kind"] = parser["similarity"]["metric"].strip()
    if parser.has_section("clustering"):
        sec = parser["clustering"]
        for key, conv in (("min_pts", int), ("eps_lo", float), ("eps_hi", float), ("eps_step", float), ("max_rounds", int)):
            if key in sec:
                out[key] = conv(sec[key])
        if "emit_curve" in sec:
            out["emit_curve"] = sec.getboolean("emit_curve")
    return out


def make_config(overrides: dict) -> PipelineConfig:
    """Build a PipelineConfig from flat keys (config-file and CLI names)."""
    cfg = PipelineConfig()
    flat = {k: v for k, v in overrides.items() if v is not None}
    mining = {k: flat.pop(k) for k in ("min_count", "top_k", "rounds", "score_threshold") if k in flat}
    if mining:
        cfg.mining = replace(cfg.mining, **mining)
    cl = {}
    for key in ("min_pts", "eps_step", "max_rounds"):
        if key in flat:
            cl[key] = flat.pop(key)
    lo, hi = cfg.clustering.eps_range
    if "eps_lo" in flat or "eps_hi" in flat:
        cl["eps_range"] = (float(flat.pop("eps_lo", lo)), float(flat.pop("eps_hi", hi)))
    if cl:
        cfg.clustering = replace(cfg.clustering, **cl)
    for key, value in flat.items():
        if not hasattr(cfg, key):
            raise ValidationError(f"unknown config key {key!r}")
        setattr(cfg, key, Path(value) if key in _PATH_KEYS else value)
    cfg.validate()
    return cfg


def _need(stage: str, path: Path | None, what: str) -> Path:
    if path is None:
        raise StageError(stage, f"no {what} given")
    if not Path(path).exists():
        raise StageError(stage, f"{what} not found: {path}")
    return Path(path)


def _load_cases(stage: str, cfg: PipelineConfig) -> corpus.CaseLoad:
    loaded = corpus.load_cases(_need(stage, cfg.cases, "case directory"))
    if not loaded.cases:
        raise StageError(stage, f"no valid case files in {cfg.cases}")
    return loaded


def run_mine(cfg: PipelineConfig) -> dict:
    loaded = _load_cases("mine", cfg)
    clauses = [c for case in loaded.cases for c in corpus.case_clauses(case, cfg.sections)]
    if not clauses:
        raise StageError("mine", f"no clauses in sections {list(cfg.sections)}")
    tokens = [t for t in (corpus.tokenize(c.text, cfg.tokenizer) for c in clauses) if t]
    lexicon = phrase_mining.mine_phrases(tokens, cfg.mining)
    phrase_mining.export_user_lexicon(lexicon, cfg.path("lexicon_out"))
    with open(cfg.path("clauses_out"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        for c in clauses:
            w.writerow([extraction.format_clause_ref(c.ref), c.text])
    log.info("mine: %d cases, %d clauses, %d phrases", len(loaded.cases), len(clauses), len(lexicon.entries))
    return {"cases": len(loaded.cases), "clauses": len(clauses), "phrases": len(lexicon.entries)}


def run_extract(cfg: PipelineConfig) -> dict:
    parses = extraction.load_parses(_need("extract", cfg.parses, "parse file"))
    wanted = set(cfg.sections)
    ecfg = extraction.ExtractionConfig(reverse_labels=frozenset(cfg.reverse_labels))
    sets = [extraction.extract_candidate_set(p, config=ecfg) for p in parses if p.clause_ref[1] in wanted]
    if not sets:
        raise StageError("extract", f"no parses for sections {sorted(wanted)} in {cfg.parses}")
    ids = [s.id for s in sets]
    if len(set(ids)) != len(ids):
        dup = next(i for i in ids if ids.count(i) > 1)
        raise StageError("extract", f"{cfg.parses}: duplicate clause_ref {dup}")
    extraction.write_candidate_sets(sets, cfg.path("candidates_out"))
    matrix = similarity.build_matrix(sets, cfg.metric_kind)
    matrix.save(cfg.path("matrix_out"))
    log.info("extract: %d candidate sets", len(sets))
    return {"candidate_sets": len(sets)}


def run_cluster(cfg: PipelineConfig) -> dict:
    matrix = similarity.DistanceMatrix.load(_need("cluster", cfg.path("matrix_out"), "distance matrix"))
    sets = extraction.read_candidate_sets(_need("cluster", cfg.path("candidates_out"), "candidate sets file"))
    rendered = {s.id: s.render() for s in sets}
    if set(matrix.items) != set(rendered):
        raise StageError("cluster", f"{cfg.path('matrix_out')} does not match {cfg.path('candidates_out')}")
    if matrix.metric_kind != cfg.metric_kind:
        raise StageError("cluster", f"matrix metric {matrix.metric_kind!r} differs from configured {cfg.metric_kind!r}")
    result = clustering.cluster_multi_density(rendered, matrix, cfg.clustering)
    result.save(cfg.path("clusters_out"))
    if cfg.emit_curve:
        with open(cfg.path("curve_out"), "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["round", "eps", "clusters"])
            w.writerows(clustering.curve_rows(result))
    log.info("cluster: %d rounds (%s)", len(result.rounds), result.stop_reason)
    return {"rounds": len(result.rounds)}


def run_report(cfg: PipelineConfig) -> dict:
    loaded = _load_cases("report", cfg)
    sets = extraction.read_candidate_sets(_need("report", cfg.path("candidates_out"), "candidate sets file"))
    result = clustering.ClusteringResult.load(_need("report", cfg.path("clusters_out"), "cluster report"))
    annotation = (
        analysis.ClusterAnnotation.load(_need("report", cfg.annotation, "annotation file"))
        if cfg.annotation is not None else None
    )
    gold = (
        analysis.load_gold_labels(_need("report", cfg.gold_labels, "gold label file"))
        if cfg.gold_labels is not None else None
    )
    keyphrases = analysis.dedup_keyphrase_sets(result, sets, annotation)
    with open(cfg.path("keyphrases_out"), "w", encoding="utf-8") as fh:
        for k in keyphrases:
            fh.write(json.dumps(k.to_json(), ensure_ascii=False) + "\n")
    report: dict = {
        "corpus": {
            "cases": len(loaded.cases),
            "skipped": [Path(s.path).name for s in loaded.skipped],
            "clauses": sum(len(corpus.case_clauses(c, cfg.sections)) for c in loaded.cases),
            "candidate_sets": len(sets),
        },
        "lexicon_size": len(phrase_mining.read_user_lexicon(cfg.path("lexicon_out")))
        if cfg.path("lexicon_out").exists() else None,
        "clustering": {
            "config": clustering.config_dict(cfg.clustering),
            "metric": cfg.metric_kind,
            "stop_reason": result.stop_reason,
            "rounds": [
                {"round": r.round, "eps": r.eps, "clusters": len(r.clusters), "noise": len(r.noise), "terminal": r.terminal}
                for r in result.rounds
            ],
            "clusters_total": sum(len(r.clusters) for r in result.rounds),
            "unclustered": len(result.unclustered),
        },
        "keyphrase_sets": len(keyphrases),
    }
    if keyphrases:
        recall = analysis.compute_recall(loaded.cases, keyphrases, gold)
        analysis.write_recall_csv(recall, cfg.path("recall_out"))
        report["recall"] = recall.to_json()
    else:
        report["recall"] = None
    if gold is not None:
        taxonomy = analysis.FactorTaxonomy.load(cfg.taxonomy)
        table = analysis.build_cooccurrence(gold, taxonomy)
        analysis.write_cooccurrence_csv(table, cfg.path("cooccurrence_out"))
        report["cooccurrence"] = [
            {"anchor": r.anchor, "count": r.count, "others": [[o, n] for o, n in r.others]} for r in table.rows
        ]
    cfg.path("report_out").write_text(json.dumps(report, ensure_ascii=False, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return report


RUNNERS = {"mine": run_mine, "extract": run_extract, "cluster": run_cluster, "report": run_report}


def run_pipeline(cfg: PipelineConfig, stage: str = "all") -> dict:
    """Run one stage or all four in order; returns per-stage summaries.

    Any failure is re-raised as :class:`StageError` naming the stage.
    """
    stages = STAGES if stage == "all" else (stage,)
    if any(s not in RUNNERS for s in stages):
        raise ValueError(f"unknown stage {stage!r}")
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    summary = {}
    for s in stages:
        try:
            summary[s] = RUNNERS[s](cfg)
        except StageError:
            raise
        except (OSError, ValidationError, ValueError, KeyError) as exc:
            raise StageError(s, str(exc)) from exc
    return summary

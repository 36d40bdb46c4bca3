"""From clusters to keyphrase sets, recall, and factor co-occurrence."""
from __future__ import annotations

import csv
import json
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from caseminer.clustering import ClusteringResult
from caseminer.corpus import CaseDocument, case_clauses
from caseminer.errors import ValidationError
from caseminer.extraction import CandidatePhraseSet

_WS = re.compile(r"\s+")


def normalize_key(text: str) -> str:
    return _WS.sub(" ", text).strip()


@dataclass
class KeyphraseSet:
    phrases: tuple[str, ...]
    source_cluster: tuple[int, int] | None
    member_count: int = 1
    factor_code: str | None = None

    def render(self) -> str:
        return "".join(self.phrases)

    @property
    def key(self) -> str:
        return normalize_key(self.render())

    def to_json(self) -> dict:
        return {
            "phrases": list(self.phrases),
            "source_cluster": None if self.source_cluster is None else f"{self.source_cluster[0]}:{self.source_cluster[1]}",
            "member_count": self.member_count,
            "factor_code": self.factor_code,
        }


@dataclass
class ClusterAnnotation:
    """Human judgments layered on a clustering run.

    ``excluded_clusters`` holds ``"<round>:<cluster>"`` keys judged to be
    noise. ``included_singletons`` are unclustered ids judged to be real
    facts; ``excluded_singletons`` records unclustered ids reviewed and
    rejected. ``seed_labels`` maps a few candidate-set ids to factor codes;
    every cluster takes the majority code of its labelled members.
    """

    excluded_clusters: set[str] = field(default_factory=set)
    excluded_singletons: set[str] = field(default_factory=set)
    included_singletons: set[str] = field(default_factory=set)
    seed_labels: dict[str, str] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "ClusterAnnotation":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise OSError(f"cannot read annotation file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"annotation file {path}: invalid JSON: {exc}") from exc
        unknown = set(obj) - {"excluded_clusters", "excluded_singletons", "included_singletons", "seed_labels"}
        if unknown:
            raise ValidationError(f"annotation file {path}: unknown keys {sorted(unknown)}")
        return cls(
            excluded_clusters=set(obj.get("excluded_clusters", [])),
            excluded_singletons=set(obj.get("excluded_singletons", [])),
            included_singletons=set(obj.get("included_singletons", [])),
            seed_labels=dict(obj.get("seed_labels", {})),
        )

    def validate(self, result: ClusteringResult, known_ids: Iterable[str]) -> None:
        keys = result.cluster_keys()
        dangling = sorted(self.excluded_clusters - set(keys))
        if dangling:
            raise ValidationError(f"annotation references unknown clusters {dangling}")
        unclustered = set(result.unclustered)
        bad = sorted((self.included_singletons | self.excluded_singletons) - unclustered)
        if bad:
            raise ValidationError(f"annotation singletons are not unclustered ids: {bad}")
        both = sorted(self.included_singletons & self.excluded_singletons)
        if both:
            raise ValidationError(f"ids both included and excluded: {both}")
        ids = set(known_ids)
        unknown = sorted(set(self.seed_labels) - ids)
        if unknown:
            raise ValidationError(f"seed labels reference unknown candidate sets {unknown}")


def _majority(codes: Iterable[str]) -> str | None:
    counts = Counter(codes)
    if not counts:
        return None
    return min(counts, key=lambda c: (-counts[c], c))


def unique_keyphrases(sets: Iterable[KeyphraseSet]) -> list[KeyphraseSet]:
    """Collapse sets rendering to the same normalised string, keeping the first."""
    out: dict[str, KeyphraseSet] = {}
    for s in sets:
        prev = out.get(s.key)
        if prev is None:
            out[s.key] = KeyphraseSet(s.phrases, s.source_cluster, s.member_count, s.factor_code)
        else:
            prev.member_count += s.member_count
            if prev.factor_code is None:
                prev.factor_code = s.factor_code
    return list(out.values())


def dedup_keyphrase_sets(
    result: ClusteringResult,
    sets: Sequence[CandidatePhraseSet],
    annotation: ClusterAnnotation | None = None,
) -> list[KeyphraseSet]:
    annotation = annotation or ClusterAnnotation()
    by_id = {s.id: s for s in sets}
    annotation.validate(result, by_id)
    missing = [i for r in result.rounds for c in r.clusters for i in c if i not in by_id]
    if missing:
        raise ValidationError(f"clustered id {missing[0]!r} has no candidate set")

    emitted = []
    for rnd in result.rounds:
        for k, members in enumerate(rnd.clusters):
            if f"{rnd.round}:{k}" in annotation.excluded_clusters:
                continue
            code = _majority(annotation.seed_labels[m] for m in members if m in annotation.seed_labels)
            for m in members:
                emitted.append(KeyphraseSet(tuple(by_id[m].forms), (rnd.round, k), 1, code))
    for m in sorted(annotation.included_singletons):
        emitted.append(KeyphraseSet(tuple(by_id[m].forms), None, 1, annotation.seed_labels.get(m)))
    return unique_keyphrases(emitted)


@dataclass
class CaseRecall:
    case_id: str
    matched_sets: int
    found_codes: list[str]
    gold_codes: list[str]
    identified_codes: list[str]

    @property
    def identified(self) -> bool:
        return self.matched_sets > 0


@dataclass
class RecallReport:
    metric: str  # "recall" with gold labels, otherwise "coverage"
    numerator: int
    denominator: int
    cases: list[CaseRecall]

    @property
    def value(self) -> float:
        return self.numerator / self.denominator if self.denominator else 0.0

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "value": self.value,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "cases": [
                {
                    "case_id": c.case_id,
                    "identified": c.identified,
                    "matched_sets": c.matched_sets,
                    "found_codes": c.found_codes,
                    "gold_codes": c.gold_codes,
                    "identified_codes": c.identified_codes,
                }
                for c in self.cases
            ],
        }


def set_in_clause(phrases: Sequence[str], clause: str) -> bool:
    return all(p in clause for p in phrases)


def compute_recall(
    cases: Sequence[CaseDocument],
    keyphrases: Sequence[KeyphraseSet],
    gold: Mapping[str, Iterable[str]] | None = None,
    sections: Iterable[str] | None = None,
) -> RecallReport:
    """Match keyphrase sets against each case, one clause at a time.

    A set matches a case when every one of its phrases occurs as a substring
    of a single clause. With ``gold`` (case id -> factor codes) a gold
    factor counts as identified when a matching set carries that code;
    without it the report gives the share of cases with any match.
    """
    if not keyphrases:
        raise ValidationError("compute_recall needs at least one keyphrase set")
    sections = None if sections is None else tuple(sections)
    if gold is not None:
        known = {c.id for c in cases}
        unknown = sorted(set(gold) - known)
        if unknown:
            raise ValidationError(f"gold labels reference unknown cases {unknown}")
    rows = []
    num = den = 0
    for case in cases:
        clauses = [c.text for c in case_clauses(case, sections)]
        matched = [k for k in keyphrases if any(set_in_clause(k.phrases, t) for t in clauses)]
        found = sorted({k.factor_code for k in matched if k.factor_code is not None})
        gold_codes = sorted(set(gold.get(case.id, ()))) if gold is not None else []
        hit = [c for c in gold_codes if c in found]
        rows.append(CaseRecall(case.id, len(matched), found, gold_codes, hit))
        if gold is not None:
            num += len(hit)
            den += len(gold_codes)
        else:
            num += bool(matched)
            den += 1
    return RecallReport("recall" if gold is not None else "coverage", num, den, rows)


@dataclass(frozen=True)
class SubFactor:
    code: str
    main: str
    description: str
    role_mismatch: bool = False


@dataclass
class FactorTaxonomy:
    main_factors: dict[str, str]
    sub_factors: dict[str, SubFactor]

    def __post_init__(self):
        for sf in self.sub_factors.values():
            if sf.main not in self.main_factors:
                raise ValidationError(f"sub-factor {sf.code} points at unknown main factor {sf.main}")

    @classmethod
    def from_json(cls, obj: Mapping) -> "FactorTaxonomy":
        subs: dict[str, SubFactor] = {}
        for s in obj["sub_factors"]:
            if s["code"] in subs:
                raise ValidationError(f"duplicate factor code {s['code']}")
            subs[s["code"]] = SubFactor(s["code"], s["main"], s["description"], s.get("role_mismatch", False))
        return cls({m["id"]: m["name"] for m in obj["main_factors"]}, subs)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "FactorTaxonomy":
        if path is None:
            text = resources.files("caseminer").joinpath("data/taxonomy.json").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        return cls.from_json(json.loads(text))

    def order(self, code: str) -> int:
        return list(self.sub_factors).index(code)


@dataclass
class CooccurrenceRow:
    anchor: str
    count: int
    others: list[tuple[str, int]]


@dataclass
class CooccurrenceTable:
    rows: list[CooccurrenceRow]

    def row(self, anchor: str) -> CooccurrenceRow:
        return next(r for r in self.rows if r.anchor == anchor)

    def co_count(self, a: str, b: str) -> int:
        return dict(self.row(a).others).get(b, 0)


def build_cooccurrence(
    labels: Mapping[str, Iterable[str]],
    taxonomy: FactorTaxonomy | None = None,
    anchors: Iterable[str] | None = None,
) -> CooccurrenceTable:
    """Count, per anchor code, its cases and the cases it shares with each other code."""
    taxonomy = taxonomy or FactorTaxonomy.load()
    case_codes = {case: set(codes) for case, codes in labels.items()}
    for case in sorted(case_codes):
        for code in sorted(case_codes[case]):
            if code not in taxonomy.sub_factors:
                raise ValidationError(f"case {case}: unknown factor code {code!r}")
    rank = {code: i for i, code in enumerate(taxonomy.sub_factors)}
    occurrences: Counter = Counter()
    pairs: dict[str, Counter] = defaultdict(Counter)
    for codes in case_codes.values():
        occurrences.update(codes)
        for a in codes:
            for b in codes:
                if a != b:
                    pairs[a][b] += 1
    if anchors is None:
        anchor_list = sorted(occurrences, key=rank.__getitem__)
    else:
        anchor_list = list(anchors)
        for a in anchor_list:
            if a not in taxonomy.sub_factors:
                raise ValidationError(f"unknown anchor code {a!r}")
    rows = [
        CooccurrenceRow(
            a,
            occurrences[a],
            sorted(pairs[a].items(), key=lambda kv: (-kv[1], rank[kv[0]])),
        )
        for a in anchor_list
    ]
    return CooccurrenceTable(rows)


def load_gold_labels(path: str | Path) -> dict[str, list[str]]:
    """Read ``case_id,factor_code`` rows (header optional) into case -> codes."""
    out: dict[str, list[str]] = defaultdict(list)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot read gold labels {path}: {exc}") from exc
    with fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or not "".join(row).strip():
                continue
            if lineno == 1 and [c.strip() for c in row[:2]] == ["case_id", "factor_code"]:
                continue
            if len(row) != 2:
                raise ValidationError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            case_id, code = row[0].strip(), row[1].strip()
            if code not in out[case_id]:
                out[case_id].append(code)
    return dict(out)


def write_cooccurrence_csv(table: CooccurrenceTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["anchor", "anchor_count", "other", "co_count"])
        for r in table.rows:
            if not r.others:
                w.writerow([r.anchor, r.count, "", ""])
            for other, n in r.others:
                w.writerow([r.anchor, r.count, other, n])


def write_recall_csv(report: RecallReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["case_id", "identified", "matched_sets", "gold_codes", "identified_codes"])
        for c in report.cases:
            w.writerow([c.case_id, int(c.identified), c.matched_sets, " ".join(c.gold_codes), " ".join(c.identified_codes)])
        w.writerow([f"#{report.metric}", f"{report.value:.6f}", report.numerator, report.denominator, ""])

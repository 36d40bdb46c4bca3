"""Candidate phrase sets from dependency parses of candidate clauses.

Parses come from an external segmenter/parser as CoNLL-U. Each sentence block
carries a ``# clause_ref = <case_id>:<section>:<index>`` comment tying it back
to the clause it was produced from.

From each parse at most four phrases are kept:

* the root;
* the root's dependent closest to it in surface order (ties go left);
* for the "reverse" arcs (head before dependent) whose label is one of the
  configured object/complement relations, the arc whose head is closest to
  the root contributes both its head and its dependent.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from caseminer.errors import ValidationError

DEFAULT_REVERSE_LABELS = frozenset({"dobj", "pobj", "acomp"})

# Universal Dependencies v2 names for the same relations.
UD_LABEL_MAP = {"obj": "dobj", "obl": "pobj", "xcomp": "acomp"}

PUNCT_TAGS = frozenset({"PU", "PUNCT", "WP", "wp", "w", "x"})

RULE_ORDER = ("root", "rule1", "rule2-head", "rule2-dep")

ClauseRef = tuple[str, str, int]


def format_clause_ref(ref: ClauseRef) -> str:
    return f"{ref[0]}:{ref[1]}:{ref[2]}"


def parse_clause_ref(text: str) -> ClauseRef:
    try:
        case_id, section, index = text.strip().rsplit(":", 2)
        return (case_id, section, int(index))
    except ValueError:
        raise ValidationError(f"malformed clause_ref {text!r}; expected case_id:section:index") from None


@dataclass(frozen=True)
class DepNode:
    position: int
    form: str
    pos_tag: str
    head: int
    relation: str


@dataclass(frozen=True)
class DependencyParse:
    clause_ref: ClauseRef
    nodes: tuple[DepNode, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        validate_parse(self)

    @property
    def root(self) -> DepNode:
        return next(n for n in self.nodes if n.head == 0)

    def node(self, position: int) -> DepNode:
        return self.nodes[position - 1]


def validate_parse(parse: DependencyParse) -> None:
    name = format_clause_ref(parse.clause_ref)
    nodes = parse.nodes
    if not nodes:
        raise ValidationError(f"{name}: parse has no nodes")
    n = len(nodes)
    for i, node in enumerate(nodes, 1):
        if node.position != i:
            raise ValidationError(f"{name}: node positions must run 1..{n}, got {node.position} at slot {i}")
        if not 0 <= node.head <= n or node.head == i:
            raise ValidationError(f"{name}: node {i} has invalid head {node.head}")
    roots = [x.position for x in nodes if x.head == 0]
    if len(roots) != 1:
        raise ValidationError(f"{name}: expected exactly one root, found {len(roots)} {roots}")
    for start in range(1, n + 1):
        seen = set()
        cur = start
        while cur != 0:
            if cur in seen:
                raise ValidationError(f"{name}: dependency cycle through node {cur}")
            seen.add(cur)
            cur = nodes[cur - 1].head


@dataclass(frozen=True)
class CandidatePhraseSet:
    clause_ref: ClauseRef
    phrases: tuple[tuple[str, int], ...]
    provenance: tuple[str, ...]

    @property
    def id(self) -> str:
        return format_clause_ref(self.clause_ref)

    @property
    def forms(self) -> list[str]:
        return [form for form, _ in self.phrases]

    def render(self) -> str:
        return "".join(self.forms)

    def to_json(self) -> dict:
        return {
            "clause_ref": self.id,
            "phrases": [{"form": f, "position": p} for f, p in self.phrases],
            "provenance": list(self.provenance),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "CandidatePhraseSet":
        return cls(
            clause_ref=parse_clause_ref(obj["clause_ref"]),
            phrases=tuple((p["form"], int(p["position"])) for p in obj["phrases"]),
            provenance=tuple(obj["provenance"]),
        )


@dataclass(frozen=True)
class ExtractionConfig:
    reverse_labels: frozenset = DEFAULT_REVERSE_LABELS
    label_map: Mapping[str, str] = field(default_factory=lambda: dict(UD_LABEL_MAP))
    punct_tags: frozenset = PUNCT_TAGS

    def canonical(self, label: str) -> str:
        if label in self.label_map:
            return self.label_map[label]
        base = label.split(":", 1)[0]
        return self.label_map.get(base, base)


def _nearest(candidates: Iterable[int], anchor: int) -> int | None:
    best = None
    for pos in candidates:
        key = (abs(pos - anchor), pos)
        if best is None or key < best[0]:
            best = (key, pos)
    return None if best is None else best[1]


def extract_candidate_set(
    parse: DependencyParse,
    reverse_labels: Iterable[str] | None = None,
    config: ExtractionConfig | None = None,
) -> CandidatePhraseSet:
    config = config or ExtractionConfig()
    labels = frozenset(reverse_labels) if reverse_labels is not None else config.reverse_labels
    root = parse.root.position
    picked: dict[int, str] = {root: "root"}

    dependents = [
        n.position for n in parse.nodes if n.head == root and n.pos_tag not in config.punct_tags
    ]
    near = _nearest(dependents, root)
    if near is not None:
        picked.setdefault(near, "rule1")

    arcs = [
        (n.head, n.position)
        for n in parse.nodes
        if n.head != 0 and n.head < n.position and config.canonical(n.relation) in labels
    ]
    if arcs:
        head, dep = min(arcs, key=lambda a: (abs(a[0] - root), a[0], a[1]))
        picked.setdefault(head, "rule2-head")
        picked.setdefault(dep, "rule2-dep")

    order = sorted(picked)
    return CandidatePhraseSet(
        clause_ref=parse.clause_ref,
        phrases=tuple((parse.node(p).form, p) for p in order),
        provenance=tuple(picked[p] for p in order),
    )


def _parse_block(lines: Sequence[tuple[int, str]], source: str) -> DependencyParse:
    ref = None
    nodes = []
    for lineno, line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            if key.strip() == "clause_ref":
                ref = parse_clause_ref(value)
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ValidationError(f"{source}:{lineno}: expected 10 tab-separated columns, got {len(cols)}")
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            continue  # multiword ranges and empty nodes carry no tree arcs
        try:
            nodes.append(DepNode(int(tok_id), cols[1], cols[3], int(cols[6]), cols[7]))
        except ValueError:
            raise ValidationError(f"{source}:{lineno}: non-integer ID or HEAD") from None
    if ref is None:
        raise ValidationError(f"{source}:{lines[0][0]}: sentence block lacks '# clause_ref = ...'")
    return DependencyParse(ref, tuple(nodes))


def read_conllu(text: str, source: str = "<string>") -> list[DependencyParse]:
    parses = []
    block: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.rstrip("\r\n")
        if line.strip():
            block.append((lineno, line))
        elif block:
            parses.append(_parse_block(block, source))
            block = []
    if block:
        parses.append(_parse_block(block, source))
    return parses


def load_parses(path: str | Path) -> list[DependencyParse]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read parses {path}: {exc}") from exc
    return read_conllu(text, source=str(path))


def to_conllu(parse: DependencyParse) -> str:
    lines = [f"# clause_ref = {format_clause_ref(parse.clause_ref)}"]
    for n in parse.nodes:
        lines.append("\t".join([str(n.position), n.form, "_", n.pos_tag, "_", "_", str(n.head), n.relation, "_", "_"]))
    return "\n".join(lines) + "\n"


def write_candidate_sets(sets: Iterable[CandidatePhraseSet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sets:
            fh.write(json.dumps(s.to_json(), ensure_ascii=False) + "\n")


def read_candidate_sets(path: str | Path) -> list[CandidatePhraseSet]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(CandidatePhraseSet.from_json(json.loads(line)))
            except (KeyError, TypeError, json.JSONDecodeError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad candidate set record: {exc}") from exc
    return out

"""Loading accident case files and cutting them into candidate clauses.

A case file is UTF-8 text. The first line is the case title; each section
starts with a marker line ``== <section-kind> ==`` and runs until the next
marker. Section kinds are the six parts of a Chinese accident case report.
"""
from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from caseminer.errors import ValidationError

log = logging.getLogger(__name__)

SECTION_KINDS = ("profile", "details", "causes", "severity", "liabilities", "prevention")
OPTIONAL_SECTIONS = frozenset({"profile", "prevention"})
DEFAULT_EXTRACT_SECTIONS = ("causes", "details")

CLAUSE_BOUNDARIES = frozenset("，；。,;.")

# Brackets, quotes, bullets and enumeration markers; see clean_text.
DEFAULT_NOISE_PATTERNS = (
    r"[（(]\s*[0-9一二三四五六七八九十]+\s*[)）]",  # (1) （一）
    r"(?m)^\s*[0-9]+\s*[、]",  # 1、
    r"(?m)^\s*[一二三四五六七八九十]+\s*、",  # 一、
    r"[①②③④⑤⑥⑦⑧⑨⑩•·●○■□◆◇▪►▶※★☆]",
    r"[()（）\[\]【】〔〕《》〈〉<>{}「」『』“”‘’\"'`]",
)

_SECTION_MARKER = re.compile(r"^==\s*(?P<kind>[A-Za-z_]+)\s*==\s*$")
_BOUNDARY_SPLIT = re.compile("[" + re.escape("".join(sorted(CLAUSE_BOUNDARIES))) + "]")
_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class CaseDocument:
    id: str
    title: str
    sections: Mapping[str, str]
    source_path: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sections", MappingProxyType(dict(self.sections)))
        unknown = set(self.sections) - set(SECTION_KINDS)
        if unknown:
            raise ValidationError(f"case {self.id}: unknown section kind(s) {sorted(unknown)}")
        if not self.sections.get("causes", "").strip():
            raise ValidationError(f"case {self.id}: missing or empty 'causes' section")


@dataclass(frozen=True)
class Clause:
    case_id: str
    section: str
    index: int
    text: str

    @property
    def ref(self) -> tuple[str, str, int]:
        return (self.case_id, self.section, self.index)


@dataclass(frozen=True)
class SkippedCase:
    path: str
    reason: str


@dataclass
class CaseLoad:
    """Result of :func:`load_cases`: the good documents plus what was skipped."""

    cases: list[CaseDocument] = field(default_factory=list)
    skipped: list[SkippedCase] = field(default_factory=list)


def clean_text(raw: str, noise_patterns: Iterable[str] = DEFAULT_NOISE_PATTERNS) -> str:
    """Strip noise symbols and collapse whitespace runs to one space.

    Clause punctuation (commas, semicolons, full stops) is kept. The result
    is NFC-normalised so repeated cleaning is a no-op.
    """
    patterns = tuple(noise_patterns)
    text = unicodedata.normalize("NFC", raw)
    # removing one symbol can expose another (e.g. "1()、"), so run to a fixed point
    while True:
        cleaned = text
        for pat in patterns:
            cleaned = re.sub(pat, "", cleaned)
        cleaned = _WS.sub(" ", cleaned).strip()
        if cleaned == text:
            return cleaned
        text = cleaned


def segment_clauses(text: str) -> list[str]:
    parts = (p.strip() for p in _BOUNDARY_SPLIT.split(text))
    return [p for p in parts if p]


def parse_case(text: str, case_id: str, source_path: str = "") -> CaseDocument:
    lines = text.splitlines()
    if not lines:
        raise ValidationError(f"case {case_id}: empty file")
    title = lines[0].strip()
    sections: dict[str, list[str]] = {}
    current = None
    for lineno, line in enumerate(lines[1:], 2):
        m = _SECTION_MARKER.match(line.strip())
        if m:
            kind = m.group("kind").lower()
            if kind not in SECTION_KINDS:
                raise ValidationError(f"case {case_id}, line {lineno}: unknown section kind {kind!r}")
            if kind in sections:
                raise ValidationError(f"case {case_id}, line {lineno}: duplicate section {kind!r}")
            sections[kind] = []
            current = kind
        elif current is not None:
            sections[current].append(line)
        elif line.strip():
            raise ValidationError(f"case {case_id}, line {lineno}: text before first section marker")
    return CaseDocument(
        id=case_id,
        title=title,
        sections={k: "\n".join(v).strip() for k, v in sections.items()},
        source_path=source_path,
    )


def load_case(path: str | Path) -> CaseDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise OSError(f"cannot read case file {path}: {exc}") from exc
    return parse_case(text, case_id=path.stem, source_path=str(path))


def load_cases(directory: str | Path, pattern: str = "*.txt", strict: bool = False) -> CaseLoad:
    """Load every case file in ``directory`` in sorted filename order.

    Files that fail validation are logged and listed in ``skipped``; with
    ``strict=True`` the first such failure is raised instead. Unreadable files
    always raise.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise OSError(f"case directory not found: {directory}")
    result = CaseLoad()
    for path in sorted(directory.glob(pattern)):
        try:
            result.cases.append(load_case(path))
        except ValidationError as exc:
            if strict:
                raise
            log.warning("skipping %s: %s", path.name, exc)
            result.skipped.append(SkippedCase(str(path), str(exc)))
    return result


def case_clauses(
    case: CaseDocument,
    sections: Iterable[str] | None = DEFAULT_EXTRACT_SECTIONS,
    noise_patterns: Iterable[str] = DEFAULT_NOISE_PATTERNS,
) -> list[Clause]:
    """Clean and segment the chosen sections of a case (all sections if None)."""
    kinds = SECTION_KINDS if sections is None else tuple(sections)
    out = []
    for kind in kinds:
        body = case.sections.get(kind)
        if not body:
            continue
        segs = segment_clauses(clean_text(body, noise_patterns))
        out.extend(Clause(case.id, kind, i, s) for i, s in enumerate(segs))
    return out


_CJK = r"㐀-䶿一-鿿豈-﫿"
_CHAR_TOKEN = re.compile(rf"[{_CJK}]|[^\s{_CJK}]+")


def tokenize(text: str, mode: str = "chars") -> list[str]:
    """Split a clause into tokens for phrase mining.

    ``chars`` makes every CJK character its own token and keeps other
    non-space runs whole; ``whitespace`` trusts pre-segmented input.
    """
    if mode == "chars":
        return _CHAR_TOKEN.findall(text)
    if mode == "whitespace":
        return text.split()
    raise ValueError(f"unknown tokenizer mode {mode!r}")

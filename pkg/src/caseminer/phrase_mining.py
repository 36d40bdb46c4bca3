"""Phrase discovery by inner cohesion plus outer freedom.

A bigram (two adjacent tokens inside one clause) is scored as

    score(b) = PMI(b) + min(H_left(b), H_right(b))

where PMI uses maximum-likelihood probabilities over the token stream and
the boundary entropies are Shannon entropies (base 2) of the tokens seen
immediately to the left / right of the bigram's occurrences. The best bigrams
are merged into single tokens and the process repeats, so later rounds can
grow longer phrases.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from caseminer.errors import DomainError, ValidationError

Bigram = tuple[str, str]


@dataclass
class CorpusStats:
    total_tokens: int
    unigram_counts: Counter
    bigram_counts: Counter
    left_contexts: dict[Bigram, Counter]
    right_contexts: dict[Bigram, Counter]
    first_seen: dict[Bigram, int] = field(default_factory=dict)

    def count(self, b: Bigram) -> int:
        return self.bigram_counts.get(b, 0)


@dataclass(frozen=True)
class PhraseEntry:
    tokens: tuple[str, ...]
    score: float
    round: int
    occurrences: int = 0

    @property
    def text(self) -> str:
        return "".join(self.tokens)


@dataclass
class PhraseLexicon:
    entries: list[PhraseEntry] = field(default_factory=list)
    rounds_run: int = 0

    def phrases(self) -> list[str]:
        return [e.text for e in self.entries]


@dataclass(frozen=True)
class MiningConfig:
    min_count: int = 2
    top_k: int | None = 50
    rounds: int = 2
    score_threshold: float | None = None

    def __post_init__(self):
        if self.min_count < 1:
            raise ValidationError("min_count must be >= 1")
        if self.top_k is not None and self.top_k < 1:
            raise ValidationError("top_k must be >= 1")
        if self.rounds < 0:
            raise ValidationError("rounds must be >= 0")
        if self.top_k is None and self.score_threshold is None:
            raise ValidationError("need top_k, score_threshold, or both")


def build_stats(clauses: Sequence[Sequence[str]]) -> CorpusStats:
    if not clauses:
        raise ValidationError("empty corpus")
    uni: Counter = Counter()
    bi: Counter = Counter()
    left: dict[Bigram, Counter] = {}
    right: dict[Bigram, Counter] = {}
    first: dict[Bigram, int] = {}
    pos = 0
    for k, clause in enumerate(clauses):
        if not clause:
            raise ValidationError(f"clause {k} is empty")
        uni.update(clause)
        for i in range(len(clause) - 1):
            b = (clause[i], clause[i + 1])
            bi[b] += 1
            first.setdefault(b, pos + i)
            if i > 0:
                left.setdefault(b, Counter())[clause[i - 1]] += 1
            if i + 2 < len(clause):
                right.setdefault(b, Counter())[clause[i + 2]] += 1
        pos += len(clause)
    return CorpusStats(pos, uni, bi, left, right, first)


def _require(stats: CorpusStats, b: Bigram) -> int:
    c = stats.count(b)
    if c < 1:
        raise DomainError(f"bigram {b!r} does not occur in the corpus")
    return c


def pmi(stats: CorpusStats, b: Bigram) -> float:
    c = _require(stats, b)
    n = stats.total_tokens
    # log2((c/n) / ((ci/n)(cj/n))) rearranged to keep precision
    return math.log2(c * n / (stats.unigram_counts[b[0]] * stats.unigram_counts[b[1]]))


def entropy(counts: Iterable[int]) -> float:
    counts = [c for c in counts if c > 0]
    total = sum(counts)
    if total == 0:
        return 0.0
    h = -sum(c / total * math.log2(c / total) for c in counts)
    return max(h, 0.0)  # a single context gives -0.0


def boundary_entropy(stats: CorpusStats, b: Bigram, side: str) -> float:
    _require(stats, b)
    if side == "left":
        ctx = stats.left_contexts.get(b)
    elif side == "right":
        ctx = stats.right_contexts.get(b)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return entropy(ctx.values()) if ctx else 0.0


def score_bigram(stats: CorpusStats, b: Bigram) -> float:
    return pmi(stats, b) + min(boundary_entropy(stats, b, "left"), boundary_entropy(stats, b, "right"))


def rank_bigrams(stats: CorpusStats, min_count: int = 2) -> list[tuple[Bigram, float]]:
    """Score every bigram seen at least ``min_count`` times, best first.

    Ties go to the bigram that occurs earlier in the corpus.
    """
    scored = [(b, score_bigram(stats, b)) for b, c in stats.bigram_counts.items() if c >= min_count]
    scored.sort(key=lambda item: (-item[1], stats.first_seen[item[0]]))
    return scored


def merge_bigram(clauses: list[list[str]], b: Bigram, merged: str) -> int:
    """Replace non-overlapping occurrences of ``b``, scanning left to right.

    Mutates ``clauses`` in place and returns the number of merges.
    """
    n = 0
    for k, clause in enumerate(clauses):
        if len(clause) < 2:
            continue
        out = []
        i = 0
        while i < len(clause):
            if i + 1 < len(clause) and clause[i] == b[0] and clause[i + 1] == b[1]:
                out.append(merged)
                n += 1
                i += 2
            else:
                out.append(clause[i])
                i += 1
        clauses[k] = out
    return n


def mine_phrases(clauses: Sequence[Sequence[str]], config: MiningConfig | None = None) -> PhraseLexicon:
    config = config or MiningConfig()
    work = [list(c) for c in clauses]
    if not work:
        raise ValidationError("empty corpus")
    # merged token -> original token tuple, so phrases stay flat across rounds
    parts: dict[str, tuple[str, ...]] = {}
    lexicon = PhraseLexicon()
    for rnd in range(1, config.rounds + 1):
        stats = build_stats(work)
        ranked = rank_bigrams(stats, config.min_count)
        if config.score_threshold is not None:
            ranked = [(b, s) for b, s in ranked if s >= config.score_threshold]
        if config.top_k is not None:
            ranked = ranked[: config.top_k]
        added = 0
        for b, score in ranked:
            tokens = parts.get(b[0], (b[0],)) + parts.get(b[1], (b[1],))
            merged = "".join(tokens)
            if merged in parts and parts[merged] != tokens:
                # same surface string from a different split; keep the first split
                tokens = parts[merged]
            occurrences = merge_bigram(work, b, merged)
            if occurrences:
                parts.setdefault(merged, tokens)
                lexicon.entries.append(PhraseEntry(tokens, score, rnd, occurrences))
                added += 1
        lexicon.rounds_run = rnd
        if not added:
            break
    return lexicon


def export_user_lexicon(lexicon: PhraseLexicon, path: str | Path) -> None:
    path = Path(path)
    body = "".join(e.text + "\n" for e in lexicon.entries)
    try:
        path.write_text(body, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write lexicon {path}: {exc}") from exc


def read_user_lexicon(path: str | Path) -> list[str]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise OSError(f"cannot read lexicon {path}: {exc}") from exc
    return [ln for ln in lines if ln]

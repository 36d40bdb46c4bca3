"""Character edit distance between candidate phrase sets.

A set is rendered by concatenating its phrases in surface order. Two
metrics are offered:

``raw``
    Levenshtein distance of the rendered strings (a true metric).
``offset_normalized``
    ``1 + lev / max(len)``; identical sets sit at 1.0 and fully disjoint
    strings of equal length at 2.0. This is the default because its lower
    bound of 1 for identical sets is what the density sweep is tuned for.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from caseminer import kernels
from caseminer.errors import ValidationError
from caseminer.extraction import CandidatePhraseSet

METRIC_KINDS = ("raw", "offset_normalized")


def levenshtein(a: str, b: str) -> int:
    return int(kernels.levenshtein(a, b))


def _offset(lev: int, la: int, lb: int) -> float:
    longest = max(la, lb)
    return 1.0 if longest == 0 else 1.0 + lev / longest


def string_distance(a: str, b: str, metric_kind: str = "offset_normalized") -> float:
    lev = levenshtein(a, b)
    if metric_kind == "raw":
        return float(lev)
    if metric_kind == "offset_normalized":
        return _offset(lev, len(a), len(b))
    raise ValidationError(f"unknown metric_kind {metric_kind!r}")


def set_distance(a: CandidatePhraseSet, b: CandidatePhraseSet, metric_kind: str = "offset_normalized") -> float:
    return string_distance(a.render(), b.render(), metric_kind)


@dataclass(frozen=True)
class DistanceMatrix:
    items: tuple[str, ...]
    values: np.ndarray
    metric_kind: str

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        n = len(self.items)
        if vals.shape != (n, n):
            raise ValidationError(f"matrix shape {vals.shape} does not match {n} items")
        if self.metric_kind not in METRIC_KINDS:
            raise ValidationError(f"unknown metric_kind {self.metric_kind!r}")
        if len(set(self.items)) != n:
            raise ValidationError("duplicate item ids in distance matrix")

    def __len__(self) -> int:
        return len(self.items)

    def index(self) -> dict[str, int]:
        return {item: i for i, item in enumerate(self.items)}

    def submatrix(self, ids: Sequence[str]) -> "DistanceMatrix":
        idx = self.index()
        rows = np.array([idx[i] for i in ids], dtype=np.intp)
        return DistanceMatrix(tuple(ids), self.values[np.ix_(rows, rows)], self.metric_kind)

    def save(self, path: str | Path) -> None:
        """Write ``.npz`` (default) or ``.csv`` depending on the suffix."""
        path = Path(path)
        if path.suffix == ".csv":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow([self.metric_kind, *self.items])
                for item, row in zip(self.items, self.values):
                    w.writerow([item, *(repr(float(v)) for v in row)])
        else:
            with open(path, "wb") as fh:
                np.savez(fh, values=self.values, items=np.array(json.dumps(list(self.items))),
                         metric_kind=np.array(self.metric_kind))

    @classmethod
    def load(cls, path: str | Path) -> "DistanceMatrix":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"distance matrix not found: {path}")
        if path.suffix == ".csv":
            with open(path, encoding="utf-8", newline="") as fh:
                rows = list(csv.reader(fh))
            metric_kind, *items = rows[0]
            values = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=np.float64)
            return cls(tuple(items), values.reshape(len(items), len(items)), metric_kind)
        with np.load(path, allow_pickle=False) as data:
            items = tuple(json.loads(str(data["items"])))
            return cls(items, data["values"], str(data["metric_kind"]))


def build_matrix(sets: Sequence[CandidatePhraseSet], metric_kind: str = "offset_normalized") -> DistanceMatrix:
    if not sets:
        raise ValidationError("build_matrix needs at least one candidate set")
    if metric_kind not in METRIC_KINDS:
        raise ValidationError(f"unknown metric_kind {metric_kind!r}")
    strings = [s.render() for s in sets]
    lev = kernels.pairwise_levenshtein(strings)
    if metric_kind == "raw":
        values = lev.astype(np.float64)
    else:
        lengths = np.array([len(s) for s in strings], dtype=np.float64)
        longest = np.maximum.outer(lengths, lengths)
        values = 1.0 + np.divide(lev, longest, out=np.zeros_like(longest), where=longest > 0)
    return DistanceMatrix(tuple(s.id for s in sets), values, metric_kind)

"""Pure-Python versions of the compiled kernels in ``_ckernels``."""
from __future__ import annotations

import numpy as np


def levenshtein(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    row = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        prev, row[0] = row[0], i
        for j, cb in enumerate(b, 1):
            cur = row[j]
            row[j] = prev if ca == cb else 1 + min(prev, cur, row[j - 1])
            prev = cur
    return row[-1]


def pairwise_levenshtein(strings: list[str]) -> np.ndarray:
    n = len(strings)
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = levenshtein(strings[i], strings[j])
    return out


def dbscan_labels(dist: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    n = dist.shape[0]
    labels = np.full(n, -1, dtype=np.intp)
    within = dist <= eps
    core = within.sum(axis=1) >= min_pts
    cid = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cid
        stack = [i]
        while stack:
            p = stack.pop()
            for q in np.flatnonzero(within[p] & (labels == -1)):
                labels[q] = cid
                if core[q]:
                    stack.append(int(q))
        cid += 1
    return labels

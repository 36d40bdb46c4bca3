"""Hand-built distance matrices shared by the clustering and acceptance tests."""
import numpy as np

from caseminer.similarity import DistanceMatrix


def block_matrix(groups, within, between, default=2.0, prefix="p"):
    """Matrix over the concatenation of ``groups`` (sizes).

    ``within[g]`` is the distance inside group g; ``between[(g, h)]`` the
    distance across groups (``default`` if absent). Ids are zero-padded so
    id order equals position order.
    """
    labels = [g for g, size in enumerate(groups) for _ in range(size)]
    n = len(labels)
    d = np.full((n, n), float(default))
    for i in range(n):
        for j in range(n):
            gi, gj = labels[i], labels[j]
            if i == j:
                d[i, j] = 1.0
            elif gi == gj:
                d[i, j] = within[gi]
            else:
                d[i, j] = between.get((gi, gj), between.get((gj, gi), default))
    ids = tuple(f"{prefix}{k:03d}" for k in range(n))
    return DistanceMatrix(ids, d, "offset_normalized"), labels


def two_scale_fixture():
    """Three tight groups (5 pts, 1.05 apart; 1.3 between them), one loose
    group of 6 at 1.5, and 3 isolated points at 2.0 from everything.

    Returns (matrix, rendered strings, group label per id). Every rendered
    string shares the character "安", so no pair is fully disjoint.
    """
    groups = [5, 5, 5, 6, 1, 1, 1]
    within = {0: 1.05, 1: 1.05, 2: 1.05, 3: 1.5, 4: 1.0, 5: 1.0, 6: 1.0}
    between = {}
    for g in range(3):
        for h in range(3):
            if g != h:
                between[(g, h)] = 1.3
        between[(g, 3)] = 1.9
    m, labels = block_matrix(groups, within, between)
    rendered = {i: f"安{k}" for k, i in enumerate(m.items)}
    return m, rendered, dict(zip(m.items, labels))

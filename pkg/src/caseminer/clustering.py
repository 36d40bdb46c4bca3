"""Multi-density DBSCAN over a precomputed distance matrix.

Each round sweeps eps over a grid, keeps the eps that yields the most
clusters, clusters at that eps and removes every clustered id before the
next round. The next round's sweep starts one step above the previous eps,
so eps strictly increases. The loop stops after a round in which some
cluster holds two strings sharing no aligned character (raw edit distance
equal to the longer length), when no new cluster forms, when the eps grid
is exhausted, or after ``max_rounds``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from caseminer import kernels
from caseminer.errors import ValidationError
from caseminer.similarity import DistanceMatrix, levenshtein


@dataclass(frozen=True)
class ClusteringConfig:
    min_pts: int = 5
    eps_range: tuple[float, float] = (1.0, 2.0)
    eps_step: float = 0.01
    max_rounds: int = 10

    def validate(self, metric_kind: str = "offset_normalized") -> None:
        lo, hi = self.eps_range
        if self.min_pts < 2:
            raise ValidationError("min_pts must be >= 2")
        if not self.eps_step > 0:
            raise ValidationError("eps_step must be > 0")
        if lo > hi:
            raise ValidationError(f"empty eps range [{lo}, {hi}]")
        if lo <= 0:
            raise ValidationError("eps lower bound must be > 0")
        if metric_kind == "offset_normalized" and lo < 1:
            raise ValidationError("eps lower bound must be >= 1 for the offset_normalized metric")
        if self.max_rounds < 1:
            raise ValidationError("max_rounds must be >= 1")


@dataclass
class ClusterRound:
    round: int
    eps: float
    clusters: list[list[str]]
    noise: list[str]
    curve: list[tuple[float, int]]
    terminal: bool = False


@dataclass
class ClusteringResult:
    rounds: list[ClusterRound] = field(default_factory=list)
    unclustered: list[str] = field(default_factory=list)
    stop_reason: str = ""

    def cluster_keys(self) -> dict[str, list[str]]:
        """``"<round>:<cluster>"`` -> member ids, for every cluster of every round."""
        return {f"{r.round}:{k}": members for r in self.rounds for k, members in enumerate(r.clusters)}

    def to_json(self) -> dict:
        return {
            "rounds": [
                {
                    "round": r.round,
                    "eps": r.eps,
                    "terminal": r.terminal,
                    "curve": [[e, c] for e, c in r.curve],
                    "clusters": r.clusters,
                    "noise": r.noise,
                }
                for r in self.rounds
            ],
            "unclustered": self.unclustered,
            "stop_reason": self.stop_reason,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "ClusteringResult":
        rounds = [
            ClusterRound(
                round=int(r["round"]),
                eps=float(r["eps"]),
                clusters=[list(c) for c in r["clusters"]],
                noise=list(r["noise"]),
                curve=[(float(e), int(c)) for e, c in r["curve"]],
                terminal=bool(r.get("terminal", False)),
            )
            for r in obj["rounds"]
        ]
        return cls(rounds, list(obj["unclustered"]), obj.get("stop_reason", ""))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), ensure_ascii=False, indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ClusteringResult":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"cluster report not found: {path}")
        return cls.from_json(json.loads(path.read_text(encoding="utf-8")))


def dbscan(matrix: DistanceMatrix, eps: float, min_pts: int) -> tuple[list[list[str]], list[str]]:
    """Cluster ``matrix`` with closed eps-balls that count the point itself.

    Points are visited in ascending id order; clusters are numbered by
    discovery and a border point reachable from several clusters goes to the
    first one discovered. Members are listed in ascending id order.
    """
    if not eps > 0:
        raise ValidationError("eps must be > 0")
    n = len(matrix)
    if n == 0:
        return [], []
    order = sorted(range(n), key=lambda i: matrix.items[i])
    ordered = np.ascontiguousarray(matrix.values[np.ix_(order, order)])
    labels = kernels.dbscan_labels(ordered, float(eps), int(min_pts))
    ids = [matrix.items[i] for i in order]
    k = int(labels.max()) + 1 if n else 0
    clusters: list[list[str]] = [[] for _ in range(max(k, 0))]
    noise = []
    for item, lab in zip(ids, labels):
        if lab < 0:
            noise.append(item)
        else:
            clusters[lab].append(item)
    return clusters, noise


def eps_grid(lo: float, hi: float, step: float) -> list[float]:
    if lo > hi:
        raise ValidationError(f"empty eps range [{lo}, {hi}]")
    if not step > 0:
        raise ValidationError("eps_step must be > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 10) for k in range(count)]


def sweep_epsilon(
    matrix: DistanceMatrix,
    eps_range: tuple[float, float],
    eps_step: float,
    min_pts: int,
) -> tuple[float, list[tuple[float, int]]]:
    """Cluster at every grid eps; return the first eps with the most clusters and the curve."""
    grid = eps_grid(eps_range[0], eps_range[1], eps_step)
    curve = [(eps, len(dbscan(matrix, eps, min_pts)[0])) for eps in grid]
    best = max(curve, key=lambda ec: ec[1])[1]
    chosen = next(eps for eps, c in curve if c == best)
    return chosen, curve


def terminal_check(cluster: Sequence[str], rendered: Mapping[str, str]) -> bool:
    """True if two members share no aligned character: lev == max(len)."""
    strings = [rendered[i] for i in cluster]
    for a, b in combinations(strings, 2):
        if levenshtein(a, b) == max(len(a), len(b)):
            return True
    return False


def cluster_multi_density(
    rendered: Mapping[str, str],
    matrix: DistanceMatrix,
    config: ClusteringConfig | None = None,
) -> ClusteringResult:
    """Run the multi-density loop.

    ``rendered`` maps each matrix id to the string its candidate set renders
    to; it is only used by the terminal rule.
    """
    config = config or ClusteringConfig()
    config.validate(matrix.metric_kind)
    missing = [i for i in matrix.items if i not in rendered]
    if missing:
        raise ValidationError(f"no rendered string for {len(missing)} matrix ids, e.g. {missing[0]!r}")

    result = ClusteringResult()
    remaining = sorted(matrix.items)
    lo, hi = config.eps_range
    while True:
        if len(result.rounds) >= config.max_rounds:
            result.stop_reason = "max_rounds"
            break
        if lo > hi + 1e-9:
            result.stop_reason = "eps_exhausted"
            break
        if not remaining:
            result.stop_reason = "all_clustered"
            break
        sub = matrix.submatrix(remaining)
        eps, curve = sweep_epsilon(sub, (lo, hi), config.eps_step, config.min_pts)
        clusters, noise = dbscan(sub, eps, config.min_pts)
        if not clusters:
            result.stop_reason = "no_new_cluster"
            break
        terminal = any(terminal_check(c, rendered) for c in clusters)
        result.rounds.append(ClusterRound(len(result.rounds) + 1, eps, clusters, noise, curve, terminal))
        remaining = noise
        if terminal:
            result.stop_reason = "terminal_rule"
            break
        lo = round(eps + config.eps_step, 10)
    result.unclustered = list(remaining)
    return result


def curve_rows(result: ClusteringResult) -> list[tuple[int, float, int]]:
    return [(r.round, eps, count) for r in result.rounds for eps, count in r.curve]


def config_dict(config: ClusteringConfig) -> dict:
    d = asdict(config)
    d["eps_range"] = list(config.eps_range)
    return d

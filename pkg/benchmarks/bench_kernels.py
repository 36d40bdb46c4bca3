"""Compare the compiled and pure-Python kernels on a synthetic corpus.

    python3 benchmarks/bench_kernels.py --clauses 1000 --repeat 3

Times the pairwise edit-distance matrix and a full eps sweep of DBSCAN for
every importable backend and checks the backends agree.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from caseminer.clustering import eps_grid
from caseminer.extraction import extract_candidate_set
from caseminer.kernels import available_backends
from caseminer.synthetic import make_corpus


def best_of(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--clauses", type=int, default=600)
    ap.add_argument("--cases", type=int, default=80)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--min-pts", type=int, default=5)
    args = ap.parse_args(argv)

    corpus = make_corpus(n_clauses=args.clauses, n_cases=args.cases)
    strings = [extract_candidate_set(p).render() for p in corpus.parses]
    lengths = np.array([len(s) for s in strings])
    print(f"{len(strings)} candidate sets, mean length {lengths.mean():.1f}")

    results = {}
    for name, mod in sorted(available_backends().items()):
        t_mat, lev = best_of(lambda: mod.pairwise_levenshtein(strings), args.repeat)
        dist = 1.0 + lev / np.maximum(np.maximum.outer(lengths, lengths), 1)
        dist = np.ascontiguousarray(dist, dtype=np.float64)
        grid = eps_grid(1.0, 2.0, 0.01)
        t_sweep, labels = best_of(lambda: [mod.dbscan_labels(dist, e, args.min_pts) for e in grid], args.repeat)
        results[name] = (lev, labels)
        print(f"{name:>7}: matrix {t_mat * 1e3:9.1f} ms   sweep ({len(grid)} eps) {t_sweep * 1e3:9.1f} ms")

    if len(results) > 1:
        (_, (lev_a, lab_a)), (_, (lev_b, lab_b)) = list(results.items())[:2]
        same = np.array_equal(lev_a, lev_b) and all(np.array_equal(x, y) for x, y in zip(lab_a, lab_b))
        print("backends agree" if same else "BACKENDS DISAGREE")


if __name__ == "__main__":
    main()

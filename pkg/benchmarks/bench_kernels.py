#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Covers the operations that dominate real workloads: full community
detection, the exhaustive-scan inner loop (subgraph + detection + scoring),
betweenness, and all-pairs BFS aggregates. Both lanes must produce
identical outputs; this also re-checks that here.

Run:  python benchmarks/bench_kernels.py [--repeat N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from commvuln import DetectorConfig, fixture
from commvuln._kernels import HAVE_SPEEDUPS, pure
from commvuln.louvain import detect_communities


def _timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_louvain(backend, g, iterations=200):
    weights = np.ones(g.indices.shape[0])
    self_w = np.zeros(g.n)

    def run():
        for seed in range(iterations):
            backend.louvain(g.indptr, g.indices, weights, self_w, seed, 100, 1e-7)

    return run


def bench_scan_slice(backend, g, n_subsets=400):
    """Exhaustive-style inner loop: mask, induced subgraph, detection."""
    rng = np.random.default_rng(1)
    subsets = [rng.choice(g.n, size=5, replace=False) for _ in range(n_subsets)]

    def run():
        for s in subsets:
            mask = np.ones(g.n, dtype=np.uint8)
            mask[s] = 0
            indptr, indices, weights = backend.induced_csr(g.indptr, g.indices, g.weights, mask)
            backend.louvain(indptr, indices, weights, np.zeros(indptr.shape[0] - 1), 0, 100, 1e-7)

    return run


def bench_brandes(backend, g):
    return lambda: backend.brandes_betweenness(g.indptr, g.indices, None)


def bench_bfs_stats(backend, g):
    return lambda: backend.bfs_stats(g.indptr, g.indices)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions (best-of)")
    args = parser.parse_args()

    if not HAVE_SPEEDUPS:
        print("compiled extension not available; only the pure lane can be timed")
        print("(build it with: pip install -e . --no-build-isolation)")
        return 1
    from commvuln._kernels import _speedups as compiled

    karate = fixture("karate")[0]
    railway = fixture("railway")[0]

    cases = [
        ("louvain x200 (karate)", bench_louvain(compiled, karate), bench_louvain(pure, karate)),
        ("scan slice x400 (karate)", bench_scan_slice(compiled, karate), bench_scan_slice(pure, karate)),
        ("louvain x200 (railway)", bench_louvain(compiled, railway, 200), bench_louvain(pure, railway, 200)),
        ("betweenness (railway)", bench_brandes(compiled, railway), bench_brandes(pure, railway)),
        ("bfs stats (railway)", bench_bfs_stats(compiled, railway), bench_bfs_stats(pure, railway)),
    ]

    # sanity: identical outputs before timing anything
    for g in (karate, railway):
        w = np.ones(g.indices.shape[0])
        z = np.zeros(g.n)
        assert np.array_equal(
            compiled.louvain(g.indptr, g.indices, w, z, 0, 100, 1e-7),
            pure.louvain(g.indptr, g.indices, w, z, 0, 100, 1e-7),
        )
        assert np.array_equal(
            compiled.brandes_betweenness(g.indptr, g.indices, None),
            pure.brandes_betweenness(g.indptr, g.indices, None),
        )
    print("lane outputs identical: ok\n")

    print(f"{'case':30s} {'compiled':>12s} {'pure':>12s} {'speedup':>9s}")
    for name, fast, slow in cases:
        t_fast = _timeit(fast, args.repeat)
        t_slow = _timeit(slow, max(1, args.repeat - 2))
        print(f"{name:30s} {t_fast * 1e3:9.1f} ms {t_slow * 1e3:9.1f} ms {t_slow / t_fast:8.1f}x")
    # a detection sanity line so the numbers above have context
    p = detect_communities(railway, DetectorConfig(rng_seed=0))
    print(f"\nrailway detection: {p.num_communities} communities (backend: compiled)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

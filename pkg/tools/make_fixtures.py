#!/usr/bin/env python3
"""Regenerate the bundled dataset files under src/commvuln/datasets/.

karate is the classic Zachary club graph (via networkx) with its two-faction
ground truth. The football- and railway-sized fixtures are deterministic
planted-partition graphs matching the published node/edge/community counts
of those datasets; the real files are not redistributable here, so these
stand-ins keep every size-dependent code path and ordering experiment
runnable out of the box. Real variants can always be supplied as user files.
"""
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "src" / "commvuln" / "datasets"

# college-football shape: 12 groups of realistic sizes; group 5 plays the
# role of the independents, whose games are all cross-group
FOOTBALL_SIZES = [9, 8, 11, 12, 10, 5, 13, 8, 10, 12, 7, 10]
FOOTBALL_M, FOOTBALL_INTRA = 613, 0.615
FOOTBALL_CROSS_ONLY = {5}
RAILWAY_GROUPS, RAILWAY_N = 21, 301
RAILWAY_M, RAILWAY_INTRA = 1224, 0.72


def planted_partition(sizes: list[int], m: int, intra_fraction: float, seed: int,
                      cross_only: set[int] = frozenset()):
    """Exact-m planted partition; retries sub-seeds until connected.

    Blocks listed in `cross_only` get no intra edges at all.
    """
    n = sum(sizes)
    blocks = np.repeat(np.arange(len(sizes)), sizes)
    intra_pairs = []
    inter_pairs = []
    for u in range(n):
        for v in range(u + 1, n):
            if blocks[u] == blocks[v] and int(blocks[u]) not in cross_only:
                intra_pairs.append((u, v))
            else:
                inter_pairs.append((u, v))
    m_in = min(round(m * intra_fraction), len(intra_pairs))
    m_out = m - m_in
    if m_out > len(inter_pairs):
        raise ValueError("not enough inter-block pairs")
    for attempt in range(100):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(attempt,)))
        chosen_in = rng.choice(len(intra_pairs), size=m_in, replace=False)
        chosen_out = rng.choice(len(inter_pairs), size=m_out, replace=False)
        edges = sorted(
            [intra_pairs[i] for i in chosen_in] + [inter_pairs[i] for i in chosen_out]
        )
        if _connected(n, edges):
            return edges, blocks
    raise RuntimeError("could not generate a connected instance")


def _connected(n: int, edges) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(x) for x in range(n)}) == 1


def railway_sizes(seed: int) -> list[int]:
    """Heterogeneous group sizes (min 5) summing to 301."""
    rng = np.random.default_rng(seed)
    raw = rng.gamma(2.0, 1.0, size=RAILWAY_GROUPS)
    sizes = np.maximum(5, np.round(raw / raw.sum() * RAILWAY_N).astype(int))
    while sizes.sum() != RAILWAY_N:
        idx = rng.integers(0, RAILWAY_GROUPS)
        if sizes.sum() > RAILWAY_N and sizes[idx] > 5:
            sizes[idx] -= 1
        elif sizes.sum() < RAILWAY_N:
            sizes[idx] += 1
    return sizes.tolist()


def write_dataset(name: str, edges, blocks) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / f"{name}.edges", "w", encoding="utf-8") as fh:
        fh.write(f"# {name}: {1 + max(max(e) for e in edges)} nodes, {len(edges)} edges\n")
        for u, v in edges:
            fh.write(f"{u} {v}\n")
    with open(OUT / f"{name}.communities", "w", encoding="utf-8") as fh:
        for v, b in enumerate(blocks):
            fh.write(f"{v} {int(b)}\n")


def make_karate() -> None:
    import networkx as nx

    g = nx.karate_club_graph()
    edges = sorted((min(u, v), max(u, v)) for u, v in g.edges())
    blocks = [0 if g.nodes[v]["club"] == "Mr. Hi" else 1 for v in range(g.number_of_nodes())]
    write_dataset("karate", edges, blocks)
    print(f"karate: n={g.number_of_nodes()} m={len(edges)} c={len(set(blocks))}")


def main() -> int:
    make_karate()
    edges, blocks = planted_partition(
        FOOTBALL_SIZES, FOOTBALL_M, FOOTBALL_INTRA, seed=101, cross_only=FOOTBALL_CROSS_ONLY
    )
    write_dataset("football", edges, blocks)
    print(f"football: n={sum(FOOTBALL_SIZES)} m={len(edges)} c={len(FOOTBALL_SIZES)}")
    sizes = railway_sizes(seed=4151)
    edges, blocks = planted_partition(sizes, RAILWAY_M, RAILWAY_INTRA, seed=20260811)
    write_dataset("railway", edges, blocks)
    print(f"railway: n={sum(sizes)} m={len(edges)} c={len(sizes)} sizes={sizes}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Enumerate all connected cubic graphs on n vertices and write graph6 files.

One-time developer tool (needs networkx); the package itself only consumes
the generated files.  Vertices are completed in index order: each vertex's
missing neighbors are drawn from later already-introduced vertices with
spare degree plus fresh vertices taken in index order.  Two safe symmetry
reductions keep the candidate count small:

  - fresh vertices are interchangeable, so only the lowest unused index is
    ever introduced next;
  - already-introduced candidates with identical current neighbor sets are
    interchangeable, so a chosen subset must take each such class in index
    order (prefix rule).

Every connected cubic graph appears among the candidates (any graph can be
relabeled to respect the introduction order), and surviving duplicates are
removed by isomorphism: candidates are bucketed by adjacency spectrum plus
per-vertex triangle counts, then checked exactly with VF2.

Known class counts for cross-checking: n=10: 19, n=12: 85, n=14: 509,
n=16: 4060.

Usage: python3 tools/generate_datasets.py 10 12 14 --out data/
"""

from __future__ import annotations

import argparse
import sys
import time
from itertools import combinations
from pathlib import Path

import networkx as nx
import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from kuramoto_patterns.graphs import Graph, validate_cubic, is_connected, write_graph6_file

EXPECTED = {4: 1, 6: 2, 8: 5, 10: 19, 12: 85, 14: 509, 16: 4060, 18: 41301}


def enumerate_candidates(n):
    deg = [0] * n
    adj = [set() for _ in range(n)]
    out = []

    def rec(v, used):
        if v == used:
            if v == n:
                out.append(
                    tuple(
                        (u, w) for u in range(n) for w in sorted(adj[u]) if u < w
                    )
                )
            return
        need = 3 - deg[v]
        if need == 0:
            rec(v + 1, used)
            return
        cands = [u for u in range(v + 1, used) if deg[u] < 3]
        keyof = {u: frozenset(adj[u]) for u in cands}
        maxfresh = min(need, n - used)
        for nfresh in range(maxfresh + 1):
            nexist = need - nfresh
            if nexist > len(cands):
                continue
            for chosen in combinations(cands, nexist):
                chosen_set = set(chosen)
                # prefix rule within interchangeable classes
                if any(
                    w < u and w not in chosen_set and keyof[w] == keyof[u]
                    for u in chosen
                    for w in cands
                ):
                    continue
                nbrs = list(chosen) + list(range(used, used + nfresh))
                for u in nbrs:
                    adj[v].add(u)
                    adj[u].add(v)
                    deg[u] += 1
                deg[v] = len(adj[v])
                rec(v + 1, used + nfresh)
                for u in nbrs:
                    adj[v].discard(u)
                    adj[u].discard(v)
                    deg[u] -= 1
                deg[v] = len(adj[v])

    rec(0, 1)
    return out


def invariant_key(edges, n):
    a = np.zeros((n, n))
    for u, v in edges:
        a[u, v] = a[v, u] = 1.0
    spectrum = tuple(np.round(np.linalg.eigvalsh(a), 8))
    a3 = np.linalg.matrix_power(a.astype(np.int64), 3)
    triangles = tuple(sorted(int(a3[i, i]) for i in range(n)))
    return spectrum + triangles


def distinct_graphs(candidates, n):
    buckets: dict = {}
    reps = []
    for edges in candidates:
        key = invariant_key(edges, n)
        g = None
        duplicate = False
        for other in buckets.get(key, []):
            if g is None:
                g = nx.Graph(list(edges))
            if nx.is_isomorphic(g, other):
                duplicate = True
                break
        if not duplicate:
            if g is None:
                g = nx.Graph(list(edges))
            buckets.setdefault(key, []).append(g)
            reps.append(edges)
    return reps


def generate(n: int) -> list[Graph]:
    t0 = time.time()
    candidates = enumerate_candidates(n)
    t1 = time.time()
    reps = distinct_graphs(candidates, n)
    t2 = time.time()
    graphs = [Graph.from_edges(n, e) for e in reps]
    for g in graphs:
        assert validate_cubic(g).ok and is_connected(g)
    if n in EXPECTED and len(graphs) != EXPECTED[n]:
        raise RuntimeError(
            f"n={n}: found {len(graphs)} classes, expected {EXPECTED[n]}"
        )
    print(
        f"n={n}: {len(candidates)} candidates -> {len(graphs)} graphs "
        f"(enumerate {t1-t0:.1f}s, dedup {t2-t1:.1f}s)",
        flush=True,
    )
    return graphs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("sizes", nargs="+", type=int)
    ap.add_argument("--out", default="data", type=Path)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for n in args.sizes:
        graphs = generate(n)
        from kuramoto_patterns.graphs import encode_graph6

        graphs.sort(key=encode_graph6)
        path = args.out / f"cubic{n}.g6"
        count = write_graph6_file(path, graphs)
        print(f"wrote {count} records to {path}", flush=True)


if __name__ == "__main__":
    main()

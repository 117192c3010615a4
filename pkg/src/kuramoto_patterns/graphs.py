"""Cubic (3-regular) graphs: graph6 parsing, validation, and named families.

Graphs are immutable; vertices are 0..n-1 and edges are stored as sorted
(u, v) pairs with u < v.  The graph6 codec implements the short header form
(n <= 62) only: one byte n+63 followed by the upper-triangle adjacency bits
in column order x(0,1), x(0,2), x(1,2), x(0,3), ..., packed 6 bits per byte
(MSB first), each byte offset by 63, zero-padded to a byte boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Graph",
    "CubicGraph",
    "CubicityReport",
    "Graph6Error",
    "NotCubicError",
    "parse_graph6",
    "encode_graph6",
    "read_graph6_file",
    "write_graph6_file",
    "validate_cubic",
    "is_connected",
    "double_ring",
    "moebius_ladder",
    "twisted_ring",
    "high_energy_e",
    "high_energy_f",
    "patternless_chain",
    "invariant_key",
    "fundamental_cycles",
]


class Graph6Error(ValueError):
    """Malformed graph6 record."""


class NotCubicError(ValueError):
    """Graph fails the 3-regularity invariants."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1.

    ``edges`` is a sorted tuple of (u, v) pairs with u < v.  ``id`` is an
    optional source label (e.g. "cubic12.g6:50").
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    id: str | None = None

    @staticmethod
    def from_edges(n: int, edges: Iterable[Sequence[int]], id: str | None = None) -> "Graph":
        canon = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
        return Graph(n, canon, id)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return tuple(deg)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge endpoints as two int32 arrays (u[k] < v[k]), in edge order."""
        if not self.edges:
            z = np.zeros(0, dtype=np.int32)
            return z, z.copy()
        eu, ev = zip(*self.edges)
        return np.asarray(eu, dtype=np.int32), np.asarray(ev, dtype=np.int32)

    def with_id(self, id: str) -> "Graph":
        return type(self)(self.n, self.edges, id)


@dataclass(frozen=True)
class CubicGraph(Graph):
    """Graph that satisfies all 3-regularity invariants (checked on init)."""

    def __post_init__(self) -> None:
        report = validate_cubic(self)
        if not report.ok:
            raise NotCubicError(f"not a valid cubic graph: {report.describe()}")

    @staticmethod
    def from_graph(g: Graph) -> "CubicGraph":
        return CubicGraph(g.n, g.edges, g.id)


@dataclass(frozen=True)
class CubicityReport:
    """Outcome of validate_cubic; lists every violated invariant."""

    ok: bool
    bad_degree_vertices: tuple[tuple[int, int], ...] = ()  # (vertex, degree)
    self_loops: tuple[tuple[int, int], ...] = ()
    duplicate_edges: tuple[tuple[int, int], ...] = ()
    out_of_range_edges: tuple[tuple[int, int], ...] = ()
    odd_vertex_count: bool = False

    def describe(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.odd_vertex_count:
            parts.append("odd vertex count")
        if self.out_of_range_edges:
            parts.append(f"edges out of range {self.out_of_range_edges[:4]}")
        if self.self_loops:
            parts.append(f"self loops {self.self_loops[:4]}")
        if self.duplicate_edges:
            parts.append(f"duplicate edges {self.duplicate_edges[:4]}")
        if self.bad_degree_vertices:
            parts.append(f"degrees != 3 at {self.bad_degree_vertices[:6]}")
        return "; ".join(parts)


def validate_cubic(g: Graph) -> CubicityReport:
    """Check every cubic-graph invariant; total (never raises)."""
    loops = tuple((u, v) for u, v in g.edges if u == v)
    out_of_range = tuple(
        (u, v) for u, v in g.edges if not (0 <= u < g.n and 0 <= v < g.n)
    )
    seen: set[tuple[int, int]] = set()
    dups = []
    for u, v in g.edges:
        e = (min(u, v), max(u, v))
        if e in seen:
            dups.append(e)
        seen.add(e)
    deg = [0] * g.n
    for u, v in g.edges:
        if 0 <= u < g.n and 0 <= v < g.n:
            deg[u] += 1
            deg[v] += 1
    bad_deg = tuple((v, d) for v, d in enumerate(deg) if d != 3)
    report = CubicityReport(
        ok=not (loops or out_of_range or dups or bad_deg or g.n % 2),
        bad_degree_vertices=bad_deg,
        self_loops=loops,
        duplicate_edges=tuple(dups),
        out_of_range_edges=out_of_range,
        odd_vertex_count=bool(g.n % 2),
    )
    return report


def is_connected(g: Graph) -> bool:
    """Breadth-first reachability from vertex 0."""
    if g.n == 0:
        return True
    seen = bytearray(g.n)
    seen[0] = 1
    queue = [0]
    count = 1
    nbrs = g.neighbors
    while queue:
        v = queue.pop()
        for w in nbrs[v]:
            if not seen[w]:
                seen[w] = 1
                count += 1
                queue.append(w)
    return count == g.n


# ---------------------------------------------------------------------------
# graph6 codec (short header form, n <= 62)
# ---------------------------------------------------------------------------

def parse_graph6(line: bytes | str) -> Graph:
    """Decode one graph6 record into a Graph (cubicity is not checked here)."""
    if isinstance(line, str):
        data = line.strip().encode("ascii", errors="replace")
    else:
        data = line.strip()
    if data.startswith(b">>graph6<<"):
        data = data[len(b">>graph6<<"):]
    if not data:
        raise Graph6Error("empty record")
    head = data[0]
    if head == 126:  # '~' introduces the long header form
        raise Graph6Error("long-form graph6 header (n > 62) is not supported")
    if not 63 <= head <= 126:
        raise Graph6Error(f"header byte {head} outside printable range 63..126")
    n = head - 63
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    body = data[1:]
    if len(body) != nbytes:
        raise Graph6Error(
            f"record for n={n} needs {nbytes} data bytes, found {len(body)}"
        )
    bits: list[int] = []
    for b in body:
        if not 63 <= b <= 126:
            raise Graph6Error(f"data byte {b} outside printable range 63..126")
        x = b - 63
        bits.extend((x >> shift) & 1 for shift in (5, 4, 3, 2, 1, 0))
    if any(bits[nbits:]):
        raise Graph6Error("nonzero padding bits")
    edges = []
    k = 0
    for v in range(1, n):
        for u in range(v):
            if bits[k]:
                edges.append((u, v))
            k += 1
    return Graph.from_edges(n, edges)


def encode_graph6(g: Graph) -> bytes:
    """Encode a graph in the same short-header bit layout parse_graph6 reads."""
    if g.n > 62:
        raise Graph6Error("short-form graph6 encodes at most 62 vertices")
    present = set(g.edges)
    bits = []
    for v in range(1, g.n):
        for u in range(v):
            bits.append(1 if (u, v) in present else 0)
    while len(bits) % 6:
        bits.append(0)
    out = bytearray([g.n + 63])
    for i in range(0, len(bits), 6):
        x = 0
        for b in bits[i : i + 6]:
            x = (x << 1) | b
        out.append(x + 63)
    return bytes(out)


def read_graph6_file(path: str | Path) -> Iterator[Graph]:
    """Yield the graphs in a graph6 file, one record per line.

    Graph ids are "<filename>:<record>" with 1-based record numbers.
    Raises Graph6Error with the line number on a malformed record.
    """
    path = Path(path)
    with path.open("rb") as fh:
        record = 0
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            record += 1
            try:
                g = parse_graph6(raw)
            except Graph6Error as exc:
                raise Graph6Error(f"{path.name}:{lineno}: {exc}") from exc
            yield g.with_id(f"{path.name}:{record}")


def write_graph6_file(path: str | Path, graphs: Iterable[Graph]) -> int:
    count = 0
    with Path(path).open("wb") as fh:
        for g in graphs:
            fh.write(encode_graph6(g) + b"\n")
            count += 1
    return count


# ---------------------------------------------------------------------------
# Named families
# ---------------------------------------------------------------------------

def _require_even_at_least(n: int, minimum: int, family: str) -> None:
    if n % 2 or n < minimum:
        raise ValueError(f"{family} needs an even vertex count >= {minimum}, got {n}")


def double_ring(n: int) -> CubicGraph:
    """Two n/2-cycles joined by rungs (j, n/2+j).  Requires even n >= 10."""
    _require_even_at_least(n, 10, "double_ring")
    h = n // 2
    edges = []
    for j in range(h):
        edges.append((j, (j + 1) % h))
        edges.append((h + j, h + (j + 1) % h))
        edges.append((j, h + j))
    return CubicGraph.from_graph(Graph.from_edges(n, edges, id=f"double_ring({n})"))


def moebius_ladder(n: int) -> CubicGraph:
    """Single n-cycle plus antipodal chords (i, i+n/2).  Requires even n >= 10."""
    _require_even_at_least(n, 10, "moebius_ladder")
    h = n // 2
    edges = [(i, (i + 1) % n) for i in range(n)]
    edges += [(i, i + h) for i in range(h)]
    return CubicGraph.from_graph(Graph.from_edges(n, edges, id=f"moebius_ladder({n})"))


def _twist_swap_positions(m: int) -> tuple[int, int]:
    # Rung swap sits just after the last ascending phase position, so the
    # crossed links absorb the large phase step (see analytic.twisted_phases).
    p = (m - 1) // 2
    return p, p + 1


def twisted_ring(n: int) -> CubicGraph:
    """Double ring with one adjacent pair of rungs crossed.  n = 2m, m >= 5."""
    if n % 2:
        raise ValueError(f"twisted_ring needs an even vertex count, got {n}")
    m = n // 2
    if m < 5:
        raise ValueError(f"twisted_ring needs n = 2m with m >= 5, got n={n}")
    p, q = _twist_swap_positions(m)
    edges = []
    for j in range(m):
        edges.append((j, (j + 1) % m))
        edges.append((m + j, m + (j + 1) % m))
    for j in range(m):
        if j == p:
            edges.append((p, m + q))
        elif j == q:
            edges.append((q, m + p))
        else:
            edges.append((j, m + j))
    return CubicGraph.from_graph(Graph.from_edges(n, edges, id=f"twisted_ring({n})"))


def high_energy_e(n: int) -> tuple[CubicGraph, np.ndarray]:
    """Disjoint 5-cycles carrying the 5-wave, glued by equal-phase pairings.

    Returns the graph together with the exact equilibrium phases.  For
    n = 10m the construction pairs letter l of X-ring i with letter l of
    Y-ring (i+l) mod m; for even leftovers 10m < n < 10m+10 each extra
    vertex pair splices into two pairing edges of one letter, preserving
    every phase difference.  Requires even n >= 20.
    """
    _require_even_at_least(n, 20, "high_energy_e")
    m = n // 10
    k = n - 10 * m
    wave = 2.0 * math.pi / 5.0
    edges = []
    theta = np.zeros(n)
    for r in range(2 * m):
        base = 5 * r
        for i in range(5):
            edges.append((base + i, base + (i + 1) % 5))
            theta[base + i] = wave * i
    # letter-l pairing edges, kept in a table so the splice step can break them
    pairing: dict[int, list[tuple[int, int]]] = {}
    for letter in range(5):
        pairing[letter] = []
        for i in range(m):
            a = 5 * i + letter
            b = 5 * (m + (i + letter) % m) + letter
            pairing[letter].append((a, b))
    for letter in range(5):
        edges.extend(pairing[letter])
    for j in range(k // 2):
        letter = j
        (a1, a2), (a3, a4) = pairing[letter][0], pairing[letter][1]
        edges.remove((a1, a2))
        edges.remove((a3, a4))
        p1 = 10 * m + 2 * j
        p2 = p1 + 1
        theta[p1] = theta[p2] = wave * letter
        edges += [(p1, a1), (p1, a3), (p2, a2), (p2, a4), (p1, p2)]
    g = CubicGraph.from_graph(Graph.from_edges(n, edges, id=f"high_energy_e({n})"))
    return g, theta


def high_energy_f(m: int) -> tuple[CubicGraph, np.ndarray]:
    """Chain of m crossed 5-rings carrying the crossed-ring wave.

    Copies j and j+1 exchange the inner endpoints of one outer vertex's
    cross-ring edge (outer position j mod 5).  All copies hold identical
    phases, so the exchange preserves every phase difference and the chain
    stays an exact equilibrium.  Requires m >= 1.
    """
    if m < 1:
        raise ValueError(f"high_energy_f needs m >= 1, got {m}")
    from .analytic import twisted_phases

    block = twisted_ring(10)
    block_phases = twisted_phases(5)
    inner_of = {u: v for u, v in block.edges if u < 5 <= v}
    n = 10 * m
    edges = []
    theta = np.zeros(n)
    for j in range(m):
        off = 10 * j
        edges += [(off + u, off + v) for u, v in block.edges]
        theta[off : off + 10] = block_phases
    for j in range(m - 1):
        p = j % 5
        q = inner_of[p]
        a, b = 10 * j, 10 * (j + 1)
        edges.remove((a + p, a + q))
        edges.remove((b + p, b + q))
        edges += [(a + p, b + q), (b + p, a + q)]
    g = CubicGraph.from_graph(Graph.from_edges(n, edges, id=f"high_energy_f({m})"))
    return g, theta


def patternless_chain(n: int) -> CubicGraph:
    """Chain graph whose chordless cycles all have length <= 4.

    Path 0-1-...-n-1 with head chords (0,2),(0,3),(1,4), mirrored tail
    chords, and the interior completed left-to-right by 4-vertex blocks
    {a..a+3} with chords (a,a+2),(a+1,a+3), plus a single 6-vertex block
    {a..a+5} with chords (a,a+2),(a+1,a+4),(a+3,a+5) when the interior
    length is 2 mod 4.  Supported sizes: n = 10 or even n >= 14.
    """
    if n != 10 and (n % 2 or n < 14):
        raise ValueError(f"patternless_chain supports n=10 or even n >= 14, got {n}")
    edges = [(i, i + 1) for i in range(n - 1)]
    edges += [(0, 2), (0, 3), (1, 4)]
    edges += [(n - 1, n - 3), (n - 1, n - 4), (n - 2, n - 5)]
    a = 5
    remaining = n - 10
    while remaining > 0:
        if remaining % 4 == 2:
            if remaining != 6:
                # defer the single 6-block to the end of the fill
                edges += [(a, a + 2), (a + 1, a + 3)]
                a += 4
                remaining -= 4
            else:
                edges += [(a, a + 2), (a + 1, a + 4), (a + 3, a + 5)]
                a += 6
                remaining -= 6
        else:
            edges += [(a, a + 2), (a + 1, a + 3)]
            a += 4
            remaining -= 4
    return CubicGraph.from_graph(
        Graph.from_edges(n, edges, id=f"patternless_chain({n})")
    )


def invariant_key(g: Graph) -> tuple:
    """Cheap isomorphism invariant: adjacency spectrum plus triangle counts.

    Equal keys do not prove isomorphism, but unequal keys disprove it; this
    is the "simple invariant comparison" used to match graphs found by
    different routes.
    """
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    spectrum = tuple(float(x) for x in np.round(np.linalg.eigvalsh(a), 8))
    a3 = np.linalg.matrix_power(a.astype(np.int64), 3)
    triangles = tuple(sorted(int(a3[i, i]) for i in range(g.n)))
    return spectrum + triangles


# ---------------------------------------------------------------------------
# Cycle basis
# ---------------------------------------------------------------------------

def fundamental_cycles(g: Graph) -> list[list[int]]:
    """Spanning-tree fundamental cycle basis as vertex sequences.

    Each cycle is a closed walk [v0, v1, ..., vk] with the closing edge
    (vk, v0) implicit; no vertex repeats within a cycle.  For a connected
    graph, returns |edges| - n + 1 cycles.
    """
    if not is_connected(g):
        raise ValueError("fundamental_cycles requires a connected graph")
    parent = [-1] * g.n
    depth = [0] * g.n
    order = [0]
    seen = bytearray(g.n)
    seen[0] = 1
    tree_edges = set()
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for w in g.neighbors[v]:
            if not seen[w]:
                seen[w] = 1
                parent[w] = v
                depth[w] = depth[v] + 1
                tree_edges.add((min(v, w), max(v, w)))
                order.append(w)
    cycles = []
    for u, v in g.edges:
        if (u, v) in tree_edges:
            continue
        pu, pv = [u], [v]
        a, b = u, v
        while depth[a] > depth[b]:
            a = parent[a]
            pu.append(a)
        while depth[b] > depth[a]:
            b = parent[b]
            pv.append(b)
        while a != b:
            a = parent[a]
            b = parent[b]
            pu.append(a)
            pv.append(b)
        # pu ends at the common ancestor; walk u..lca then back down to v
        cycles.append(pu + pv[-2::-1])
    return cycles

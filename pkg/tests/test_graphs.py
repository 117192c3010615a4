import itertools

import numpy as np
import pytest

from kuramoto_patterns.graphs import (
    CubicGraph,
    Graph,
    Graph6Error,
    NotCubicError,
    double_ring,
    encode_graph6,
    fundamental_cycles,
    high_energy_e,
    high_energy_f,
    invariant_key,
    is_connected,
    moebius_ladder,
    parse_graph6,
    patternless_chain,
    read_graph6_file,
    twisted_ring,
    validate_cubic,
)

from conftest import dataset


# ---------------------------------------------------------------------------
# graph6 codec
# ---------------------------------------------------------------------------

def test_parse_k4():
    # 'C' = 63+4, '~' = 63+63 = all six upper-triangle bits set
    g = parse_graph6(b"C~")
    assert g.n == 4
    assert set(g.edges) == {(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)}
    assert validate_cubic(g).ok


def test_parse_two_isolated_vertices():
    g = parse_graph6("A?")
    assert g.n == 2
    assert g.edges == ()
    assert not validate_cubic(g).ok


def test_parse_k33():
    # hand-encoded complete bipartite graph on parts {0,1,2} / {3,4,5}
    g = parse_graph6(b"EFz_")
    expected = {(u, v) for u in (0, 1, 2) for v in (3, 4, 5)}
    assert g.n == 6
    assert set(g.edges) == expected
    assert validate_cubic(g).ok


@pytest.mark.parametrize(
    "bad, match",
    [
        (b"", "empty"),
        (b"C", "data bytes"),
        (b"C~~", "data bytes"),
        (b"C" + bytes([30]), "printable range"),
        (b"~???", "long-form"),
        (b"B" + bytes([63 + 1]), "padding"),  # n=2 record with a padding bit set
    ],
)
def test_parse_errors(bad, match):
    with pytest.raises(Graph6Error, match=match):
        parse_graph6(bad)


def test_header_only_out_of_range():
    with pytest.raises(Graph6Error):
        parse_graph6(bytes([200]))


def test_roundtrip_constructions():
    for g in [double_ring(10), moebius_ladder(12), twisted_ring(14), patternless_chain(16)]:
        assert parse_graph6(encode_graph6(g)).edges == g.edges


def test_roundtrip_dataset_bytes():
    path = dataset(10)
    raw_lines = [l.strip() for l in path.read_bytes().splitlines() if l.strip()]
    graphs = list(read_graph6_file(path))
    assert len(graphs) == len(raw_lines) == 19
    for raw, g in zip(raw_lines, graphs):
        assert encode_graph6(g) == raw


def test_read_file_reports_line_numbers(tmp_path):
    p = tmp_path / "bad.g6"
    p.write_bytes(b"C~\n\x01\x02\n")
    with pytest.raises(Graph6Error, match="bad.g6:2"):
        list(read_graph6_file(p))


# ---------------------------------------------------------------------------
# validation / connectivity
# ---------------------------------------------------------------------------

def test_validate_cubic_reports():
    five_cycle = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    rep = validate_cubic(five_cycle)
    assert not rep.ok
    assert rep.odd_vertex_count
    assert len(rep.bad_degree_vertices) == 5

    with pytest.raises(NotCubicError):
        CubicGraph.from_graph(five_cycle)


def test_is_connected():
    assert is_connected(parse_graph6(b"C~"))
    k4 = parse_graph6(b"C~")
    two_k4 = Graph.from_edges(
        8, list(k4.edges) + [(u + 4, v + 4) for u, v in k4.edges]
    )
    assert validate_cubic(two_k4).ok
    assert not is_connected(two_k4)
    assert is_connected(double_ring(10))


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("ctor, bad_sizes", [
    (double_ring, (8, 9, 11)),
    (moebius_ladder, (8, 9)),
    (twisted_ring, (8, 9, 11)),
    (patternless_chain, (8, 11, 12)),
])
def test_constructor_domain_errors(ctor, bad_sizes):
    for n in bad_sizes:
        with pytest.raises(ValueError):
            ctor(n)


def test_high_energy_domain_errors():
    for n in (10, 18, 21):
        with pytest.raises(ValueError):
            high_energy_e(n)
    with pytest.raises(ValueError):
        high_energy_f(0)


def test_constructed_graphs_are_cubic_and_connected():
    built = [
        double_ring(10), double_ring(12), moebius_ladder(10), moebius_ladder(50),
        twisted_ring(10), twisted_ring(26), patternless_chain(10),
        patternless_chain(14), patternless_chain(20),
        high_energy_e(20)[0], high_energy_e(24)[0], high_energy_f(3)[0],
    ]
    for g in built:
        assert validate_cubic(g).ok, g.id
        assert is_connected(g), g.id
        assert len(g.edges) == 3 * g.n // 2


def test_double_ring_shape():
    g = double_ring(10)
    assert g.n == 10 and len(g.edges) == 15
    g12 = double_ring(12)
    assert len(g12.edges) == 18
    # girth 4: ring edge + two rungs + opposite ring edge
    assert (0, 1) in g12.edges and (0, 6) in g12.edges and (1, 7) in g12.edges


def test_moebius_matches_double_ring_size():
    assert len(moebius_ladder(10).edges) == 15


def _cycle_length_counts(g, max_len):
    """Multiset of simple cycle lengths, by exhaustive DFS (small graphs only)."""
    counts = {}
    nbrs = g.neighbors

    def extend(path, seen):
        last = path[-1]
        for w in nbrs[last]:
            if w == path[0] and len(path) >= 3:
                if path[1] < last:  # count each cycle once per orientation
                    counts[len(path)] = counts.get(len(path), 0) + 1
            elif w > path[0] and w not in seen and len(path) < max_len:
                extend(path + [w], seen | {w})

    for s in range(g.n):
        extend([s], {s})
    return counts


def test_twisted_differs_from_double_ring():
    a, b = double_ring(10), twisted_ring(10)
    assert a.degrees == b.degrees
    assert set(a.edges) != set(b.edges)
    # cycle-length multisets differ, so the graphs are not isomorphic
    assert _cycle_length_counts(a, 10) != _cycle_length_counts(b, 10)
    assert invariant_key(a) != invariant_key(b)


def _chordless_cycles_longer_than(g, length):
    """Brute-force list of chordless cycles exceeding `length`."""
    edge_set = set(g.edges)
    nbrs = g.neighbors
    found = []

    def chord_free(path):
        k = len(path)
        for i in range(k):
            for j in range(i + 2, k):
                if i == 0 and j == k - 1:
                    continue
                e = (min(path[i], path[j]), max(path[i], path[j]))
                if e in edge_set:
                    return False
        return True

    def extend(path, seen):
        last = path[-1]
        for w in nbrs[last]:
            if w == path[0] and len(path) > length:
                if path[1] < last and chord_free(path):
                    found.append(list(path))
            elif w > path[0] and w not in seen:
                # prune: any chord to a non-adjacent path vertex kills chordlessness
                if all(
                    (min(w, p), max(w, p)) not in edge_set
                    for p in path[:-1]
                ):
                    extend(path + [w], seen | {w})

    for s in range(g.n):
        extend([s], {s})
    return found


@pytest.mark.parametrize("n", [10, 14, 16, 18, 20])
def test_patternless_chain_has_only_short_chordless_cycles(n):
    g = patternless_chain(n)
    assert len(g.edges) == 3 * n // 2
    assert _chordless_cycles_longer_than(g, 4) == []


def test_high_energy_e_in_between_blocks():
    g20, th20 = high_energy_e(20)
    g22, th22 = high_energy_e(22)
    assert g22.n == 22 and validate_cubic(g22).ok and is_connected(g22)
    # the splice only adds equal-phase edges, so per-block energy is unchanged
    from kuramoto_patterns.dynamics import energy

    assert energy(g22, th22) == pytest.approx(energy(g20, th20), abs=1e-12)


def test_high_energy_f_chain_connected():
    for m in (1, 2, 3):
        g, _ = high_energy_f(m)
        assert g.n == 10 * m
        assert is_connected(g)
    assert set(high_energy_f(1)[0].edges) == set(twisted_ring(10).edges)


# ---------------------------------------------------------------------------
# cycle basis
# ---------------------------------------------------------------------------

def test_fundamental_cycles_counts():
    k4 = CubicGraph.from_graph(parse_graph6(b"C~"))
    assert len(fundamental_cycles(k4)) == 3
    g = double_ring(10)
    cycles = fundamental_cycles(g)
    assert len(cycles) == len(g.edges) - g.n + 1 == 6
    edge_set = set(g.edges)
    for cyc in cycles:
        assert len(set(cyc)) == len(cyc)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            assert (min(a, b), max(a, b)) in edge_set


def test_fundamental_cycles_rejects_disconnected():
    k4 = parse_graph6(b"C~")
    two = Graph.from_edges(8, list(k4.edges) + [(u + 4, v + 4) for u, v in k4.edges])
    with pytest.raises(ValueError):
        fundamental_cycles(two)

import math

import numpy as np
import pytest

from kuramoto_patterns.analytic import double_ring_phases, twisted_phases
from kuramoto_patterns.dynamics import (
    FixedPointReport,
    RefinementDivergedError,
    classify,
    energy,
    field,
    flow_to_equilibrium,
    gauge_normalize,
    jacobian,
    newton_refine,
    winding_number,
    wrap_angle,
)
from kuramoto_patterns.graphs import (
    CubicGraph,
    Graph,
    double_ring,
    parse_graph6,
    twisted_ring,
)

K4 = CubicGraph.from_graph(parse_graph6(b"C~"))


def test_field_zero_at_sync():
    assert np.allclose(field(double_ring(10), np.zeros(10)), 0.0)


def test_field_k4_four_twist():
    # each vertex sees +1, 0, -1 from the three others: exact equilibrium
    th = np.array([0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
    assert np.linalg.norm(field(K4, th)) < 1e-14


def test_field_double_ring_wave():
    g = double_ring(10)
    assert np.linalg.norm(field(g, double_ring_phases(10))) < 1e-13


def test_field_zero_sum_and_length_check():
    g = twisted_ring(12)
    rng = np.random.default_rng(3)
    th = rng.uniform(0, 2 * math.pi, g.n)
    assert abs(field(g, th).sum()) < 1e-12
    with pytest.raises(ValueError):
        field(g, th[:-1])


def test_energy_values():
    g = double_ring(18)
    assert energy(g, np.zeros(18)) == 0.0
    assert energy(g, double_ring_phases(18)) == pytest.approx(
        18 * (1 - math.cos(4 * math.pi / 18)), abs=1e-12
    )
    # an isolated 5-cycle carrying the equidistant wave
    ring = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    wave = np.arange(5) * (2 * math.pi / 5)
    assert energy(ring, wave) == pytest.approx(5 * (1 - math.cos(2 * math.pi / 5)), abs=1e-12)
    assert energy(ring, wave) == pytest.approx(3.4549, abs=1e-4)


def test_jacobian_structure():
    g = twisted_ring(10)
    rng = np.random.default_rng(7)
    th = rng.uniform(0, 2 * math.pi, g.n)
    j = jacobian(g, th)
    assert np.allclose(j, j.T)
    assert np.allclose(j @ np.ones(g.n), 0.0, atol=1e-12)


def test_jacobian_at_sync_is_minus_laplacian():
    lam = np.sort(np.linalg.eigvalsh(jacobian(K4, np.zeros(4))))
    assert np.allclose(lam, [-4.0, -4.0, -4.0, 0.0], atol=1e-12)


def test_gauge_normalize():
    assert np.allclose(gauge_normalize(0.7 * np.ones(5)), 0.0)
    th = np.array([0.0, 1.0, 2.0, 6.0])
    assert np.allclose(gauge_normalize(th), th % (2 * math.pi))
    shifted = gauge_normalize(th + 0.7)
    assert np.allclose(shifted, gauge_normalize(th))


def test_wrap_angle():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(2 * math.pi + 0.1) == pytest.approx(0.1)
    arr = wrap_angle(np.array([3 * math.pi, -0.5]))
    assert arr[0] == pytest.approx(math.pi) and arr[1] == pytest.approx(-0.5)


# ---------------------------------------------------------------------------
# flow / refinement
# ---------------------------------------------------------------------------

def test_flow_small_perturbation_returns_to_sync():
    g = double_ring(10)
    rng = np.random.default_rng(0)
    th0 = 1e-3 * rng.standard_normal(10)
    res = flow_to_equilibrium(g, th0)
    assert res.converged
    assert energy(g, res.theta) < 1e-8


def test_flow_already_converged_is_immediate():
    g = double_ring(10)
    res = flow_to_equilibrium(g, double_ring_phases(10))
    assert res.converged and res.steps == 0 and res.t == 0.0


def test_flow_ends_only_at_known_attractors():
    g = double_ring(10)
    pattern_e = energy(g, double_ring_phases(10))
    rng = np.random.default_rng(42)
    for _ in range(40):
        th0 = rng.uniform(0, 2 * math.pi, 10)
        res = flow_to_equilibrium(g, th0, residual_tol=1e-5)
        assert res.converged
        e = energy(g, res.theta)
        assert min(abs(e - 0.0), abs(e - pattern_e)) < 1e-3


def test_newton_refines_noisy_pattern_quadratically():
    g = double_ring(10)
    exact = double_ring_phases(10)
    rng = np.random.default_rng(5)
    noisy = exact + 1e-4 * rng.standard_normal(10)
    refined = newton_refine(g, noisy)
    assert np.linalg.norm(field(g, refined)) < 1e-12
    diffs = wrap_angle(gauge_normalize(refined) - gauge_normalize(exact))
    assert np.max(np.abs(diffs)) < 1e-10


def test_newton_requires_capture_radius():
    g = double_ring(10)
    with pytest.raises(ValueError, match="capture"):
        newton_refine(g, np.linspace(0, 3, 10))


def test_newton_exact_sync_unchanged():
    g = twisted_ring(10)
    out = newton_refine(g, np.zeros(10))
    assert np.allclose(out, 0.0)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def test_classify_sync_k4():
    rep = classify(K4, np.zeros(4))
    assert rep.classification == "sync"
    assert rep.spectral_gap == pytest.approx(4.0, abs=1e-12)
    assert rep.energy == 0.0
    assert rep.zero_eigs == 1
    assert all(l.kind == "short" for l in rep.links)


def test_classify_double_ring_pattern_all_links_short():
    g = double_ring(10)
    rep = classify(g, double_ring_phases(10))
    assert rep.classification == "stable-pattern"
    assert len(rep.links) == 15
    assert all(l.kind == "short" for l in rep.links)
    assert rep.n_long_links == 0
    assert rep.energy == pytest.approx(10 * (1 - math.cos(0.4 * math.pi)), abs=1e-12)


def test_classify_k4_twist_is_unstable():
    th = np.array([0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
    rep = classify(K4, th)
    assert rep.classification == "unstable"
    kinds = sorted(l.kind for l in rep.links)
    assert "critical" in kinds and "long" in kinds


def test_classify_rejects_non_fixed_point():
    with pytest.raises(ValueError, match="residual"):
        classify(double_ring(10), np.linspace(0, 2, 10))


def test_classify_critical_band():
    # a state engineered to have |delta| = pi/2 within the band
    th = np.array([0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
    rep = classify(K4, th, critical_band=1e-9)
    crit = [l for l in rep.links if l.kind == "critical"]
    assert len(crit) == 4  # the four quarter-turn edges


def test_report_roundtrips_through_json():
    g = twisted_ring(10)
    rep = classify(g, twisted_phases(5))
    back = FixedPointReport.from_dict(rep.to_dict())
    assert back.classification == rep.classification
    assert back.energy == rep.energy
    assert np.allclose(back.theta, rep.theta)
    assert back.links == rep.links
    assert back.windings == rep.windings


# ---------------------------------------------------------------------------
# winding numbers
# ---------------------------------------------------------------------------

def test_winding_sync_zero():
    g = double_ring(10)
    assert winding_number(np.zeros(10), [0, 1, 2, 3, 4], g) == 0


def test_winding_double_ring_each_ring_once():
    # each 5-ring of the 10-vertex double ring carries one full wrap
    th = double_ring_phases(10)
    g = double_ring(10)
    assert abs(winding_number(th, [0, 1, 2, 3, 4], g)) == 1
    assert abs(winding_number(th, [5, 6, 7, 8, 9], g)) == 1


def test_winding_five_ring_wave():
    ring = Graph.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    wave = np.arange(5) * (2 * math.pi / 5)
    assert winding_number(wave, [0, 1, 2, 3, 4], ring) == 1


def test_winding_rejects_non_cycle():
    g = double_ring(10)
    with pytest.raises(ValueError):
        winding_number(np.zeros(10), [0, 2, 4], g)  # (0,2) is not an edge
    with pytest.raises(ValueError):
        winding_number(np.zeros(10), [0, 1, 1], g)

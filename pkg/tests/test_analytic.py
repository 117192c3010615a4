import math

import numpy as np
import pytest

from kuramoto_patterns.analytic import (
    beta_star,
    double_ring_phases,
    e_energy,
    f_energy,
    g50_angles,
    loop_energy,
    moebius_phases,
    twisted_phases,
    twisted_root,
    two_pattern_angles,
)
from kuramoto_patterns.dynamics import classify, energy, field
from kuramoto_patterns.graphs import (
    double_ring,
    high_energy_e,
    high_energy_f,
    moebius_ladder,
    twisted_ring,
)


def test_twisted_root_brackets_and_residuals():
    for m in range(5, 21):
        r = twisted_root(m)
        lo, hi = r.bracket
        assert lo == pytest.approx(2 * math.pi / m)
        assert hi == pytest.approx(2 * math.pi / (m - 1))
        assert lo < r.value < hi
        assert r.residual < 1e-12


def test_twisted_root_domain():
    with pytest.raises(ValueError):
        twisted_root(4)


def test_beta_star_matches_m5_root():
    b = beta_star()
    assert b.bracket == pytest.approx((2 * math.pi / 5, math.pi / 2))
    assert abs(b.value - twisted_root(5).value) < 1e-12
    assert b.residual < 1e-12
    block = 8 * (1 - math.cos(b.value)) + 4 * (1 - math.cos(4 * b.value))
    assert block == pytest.approx(7.49165, abs=1e-4)


@pytest.mark.parametrize("n", [10, 12, 14, 18, 30, 50])
def test_double_ring_and_moebius_phases_are_equilibria(n):
    g = double_ring(n)
    th = double_ring_phases(n)
    assert np.linalg.norm(field(g, th)) < 1e-12
    assert energy(g, th) == pytest.approx(n * (1 - math.cos(4 * math.pi / n)), abs=1e-10)
    gm = moebius_ladder(n)
    thm = moebius_phases(n)
    assert np.linalg.norm(field(gm, thm)) < 1e-12
    assert energy(gm, thm) == pytest.approx(energy(g, th), abs=1e-10)


def test_double_ring_energy_reference_point():
    # the printed two-decimal reference 4.6863 is the n=16 value of
    # n*(1 - cos(4*pi/n)); see the sixteen-vertex double ring
    assert energy(double_ring(16), double_ring_phases(16)) == pytest.approx(4.6863, abs=5e-4)


@pytest.mark.parametrize("m", range(5, 21))
def test_twisted_phases_are_stable_equilibria(m):
    g = twisted_ring(2 * m)
    th = twisted_phases(m)
    assert np.linalg.norm(field(g, th)) < 1e-12
    rep = classify(g, th)
    assert rep.classification == "stable-pattern"
    b = twisted_root(m).value
    mags = {round(abs(x), 9) for x in {0.0, b, 2 * math.pi - (m - 1) * b}}
    link_mags = {round(abs(l.delta), 9) for l in rep.links}
    assert link_mags <= mags


def test_loop_energy():
    assert loop_energy(4) == pytest.approx(4.0, abs=1e-14)
    # strictly decreasing from m=4 on, so 4 is the max over loops of 4+
    vals = {m: loop_energy(m) for m in range(4, 40)}
    assert max(vals, key=vals.get) == 4
    for m in range(4, 39):
        assert vals[m + 1] < vals[m]
    assert loop_energy(5) == pytest.approx(3.4549, abs=1e-4)
    with pytest.raises(ValueError):
        loop_energy(2)


def test_e_energy_values():
    assert e_energy(20) == pytest.approx(13.82, abs=5e-3)
    assert e_energy(20) / 2 == pytest.approx(6.90983, abs=1e-5)
    assert e_energy(25) == e_energy(20)
    g, th = high_energy_e(20)
    assert energy(g, th) == pytest.approx(e_energy(20), abs=1e-10)
    g, th = high_energy_e(26)
    assert energy(g, th) == pytest.approx(e_energy(26), abs=1e-10)


def test_f_energy_values():
    assert f_energy(10) / 1 == pytest.approx(7.49165, abs=1e-4)
    g, th = high_energy_f(1)
    assert energy(g, th) == pytest.approx(f_energy(10), abs=1e-10)
    g, th = high_energy_f(2)
    assert energy(g, th) == pytest.approx(f_energy(20), abs=1e-10)
    with pytest.raises(ValueError):
        f_energy(15)


def test_f_exceeds_e_per_block():
    assert f_energy(10) > e_energy(10)


def test_g50_angles():
    a, b = g50_angles()
    assert a == pytest.approx(0.50536, abs=1e-5)
    assert b == pytest.approx(1.8235, abs=1e-4)
    assert b > math.pi / 2
    assert abs(math.sin(b - a) - 2 * math.sin(a)) < 1e-12
    assert abs(math.sin(b - a) - math.sin(b)) < 1e-12


def test_two_pattern_angles():
    tp = two_pattern_angles()
    assert tp.low == pytest.approx(math.acos(0.25), abs=1e-12)
    assert tp.low == pytest.approx(1.31812, abs=1e-5)
    assert tp.residual < 1e-12
    assert 2 * tp.gamma + tp.high_stable[1] - tp.high_stable[0] == pytest.approx(
        2 * math.pi, abs=1e-12
    )

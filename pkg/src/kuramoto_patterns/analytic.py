"""Closed-form equilibria, roots, and energies for the named graph families.

These serve as exact oracles: every phase vector built here is an exact
fixed point of the coupled-oscillator flow on its companion graph, to
rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, fsolve

__all__ = [
    "RootResult",
    "twisted_root",
    "beta_star",
    "double_ring_phases",
    "moebius_phases",
    "twisted_phases",
    "loop_energy",
    "e_energy",
    "f_energy",
    "g50_angles",
    "TwoPatternAngles",
    "two_pattern_angles",
]


@dataclass(frozen=True)
class RootResult:
    """A bracketed scalar root: lo < value < hi, |g(value)| = residual."""

    value: float
    bracket: tuple[float, float]
    residual: float


def _crossed_ring_gap(m: int, b: float) -> float:
    return 2.0 * math.sin((m - 1) * b) + math.sin(b)


def twisted_root(m: int) -> RootResult:
    """Root of 2 sin((m-1)b) + sin(b) between 2pi/m and 2pi/(m-1).

    This is the ring step angle of the crossed double ring on 2m vertices;
    the bracket endpoints have opposite signs for every m >= 5.
    """
    if m < 5:
        raise ValueError(f"twisted_root requires m >= 5, got {m}")
    lo, hi = 2.0 * math.pi / m, 2.0 * math.pi / (m - 1)
    value = brentq(lambda b: _crossed_ring_gap(m, b), lo, hi, xtol=1e-15, rtol=8.9e-16)
    return RootResult(value, (lo, hi), abs(_crossed_ring_gap(m, value)))


def beta_star() -> RootResult:
    """Root of 2 sin(4x) + sin(x) between 2pi/5 and pi/2 (= twisted_root(5))."""
    return twisted_root(5)


def double_ring_phases(n: int) -> np.ndarray:
    """Exact equilibrium on double_ring(n): step 4pi/n around each ring."""
    if n % 2 or n < 10:
        raise ValueError(f"double_ring_phases needs even n >= 10, got {n}")
    w = 4.0 * math.pi / n
    half = np.arange(n // 2) * w
    return np.concatenate([half, half])


def moebius_phases(n: int) -> np.ndarray:
    """Exact equilibrium on moebius_ladder(n): step 4pi/n around the n-cycle.

    The antipodal chords connect vertices a full turn (2pi) apart, so chord
    differences vanish and the energy equals the double-ring value.
    """
    if n % 2 or n < 10:
        raise ValueError(f"moebius_phases needs even n >= 10, got {n}")
    return np.arange(n) * (4.0 * math.pi / n)


def twisted_phases(m: int) -> np.ndarray:
    """Exact equilibrium on twisted_ring(2m), identical on both rings.

    Ring positions 0..(m-1)//2 carry j*b and the rest -(m-j)*b, where b is
    twisted_root(m); every link difference is 0, +-b, or +-(m-1)b, and all
    their cosines are positive, so the state is stable.
    """
    b = twisted_root(m).value
    ring = [j * b if j <= (m - 1) // 2 else -(m - j) * b for j in range(m)]
    return np.array(ring + ring)


def loop_energy(m: int) -> float:
    """Energy of an equidistant single-wrap loop of m oscillators.

    m(1 - cos(2pi/m)); maximal at m = 4 (value exactly 4), decreasing for
    larger m.  A loop needs m >= 5 to be a stable wave on its own.
    """
    if m < 3:
        raise ValueError(f"loop_energy needs m >= 3, got {m}")
    return m * (1.0 - math.cos(2.0 * math.pi / m))


def e_energy(n: int) -> float:
    """Energy of the glued-5-ring state on n vertices: 10*floor(n/10)*(1-cos(2pi/5))."""
    if n < 10:
        raise ValueError(f"e_energy needs n >= 10, got {n}")
    return 10 * (n // 10) * (1.0 - math.cos(2.0 * math.pi / 5.0))


def f_energy(n: int) -> float:
    """Energy of the chained crossed-5-ring state on n = 10m vertices.

    Each 10-vertex block contributes 8(1-cos b) + 4(1-cos 4b) at b = beta*;
    the block count multiplies it (the per-block value is ~7.49165).
    """
    if n < 10 or n % 10:
        raise ValueError(f"f_energy needs n = 10m, got {n}")
    b = beta_star().value
    block = 8.0 * (1.0 - math.cos(b)) + 4.0 * (1.0 - math.cos(4.0 * b))
    return (n // 10) * block


def g50_angles() -> tuple[float, float]:
    """The two phase steps of the far-from-critical long-link state on 12 nodes.

    a = 2 asin(1/4) and b = pi - atan(sqrt(15)) solve sin(b-a) = 2 sin(a)
    and sin(b-a) = sin(b); b exceeds pi/2, so the b-link is long.
    """
    a = 2.0 * math.asin(0.25)
    b = math.pi - math.atan(math.sqrt(15.0))
    return a, b


@dataclass(frozen=True)
class TwoPatternAngles:
    """Angle parameters of the two coexisting states on the 14-node example.

    ``low`` parameterizes the lower-energy state; ``high_stable`` and
    ``high_unstable`` are the two nontrivial roots of the higher state's
    balance equations, labeled by the stability of the equilibrium each
    one produces on the graph.
    """

    low: float
    high_stable: tuple[float, float]
    high_unstable: tuple[float, float]
    residual: float

    @property
    def gamma(self) -> float:
        """Companion angle of the stable pair: 2*gamma + beta - alpha = 2*pi."""
        alpha, beta = self.high_stable
        return (2.0 * math.pi - beta + alpha) / 2.0


def _two_pattern_system(x) -> list[float]:
    alpha, beta = x
    s = math.sin(beta - alpha)
    return [
        s - math.sin(2.0 * alpha) - math.sin(alpha),
        s - 2.0 * math.sin(1.5 * beta - 0.5 * alpha),
    ]


# Newton starts for the two roots realized as equilibria of the 14-vertex
# two-pattern graph under the template {0, +-alpha, +-beta, +-gamma}; the
# smaller-alpha root is the stable state (energy 7.4319), the other sits on
# a saddle (energy 10.459).  Other roots of the same trigonometric system
# exist but do not balance the graph's template.
_TWO_PATTERN_STARTS = {
    "stable": (0.354475334, 1.864204926),
    "unstable": (1.740037618, 2.452443864),
}


def two_pattern_angles() -> TwoPatternAngles:
    """Solve the balance equations of the higher-energy 14-node state.

    Polishes the two realized roots of sin(b-a) = sin(2a) + sin(a) =
    2 sin(3b/2 - a/2) and labels them by the stability of the equilibrium
    each produces.
    """
    roots: dict[str, tuple[float, float]] = {}
    residual = 0.0
    for label, start in _TWO_PATTERN_STARTS.items():
        x = fsolve(_two_pattern_system, start, full_output=False)
        r = max(abs(v) for v in _two_pattern_system(x))
        if r > 1e-12 or np.max(np.abs(np.asarray(x) - start)) > 1e-6:
            raise RuntimeError(f"two-pattern root {label} failed to polish: {x}, {r}")
        roots[label] = (float(x[0]), float(x[1]))
        residual = max(residual, r)
    return TwoPatternAngles(
        low=math.acos(0.25),
        high_stable=roots["stable"],
        high_unstable=roots["unstable"],
        residual=residual,
    )

"""Phase dynamics on a graph: flow field, energy, Jacobian, equilibria.

The flow is the gradient descent of the edge energy
``sum over edges (1 - cos(theta_v - theta_w))``; a state is an equilibrium
when every vertex's incoming sine couplings balance.  Stability is read off
the symmetric Jacobian, which always has the all-ones null direction from
rotation invariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import _kernels
from .graphs import Graph, fundamental_cycles

__all__ = [
    "TWO_PI",
    "wrap_angle",
    "gauge_normalize",
    "field",
    "energy",
    "jacobian",
    "FlowResult",
    "flow_to_equilibrium",
    "SingularJacobianError",
    "RefinementDivergedError",
    "newton_refine",
    "Link",
    "FixedPointReport",
    "classify",
    "winding_number",
]

TWO_PI = 2.0 * math.pi

# default tolerances; the CLI allows env-var overrides for these
RESIDUAL_TOL = 1e-5
EIG_ZERO = 1e-8
EIG_TOL = 1e-6
CRITICAL_BAND = 1e-9
SYNC_TOL = 1e-5


class SingularJacobianError(RuntimeError):
    """Reduced Jacobian is singular: the point is degenerate."""


class RefinementDivergedError(RuntimeError):
    """Newton left the capture region or failed to converge."""


def wrap_angle(x):
    """Map angles to (-pi, pi]."""
    y = np.asarray(x, dtype=float)
    out = (y + math.pi) % TWO_PI - math.pi
    out = np.where(out == -math.pi, math.pi, out)
    return float(out) if np.ndim(x) == 0 else out


def gauge_normalize(theta: np.ndarray) -> np.ndarray:
    """Rotate so vertex 0 sits at phase 0; every entry lands in [0, 2pi)."""
    th = np.asarray(theta, dtype=float)
    out = (th - th[0]) % TWO_PI
    out[0] = 0.0
    return out


def _check_state(g: Graph, theta: np.ndarray) -> np.ndarray:
    th = np.asarray(theta, dtype=float)
    if th.shape != (g.n,):
        raise ValueError(f"state has shape {th.shape}, graph has {g.n} vertices")
    return th


def field(g: Graph, theta: np.ndarray) -> np.ndarray:
    """Velocity of every vertex: sum of sin(neighbor - self)."""
    th = _check_state(g, theta)
    eu, ev = g.edge_arrays
    s = np.sin(th[ev] - th[eu])
    return np.bincount(eu, weights=s, minlength=g.n) - np.bincount(
        ev, weights=s, minlength=g.n
    )


def energy(g: Graph, theta: np.ndarray) -> float:
    """Potential whose negative gradient is the flow; 0 exactly at sync."""
    th = _check_state(g, theta)
    eu, ev = g.edge_arrays
    return float(np.sum(1.0 - np.cos(th[ev] - th[eu])))


def jacobian(g: Graph, theta: np.ndarray) -> np.ndarray:
    """Symmetric flow Jacobian: cos couplings off-diagonal, zero row sums."""
    th = _check_state(g, theta)
    eu, ev = g.edge_arrays
    c = np.cos(th[ev] - th[eu])
    j = np.zeros((g.n, g.n))
    np.add.at(j, (eu, ev), c)
    np.add.at(j, (ev, eu), c)
    np.subtract.at(j, (eu, eu), c)
    np.subtract.at(j, (ev, ev), c)
    return j


@dataclass(frozen=True)
class FlowResult:
    theta: np.ndarray
    residual: float
    t: float
    steps: int
    converged: bool
    timed_out: bool

    def __bool__(self) -> bool:
        return self.converged


def flow_to_equilibrium(
    g: Graph,
    theta0: np.ndarray,
    *,
    dt0: float = 0.1,
    t_max: float = 2000.0,
    residual_tol: float = RESIDUAL_TOL,
    energy_budget: float = 1e-9,
    dt_min: float = 1e-10,
    dt_max: float = 0.5,
) -> FlowResult:
    """Integrate the gradient flow until the field norm drops below tolerance.

    Adaptive step doubling/halving on classical RK4; a step is accepted when
    the energy decreases by at least a quarter of the continuous-flow rate,
    up to ``energy_budget``.  A timeout is an outcome, not an error.
    """
    th = _check_state(g, theta0).copy()
    eu, ev = g.edge_arrays
    status, t, steps = _kernels.flow_trial(
        th, eu, ev, dt0, t_max, residual_tol, energy_budget, dt_min, dt_max
    )
    residual = float(np.linalg.norm(field(g, th)))
    return FlowResult(
        theta=th,
        residual=residual,
        t=float(t),
        steps=int(steps),
        converged=status == _kernels.FLOW_CONVERGED,
        timed_out=status != _kernels.FLOW_CONVERGED,
    )


def newton_refine(
    g: Graph,
    theta: np.ndarray,
    *,
    tol: float = 1e-12,
    capture_residual: float = 1e-3,
    max_iter: int = 60,
    max_step: float = 0.5,
) -> np.ndarray:
    """Polish a near-equilibrium to machine accuracy on the reduced system.

    Vertex 0 stays pinned, removing the rotational null direction.  Raises
    SingularJacobianError at degenerate points and RefinementDivergedError
    if iterates leave the capture region or stall.
    """
    th = _check_state(g, theta).copy()
    eu, ev = g.edge_arrays
    start_res = float(np.linalg.norm(field(g, th)))
    if start_res > capture_residual:
        raise ValueError(
            f"residual {start_res:.3g} above capture radius {capture_residual:.3g}"
        )
    status, res = _kernels.newton_trial(th, eu, ev, tol, max_iter, max_step)
    if status == _kernels.NEWTON_SINGULAR:
        raise SingularJacobianError(f"singular reduced Jacobian at residual {res:.3g}")
    if status in (_kernels.NEWTON_DIVERGED, _kernels.NEWTON_MAXITER):
        raise RefinementDivergedError(f"no convergence (residual {res:.3g})")
    return th


@dataclass(frozen=True)
class Link:
    """One edge's phase difference delta = wrap(theta_v - theta_u) and class."""

    u: int
    v: int
    delta: float
    kind: str  # "short" | "long" | "critical"


@dataclass(frozen=True)
class FixedPointReport:
    """Classification of a verified equilibrium."""

    theta: np.ndarray
    residual: float
    energy: float
    classification: str  # "sync" | "stable-pattern" | "degenerate" | "unstable"
    spectral_gap: float
    zero_eigs: int
    links: tuple[Link, ...]
    windings: tuple[tuple[tuple[int, ...], int], ...] = dc_field(default=())

    @property
    def is_pattern(self) -> bool:
        return self.classification == "stable-pattern"

    @property
    def n_long_links(self) -> int:
        return sum(1 for l in self.links if l.kind == "long")

    @property
    def max_winding(self) -> int:
        return max((abs(w) for _, w in self.windings), default=0)

    def to_dict(self) -> dict:
        return {
            "n": int(self.theta.size),
            "theta": [float(x) for x in self.theta],
            "residual": self.residual,
            "energy": self.energy,
            "spectral_gap": self.spectral_gap,
            "classification": self.classification,
            "links": [
                {"u": l.u, "v": l.v, "delta": l.delta, "class": l.kind}
                for l in self.links
            ],
            "windings": [
                {"cycle": list(cyc), "w": w} for cyc, w in self.windings
            ],
        }

    @staticmethod
    def from_dict(d: dict) -> "FixedPointReport":
        links = tuple(
            Link(int(l["u"]), int(l["v"]), float(l["delta"]), str(l["class"]))
            for l in d.get("links", ())
        )
        windings = tuple(
            (tuple(int(v) for v in wd["cycle"]), int(wd["w"]))
            for wd in d.get("windings", ())
        )
        return FixedPointReport(
            theta=np.asarray(d["theta"], dtype=float),
            residual=float(d["residual"]),
            energy=float(d["energy"]),
            classification=str(d["classification"]),
            spectral_gap=float(d["spectral_gap"]),
            zero_eigs=int(d.get("zero_eigs", 1)),
            links=links,
            windings=windings,
        )


def _link_of(u: int, v: int, delta: float, critical_band: float) -> Link:
    mag = abs(delta)
    if abs(mag - math.pi / 2.0) <= critical_band:
        kind = "critical"
    elif mag > math.pi / 2.0:
        kind = "long"
    else:
        kind = "short"
    return Link(u, v, delta, kind)


def classify(
    g: Graph,
    theta: np.ndarray,
    *,
    residual_tol: float = RESIDUAL_TOL,
    eig_zero: float = EIG_ZERO,
    eig_tol: float = EIG_TOL,
    critical_band: float = CRITICAL_BAND,
    sync_tol: float = SYNC_TOL,
    with_windings: bool = True,
) -> FixedPointReport:
    """Classify a point whose field norm is already below ``residual_tol``.

    Stable requires a negative-semidefinite Jacobian with every nonzero
    eigenvalue below -eig_tol.  The rotation direction always contributes
    one exact zero; rare attractors carry a second machine-zero eigenvalue
    (flat direction with higher-order stability) and still count as stable,
    which is what the semidefinite sink test accepts.  Any eigenvalue above
    +eig_zero marks a saddle ("unstable"), and eigenvalues stuck between
    -eig_tol and -eig_zero leave the point "degenerate"; neither is ever
    reported as a pattern.
    """
    th = _check_state(g, theta)
    residual = float(np.linalg.norm(field(g, th)))
    if residual > residual_tol:
        raise ValueError(
            f"residual {residual:.3g} above tolerance {residual_tol:.3g}; not a fixed point"
        )
    th = gauge_normalize(th)
    lam = np.linalg.eigvalsh(jacobian(g, th))
    zero_count = int(np.sum(np.abs(lam) <= eig_zero))
    nonzero = lam[np.abs(lam) > eig_zero]
    gap = float(np.min(np.abs(nonzero))) if nonzero.size else 0.0

    eu, ev = g.edge_arrays
    deltas = wrap_angle(th[ev] - th[eu])
    links = tuple(
        _link_of(int(u), int(v), float(d), critical_band)
        for u, v, d in zip(eu, ev, deltas)
    )
    is_sync = bool(np.max(np.abs(deltas), initial=0.0) <= sync_tol)

    if np.any(nonzero > 0):
        classification = "unstable"
    elif np.all(nonzero < -eig_tol):
        classification = "sync" if is_sync else "stable-pattern"
    else:
        classification = "degenerate"

    windings: tuple = ()
    if with_windings:
        windings = tuple(
            (tuple(cyc), winding_number(th, cyc, g))
            for cyc in fundamental_cycles(g)
        )
    return FixedPointReport(
        theta=th,
        residual=residual,
        energy=energy(g, th),
        classification=classification,
        spectral_gap=gap,
        zero_eigs=zero_count,
        links=links,
        windings=windings,
    )


def winding_number(
    theta: np.ndarray, cycle: Sequence[int], graph: Graph | None = None
) -> int:
    """Count how many times the phases wrap by 2pi around a closed walk.

    The wrapped steps telescope to an exact multiple of 2pi at any state.
    """
    cyc = list(cycle)
    if len(cyc) < 3 or len(set(cyc)) != len(cyc):
        raise ValueError("cycle must list at least 3 distinct vertices")
    if graph is not None:
        edge_set = set(graph.edges)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if (min(a, b), max(a, b)) not in edge_set:
                raise ValueError(f"({a}, {b}) is not an edge of the graph")
    th = np.asarray(theta, dtype=float)
    steps = wrap_angle(th[np.r_[cyc[1:], cyc[:1]]] - th[cyc])
    total = float(np.sum(steps)) / TWO_PI
    w = round(total)
    if abs(total - w) > 1e-6:
        raise ValueError(f"winding sum {total} is not an integer multiple of 2pi")
    return int(w)

"""Homotopy continuation between two cubic graphs on shared vertex labels.

Edges common to both graphs keep weight 1; edges only in graph A get weight
p and edges only in B get weight 1-p, so p=1 is exactly A and p=0 exactly B
(sync stays an equilibrium for every p).  Branches are traced by natural
continuation in p with secant predictors, falling back to pseudo-arclength
steps when the corrector stops converging; a fold is flagged where the
reduced Jacobian determinant changes sign along the branch and is localized
by bisection on the connecting chord.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .dynamics import EIG_TOL
from .graphs import CubicGraph, Graph, double_ring, invariant_key

__all__ = [
    "Homotopy",
    "BranchPoint",
    "TraceOptions",
    "CorrectorError",
    "trace_branch",
    "align_to_double_ring",
]

_MATCHINGS_6 = 15  # perfect matchings on six labeled vertices


class CorrectorError(RuntimeError):
    """Newton corrector failed to converge at the requested point."""


@dataclass(frozen=True)
class Homotopy:
    """Weighted interpolation between two graphs on the same vertex set."""

    n: int
    shared: tuple[tuple[int, int], ...]
    a_only: tuple[tuple[int, int], ...]
    b_only: tuple[tuple[int, int], ...]

    @staticmethod
    def between(ga: Graph, gb: Graph) -> "Homotopy":
        if ga.n != gb.n:
            raise ValueError(f"vertex counts differ: {ga.n} vs {gb.n}")
        ea, eb = set(ga.edges), set(gb.edges)
        return Homotopy(
            n=ga.n,
            shared=tuple(sorted(ea & eb)),
            a_only=tuple(sorted(ea - eb)),
            b_only=tuple(sorted(eb - ea)),
        )

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(eu, ev, base weight, dw/dp) over all edges in fixed order."""
        edges = self.shared + self.a_only + self.b_only
        if edges:
            eu = np.array([e[0] for e in edges], dtype=np.int64)
            ev = np.array([e[1] for e in edges], dtype=np.int64)
        else:
            eu = ev = np.zeros(0, dtype=np.int64)
        w0 = np.concatenate(
            [np.ones(len(self.shared)), np.zeros(len(self.a_only)), np.ones(len(self.b_only))]
        )
        dw = np.concatenate(
            [np.zeros(len(self.shared)), np.ones(len(self.a_only)), -np.ones(len(self.b_only))]
        )
        return eu, ev, w0, dw

    def weights(self, p: float) -> np.ndarray:
        _, _, w0, dw = self._arrays
        return w0 + p * dw

    def field(self, p: float, theta: np.ndarray) -> np.ndarray:
        eu, ev, _, _ = self._arrays
        w = self.weights(p)
        s = w * np.sin(theta[ev] - theta[eu])
        return np.bincount(eu, weights=s, minlength=self.n) - np.bincount(
            ev, weights=s, minlength=self.n
        )

    def energy(self, p: float, theta: np.ndarray) -> float:
        eu, ev, _, _ = self._arrays
        return float(np.sum(self.weights(p) * (1.0 - np.cos(theta[ev] - theta[eu]))))

    def reduced_jacobian(self, p: float, theta: np.ndarray) -> np.ndarray:
        """Flow Jacobian with vertex 0's row and column removed."""
        eu, ev, _, _ = self._arrays
        c = self.weights(p) * np.cos(theta[ev] - theta[eu])
        j = np.zeros((self.n, self.n))
        np.add.at(j, (eu, ev), c)
        np.add.at(j, (ev, eu), c)
        np.subtract.at(j, (eu, eu), c)
        np.subtract.at(j, (ev, ev), c)
        return j[1:, 1:]

    def dfield_dp(self, theta: np.ndarray) -> np.ndarray:
        eu, ev, _, dw = self._arrays
        s = dw * np.sin(theta[ev] - theta[eu])
        return np.bincount(eu, weights=s, minlength=self.n) - np.bincount(
            ev, weights=s, minlength=self.n
        )

    def endpoint_graph(self, at_p1: bool) -> Graph:
        edges = self.shared + (self.a_only if at_p1 else self.b_only)
        return Graph.from_edges(self.n, edges)


@dataclass(frozen=True)
class BranchPoint:
    """One accepted point of a continuation branch."""

    p: float
    theta: np.ndarray
    min_eig: float  # largest eigenvalue of the reduced Jacobian (<= 0 while stable)
    is_fold: bool = False
    stable: bool = True


@dataclass(frozen=True)
class TraceOptions:
    dp0: float = 0.02
    dp_min: float = 1e-5
    ds0: float = 0.02
    ds_min: float = 1e-6
    corrector_tol: float = 1e-11
    accept_tol: float = 1e-10
    max_newton: int = 14
    max_step_norm: float = 0.5
    max_points: int = 100000
    det_tol: float = 1e-8


def _correct_at_p(h: Homotopy, p: float, theta: np.ndarray, opts: TraceOptions) -> np.ndarray:
    """Newton in theta at fixed p (vertex 0 pinned)."""
    th = theta.copy()
    for _ in range(opts.max_newton):
        f = h.field(p, th)
        if np.linalg.norm(f) < opts.corrector_tol:
            return th
        jr = h.reduced_jacobian(p, th)
        try:
            delta = np.linalg.solve(jr, -f[1:])
        except np.linalg.LinAlgError as exc:
            raise CorrectorError(f"singular reduced Jacobian at p={p}") from exc
        if np.max(np.abs(delta)) > opts.max_step_norm:
            raise CorrectorError(f"corrector step too large at p={p}")
        th[1:] += delta
    if np.linalg.norm(h.field(p, th)) < opts.accept_tol:
        return th
    raise CorrectorError(f"corrector stalled at p={p}")


def _correct_on_chord(
    h: Homotopy,
    x_pred: np.ndarray,
    normal: np.ndarray,
    opts: TraceOptions,
) -> np.ndarray:
    """Newton on (theta[1:], p) constrained to the hyperplane through x_pred."""
    x = x_pred.copy()
    n = h.n
    for _ in range(opts.max_newton):
        th = np.concatenate([[0.0], x[:-1]])
        p = x[-1]
        f = h.field(p, th)
        g = float(normal @ (x - x_pred))
        if np.linalg.norm(f) < opts.corrector_tol and abs(g) < opts.corrector_tol:
            return x
        jr = h.reduced_jacobian(p, th)
        fp = h.dfield_dp(th)[1:]
        aug = np.zeros((n, n))
        aug[: n - 1, : n - 1] = jr
        aug[: n - 1, n - 1] = fp
        aug[n - 1, :] = normal
        rhs = np.concatenate([-f[1:], [-g]])
        try:
            delta = np.linalg.solve(aug, rhs)
        except np.linalg.LinAlgError as exc:
            raise CorrectorError("singular bordered system") from exc
        if np.max(np.abs(delta)) > opts.max_step_norm:
            raise CorrectorError("arclength corrector step too large")
        x += delta
    raise CorrectorError("arclength corrector stalled")


def _branch_point(h: Homotopy, p: float, theta: np.ndarray, opts: TraceOptions) -> BranchPoint:
    res = float(np.linalg.norm(h.field(p, theta)))
    if res > opts.accept_tol:
        raise CorrectorError(f"residual {res:.3g} above acceptance at p={p}")
    lam_max = float(np.linalg.eigvalsh(h.reduced_jacobian(p, theta)).max())
    return BranchPoint(
        p=float(p), theta=theta.copy(), min_eig=lam_max, stable=lam_max < -EIG_TOL
    )


def _det_sign(h: Homotopy, p: float, theta: np.ndarray) -> tuple[float, float]:
    sign, logabs = np.linalg.slogdet(h.reduced_jacobian(p, theta))
    return float(sign), float(sign * math.exp(logabs))


def _as_x(pt: BranchPoint) -> np.ndarray:
    return np.concatenate([pt.theta[1:], [pt.p]])


def _from_x(h: Homotopy, x: np.ndarray, opts: TraceOptions) -> BranchPoint:
    theta = np.concatenate([[0.0], x[:-1]])
    return _branch_point(h, float(x[-1]), theta, opts)


def _localize_fold(
    h: Homotopy, lo: BranchPoint, hi: BranchPoint, opts: TraceOptions
) -> BranchPoint:
    """Bisect the chord between two branch points with opposite det signs."""
    x_lo, x_hi = _as_x(lo), _as_x(hi)
    s_lo, _ = _det_sign(h, lo.p, lo.theta)
    best: BranchPoint | None = None
    for _ in range(80):
        chord = x_hi - x_lo
        norm = np.linalg.norm(chord)
        if norm < 1e-14:
            break
        normal = chord / norm
        x_mid = _correct_on_chord(h, 0.5 * (x_lo + x_hi), normal, opts)
        pt = _from_x(h, x_mid, opts)
        s_mid, det_mid = _det_sign(h, pt.p, pt.theta)
        best = pt
        if abs(det_mid) < opts.det_tol:
            break
        if s_mid == s_lo:
            x_lo = x_mid
        else:
            x_hi = x_mid
    if best is None:
        best = hi
    return BranchPoint(
        p=best.p, theta=best.theta, min_eig=best.min_eig, is_fold=True, stable=False
    )


def trace_branch(
    h: Homotopy,
    start_theta: np.ndarray,
    *,
    p_start: float = 1.0,
    p_target: float = 0.0,
    opts: TraceOptions = TraceOptions(),
    landmarks: tuple[float, ...] = (0.0,),
) -> list[BranchPoint]:
    """Follow the equilibrium branch from p_start toward p_target.

    Returns every accepted point in order.  Tracing stops at p_target or at
    a fold (appended with ``is_fold=True``), whichever comes first.  Natural
    steps in p are clipped so each landmark value is sampled exactly; when
    the in-p corrector fails down to its minimum step, stepping switches to
    pseudo-arclength so the branch can round a fold.
    """
    theta0 = np.asarray(start_theta, dtype=float).copy()
    theta0 -= theta0[0]
    try:
        theta0 = _correct_at_p(h, p_start, theta0, opts)
    except CorrectorError as exc:
        raise ValueError(f"start is not an equilibrium at p={p_start}: {exc}") from exc
    points = [_branch_point(h, p_start, theta0, opts)]
    direction = -1.0 if p_target < p_start else 1.0
    marks = sorted(
        (m for m in landmarks if (m - p_start) * direction > 1e-12
         and (p_target - m) * direction > -1e-12),
        key=lambda m: (m - p_start) * direction,
    )

    dp = opts.dp0
    prev: BranchPoint | None = None
    mode_arclength = False
    ds = opts.ds0

    while len(points) < opts.max_points:
        cur = points[-1]
        if (cur.p - p_target) * direction >= -1e-12:
            break
        if not mode_arclength:
            p_next = cur.p + direction * dp
            if (p_next - p_target) * direction > 0:
                p_next = p_target
            if marks and (p_next - marks[0]) * direction > 0:
                p_next = marks[0]
            if prev is not None and abs(cur.p - prev.p) > 1e-14:
                scale = (p_next - cur.p) / (cur.p - prev.p)
                pred = cur.theta + scale * (cur.theta - prev.theta)
            else:
                pred = cur.theta
            try:
                th = _correct_at_p(h, p_next, pred, opts)
            except CorrectorError:
                dp *= 0.5
                if dp < opts.dp_min:
                    mode_arclength = True
                    ds = opts.ds0
                continue
            pt = _branch_point(h, p_next, th, opts)
            if marks and abs(p_next - marks[0]) < 1e-12:
                marks.pop(0)
            s_prev, _ = _det_sign(h, cur.p, cur.theta)
            s_new, _ = _det_sign(h, pt.p, pt.theta)
            if s_new != s_prev and s_prev != 0.0:
                points.append(_localize_fold(h, cur, pt, opts))
                return points
            prev = cur
            points.append(pt)
            dp = min(dp * 1.5, opts.dp0)
        else:
            if prev is not None:
                tangent = _as_x(cur) - _as_x(prev)
            else:
                tangent = np.zeros(h.n)
                tangent[-1] = direction
            tnorm = np.linalg.norm(tangent)
            if tnorm < 1e-14:
                raise CorrectorError("degenerate tangent in arclength mode")
            tangent /= tnorm
            x_pred = _as_x(cur) + ds * tangent
            try:
                x_new = _correct_on_chord(h, x_pred, tangent, opts)
            except CorrectorError:
                ds *= 0.5
                if ds < opts.ds_min:
                    raise
                continue
            pt = _from_x(h, x_new, opts)
            s_prev, _ = _det_sign(h, cur.p, cur.theta)
            s_new, _ = _det_sign(h, pt.p, pt.theta)
            if s_new != s_prev and s_prev != 0.0:
                points.append(_localize_fold(h, cur, pt, opts))
                return points
            prev = cur
            points.append(pt)
            ds = min(ds * 1.5, opts.ds0)
    return points


def align_to_double_ring(target: CubicGraph) -> list[CubicGraph]:
    """Relabelings of ``target`` as a double ring with three edges exchanged.

    Enumerates every way to remove three edges from double_ring(n) and
    rewire the six loose ends into a connected cubic graph, keeping the
    candidates whose cheap isomorphism invariants (adjacency spectrum and
    triangle counts) match the target's.  Candidates come back in a
    deterministic order; callers pick the first whose continuation behaves.
    """
    from itertools import combinations

    from .graphs import is_connected, validate_cubic

    base = double_ring(target.n)
    want = invariant_key(target)
    base_edges = set(base.edges)
    out: list[CubicGraph] = []
    seen: set[tuple] = set()
    for removed in combinations(sorted(base_edges), 3):
        loose: list[int] = []
        for u, v in removed:
            loose += [u, v]
        if len(set(loose)) != 6:
            continue
        kept = base_edges - set(removed)
        for added in _perfect_matchings(sorted(set(loose))):
            if any(e in kept or e in removed for e in added):
                continue
            edges = tuple(sorted(kept | set(added)))
            if edges in seen:
                continue
            seen.add(edges)
            g = Graph.from_edges(target.n, edges)
            if not validate_cubic(g).ok or not is_connected(g):
                continue
            if invariant_key(g) != want:
                continue
            out.append(CubicGraph.from_graph(g.with_id(f"double_ring_swap({target.n})")))
    return out


def _perfect_matchings(verts: list[int]):
    if not verts:
        yield frozenset()
        return
    a = verts[0]
    for i in range(1, len(verts)):
        b = verts[i]
        rest = verts[1:i] + verts[i + 1 :]
        for m in _perfect_matchings(rest):
            yield m | {(min(a, b), max(a, b))}

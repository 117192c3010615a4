"""Compiled per-trial kernels: adaptive RK4 gradient flow and Newton polish.

Each trial is a fully independent scalar loop, so batches are bit-identical
regardless of how prange schedules them across threads.  The RK4 stepper
accepts a step only if the energy decreases by at least a fraction of the
continuous-flow rate dE/dt = -|grad|^2 (plus a tiny budget); this rules out
neutral orbiting of a sink at marginal step sizes.
"""

from __future__ import annotations

import numba as nb
import numpy as np

# flow status codes
FLOW_CONVERGED = 0
FLOW_TIMEOUT = 1
FLOW_DT_UNDERFLOW = 2
# newton status codes
NEWTON_OK = 0
NEWTON_SINGULAR = 1
NEWTON_MAXITER = 2
NEWTON_DIVERGED = 3

_SUFFICIENT_DECREASE = 0.25


@nb.njit(nb.float64(nb.float64[:], nb.int32[:], nb.int32[:]), cache=True)
def energy_of(theta, eu, ev):
    acc = 0.0
    for e in range(eu.size):
        acc += 1.0 - np.cos(theta[ev[e]] - theta[eu[e]])
    return acc


@nb.njit(nb.float64(nb.float64[:], nb.int32[:], nb.int32[:], nb.float64[:]), cache=True)
def field_into(theta, eu, ev, out):
    """Write the flow velocity into ``out``; returns its l2 norm."""
    for v in range(out.size):
        out[v] = 0.0
    for e in range(eu.size):
        s = np.sin(theta[ev[e]] - theta[eu[e]])
        out[eu[e]] += s
        out[ev[e]] -= s
    acc = 0.0
    for v in range(out.size):
        acc += out[v] * out[v]
    return np.sqrt(acc)


@nb.njit(cache=True)
def flow_trial(theta, eu, ev, dt0, t_max, res_tol, energy_budget, dt_min, dt_max):
    """Flow one state to equilibrium in place; returns (status, t, steps)."""
    n = theta.size
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    stage = np.empty(n)
    cand = np.empty(n)
    dt = dt0
    t = 0.0
    steps = 0
    e_cur = energy_of(theta, eu, ev)
    res = field_into(theta, eu, ev, k1)
    streak = 0
    while True:
        if res < res_tol:
            return FLOW_CONVERGED, t, steps
        if t >= t_max:
            return FLOW_TIMEOUT, t, steps
        for v in range(n):
            stage[v] = theta[v] + 0.5 * dt * k1[v]
        field_into(stage, eu, ev, k2)
        for v in range(n):
            stage[v] = theta[v] + 0.5 * dt * k2[v]
        field_into(stage, eu, ev, k3)
        for v in range(n):
            stage[v] = theta[v] + dt * k3[v]
        field_into(stage, eu, ev, k4)
        for v in range(n):
            cand[v] = theta[v] + (dt / 6.0) * (
                k1[v] + 2.0 * k2[v] + 2.0 * k3[v] + k4[v]
            )
        e_new = energy_of(cand, eu, ev)
        steps += 1
        if e_new > e_cur - _SUFFICIENT_DECREASE * dt * res * res + energy_budget:
            dt *= 0.5
            streak = 0
            if dt < dt_min:
                return FLOW_DT_UNDERFLOW, t, steps
            continue
        for v in range(n):
            theta[v] = cand[v]
        t += dt
        e_cur = e_new
        streak += 1
        if streak >= 3 and dt < dt_max:
            dt = min(2.0 * dt, dt_max)
            streak = 0
        res = field_into(theta, eu, ev, k1)


@nb.njit(cache=True, parallel=True)
def flow_batch(thetas, eu, ev, dt0, t_max, res_tol, energy_budget, dt_min, dt_max,
               status, t_out, steps_out):
    for i in nb.prange(thetas.shape[0]):
        st, t, sp = flow_trial(
            thetas[i], eu, ev, dt0, t_max, res_tol, energy_budget, dt_min, dt_max
        )
        status[i] = st
        t_out[i] = t
        steps_out[i] = sp


@nb.njit(nb.int64(nb.float64[:, :], nb.float64[:]), cache=True)
def solve_inplace(a, b):
    """Gaussian elimination with partial pivoting; 0 on success, 1 if singular."""
    n = a.shape[0]
    for col in range(n):
        piv = col
        best = abs(a[col, col])
        for r in range(col + 1, n):
            if abs(a[r, col]) > best:
                best = abs(a[r, col])
                piv = r
        if best < 1e-13:
            return 1
        if piv != col:
            for c in range(col, n):
                tmp = a[piv, c]
                a[piv, c] = a[col, c]
                a[col, c] = tmp
            tmp = b[piv]
            b[piv] = b[col]
            b[col] = tmp
        inv = 1.0 / a[col, col]
        for r in range(col + 1, n):
            f = a[r, col] * inv
            if f != 0.0:
                for c in range(col + 1, n):
                    a[r, c] -= f * a[col, c]
                b[r] -= f * b[col]
    for col in range(n - 1, -1, -1):
        s = b[col]
        for c in range(col + 1, n):
            s -= a[col, c] * b[c]
        b[col] = s / a[col, col]
    return 0


@nb.njit(cache=True)
def newton_trial(theta, eu, ev, tol, max_iter, max_step):
    """Newton on the reduced system (vertex 0 pinned); returns (status, residual).

    The reduced Jacobian drops row/column 0, which removes the rotational
    null direction; a singular reduced Jacobian therefore flags a genuinely
    degenerate point.
    """
    n = theta.size
    f = np.empty(n)
    res = field_into(theta, eu, ev, f)
    for _ in range(max_iter):
        if res < tol:
            return NEWTON_OK, res
        jr = np.zeros((n - 1, n - 1))
        for e in range(eu.size):
            u = eu[e]
            v = ev[e]
            c = np.cos(theta[v] - theta[u])
            if u > 0:
                jr[u - 1, u - 1] -= c
            if v > 0:
                jr[v - 1, v - 1] -= c
            if u > 0 and v > 0:
                jr[u - 1, v - 1] += c
                jr[v - 1, u - 1] += c
        rhs = np.empty(n - 1)
        for v in range(1, n):
            rhs[v - 1] = -f[v]
        if solve_inplace(jr, rhs):
            return NEWTON_SINGULAR, res
        step = 0.0
        for v in range(1, n):
            if abs(rhs[v - 1]) > step:
                step = abs(rhs[v - 1])
        if step > max_step:
            return NEWTON_DIVERGED, res
        for v in range(1, n):
            theta[v] += rhs[v - 1]
        res = field_into(theta, eu, ev, f)
    if res < tol:
        return NEWTON_OK, res
    return NEWTON_MAXITER, res


@nb.njit(cache=True, parallel=True)
def newton_batch(thetas, eu, ev, tol, max_iter, max_step, active, status, res_out):
    """Polish the rows of ``thetas`` where ``active`` is nonzero."""
    for i in nb.prange(thetas.shape[0]):
        if active[i]:
            st, res = newton_trial(thetas[i], eu, ev, tol, max_iter, max_step)
            status[i] = st
            res_out[i] = res


@nb.njit(cache=True, parallel=True)
def energy_batch(thetas, eu, ev, out):
    for i in nb.prange(thetas.shape[0]):
        out[i] = energy_of(thetas[i], eu, ev)

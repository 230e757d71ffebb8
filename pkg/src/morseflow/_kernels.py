"""Compiled RK4 kernels shared by the hybrid flow.

Fields are packed as padded arrays: polynomial coefficients ``P[v, j]`` (of
``x**j``), trigonometric coefficients ``C[v, k]``, ``S[v, k]`` (of
``cos((k+1) x)``, ``sin((k+1) x)``) and a constant offset ``O[v]``.
"""

import math

import numpy as np
from numba import njit

INTERVAL = 0
CIRCLE = 1


@njit(cache=True, nogil=True)
def field_value(x, v, P, C, S, O):
    val = 0.0
    for j in range(P.shape[1] - 1, -1, -1):
        val = val * x + P[v, j]
    for k in range(C.shape[1]):
        if C[v, k] != 0.0:
            val += C[v, k] * math.cos((k + 1) * x)
        if S[v, k] != 0.0:
            val += S[v, k] * math.sin((k + 1) * x)
    return val + O[v]


@njit(cache=True, nogil=True)
def field_slope(x, v, P, C, S, O):
    val = 0.0
    for j in range(P.shape[1] - 1, 0, -1):
        val = val * x + j * P[v, j]
    for k in range(C.shape[1]):
        m = k + 1
        if C[v, k] != 0.0:
            val -= m * C[v, k] * math.sin(m * x)
        if S[v, k] != 0.0:
            val += m * S[v, k] * math.cos(m * x)
    return val


@njit(cache=True, nogil=True)
def rk4_step(x, dt, v, P, C, S, O):
    k1 = field_value(x, v, P, C, S, O)
    k2 = field_value(x + 0.5 * dt * k1, v, P, C, S, O)
    k3 = field_value(x + 0.5 * dt * k2, v, P, C, S, O)
    k4 = field_value(x + dt * k3, v, P, C, S, O)
    return x + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


@njit(cache=True, nogil=True)
def rk4_step_slope(x, dt, v, P, C, S, O):
    """RK4 step and its derivative with respect to the starting point."""
    k1 = field_value(x, v, P, C, S, O)
    d1 = field_slope(x, v, P, C, S, O)
    z2 = x + 0.5 * dt * k1
    k2 = field_value(z2, v, P, C, S, O)
    d2 = field_slope(z2, v, P, C, S, O) * (1.0 + 0.5 * dt * d1)
    z3 = x + 0.5 * dt * k2
    k3 = field_value(z3, v, P, C, S, O)
    d3 = field_slope(z3, v, P, C, S, O) * (1.0 + 0.5 * dt * d2)
    z4 = x + dt * k3
    k4 = field_value(z4, v, P, C, S, O)
    d4 = field_slope(z4, v, P, C, S, O) * (1.0 + dt * d3)
    y = x + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    dy = 1.0 + dt * (d1 + 2.0 * d2 + 2.0 * d3 + d4) / 6.0
    return y, dy


@njit(cache=True, nogil=True)
def rk4_inverse_step(x, dt, v, P, C, S, O):
    """Point ``y`` with ``rk4_step(y, dt) == x`` (Newton, seeded by a reverse step)."""
    y = rk4_step(x, -dt, v, P, C, S, O)
    for _ in range(12):
        fy, dfy = rk4_step_slope(y, dt, v, P, C, S, O)
        r = fy - x
        if r == 0.0 or dfy == 0.0:
            break
        dy = r / dfy
        y -= dy
        if abs(dy) <= 1e-17 + 1e-16 * abs(y):
            break
    return y


@njit(cache=True, nogil=True)
def _split(pos, step):
    """Lattice index and fractional remainder of an offset, snapping near-integers."""
    q = pos / step
    j = math.floor(q + 1e-9)
    r = q - j
    if r < 1e-9:
        r = 0.0
    return int(j), r


@njit(cache=True, nogil=True)
def _emit(x, r, step, v, P, C, S, O, kind, lo, hi):
    if r == 0.0:
        return x
    return _advance(x, r * step, v, P, C, S, O, kind, lo, hi)


@njit(cache=True, nogil=True)
def run_segments(x0, verts, starts, ends, step, P, C, S, O, kind, lo, hi,
                 sample_dt, out):
    """Integrate along dwell segments, recording samples every ``sample_dt``.

    Segment ``i`` runs field ``verts[i]`` from offset ``starts[i]`` to
    ``ends[i]`` inside its dwell interval (``ends < starts`` integrates
    backward). Each dwell interval carries the lattice ``j * step``. Lattice
    states are linked by full RK4 steps, run forward or inverted exactly when
    going backward, and the state at an offset between lattice points is one
    forward partial step from the lattice state below it. The discrete flow
    is therefore a group action in both time directions and does not depend
    on where integration starts.

    ``out[k]`` receives the state after elapsed time ``k * sample_dt``, equal
    to what a separate run ending at that time would return; pass
    ``sample_dt <= 0`` to skip sampling.

    Returns (final state, number of samples written, largest clamp overshoot).
    """
    x = x0
    n_out = out.shape[0]
    k = 0
    overshoot = 0.0
    if sample_dt > 0.0 and n_out > 0:
        out[0] = x
        k = 1
    elapsed = 0.0
    tiny = 1e-12 * step
    for i in range(verts.shape[0]):
        v = verts[i]
        pos0 = starts[i]
        pos1 = ends[i]
        dirn = 1.0 if pos1 >= pos0 else -1.0
        e0 = elapsed
        e1 = e0 + dirn * (pos1 - pos0)
        j, r = _split(pos0, step)
        if r > 0.0:
            x = rk4_inverse_step(x, r * step, v, P, C, S, O)
        j1, r1 = _split(pos1, step)
        while True:
            # samples whose offset falls in [j*step, (j+1)*step) hang off lattice state j
            while sample_dt > 0.0 and k < n_out and k * sample_dt <= e1 + tiny:
                p = pos0 + dirn * (k * sample_dt - e0)
                jp, rp = _split(p, step)
                if jp != j:
                    break
                out[k] = _emit(x, rp, step, v, P, C, S, O, kind, lo, hi)
                k += 1
            if j == j1:
                break
            if j1 > j:
                x = rk4_step(x, step, v, P, C, S, O)
                j += 1
            else:
                x = rk4_inverse_step(x, step, v, P, C, S, O)
                j -= 1
            if kind == INTERVAL:
                overshoot = max(overshoot, lo - x, x - hi)
                x = min(max(x, lo), hi)
        if r1 > 0.0:
            y = rk4_step(x, r1 * step, v, P, C, S, O)
            if kind == INTERVAL:
                overshoot = max(overshoot, lo - y, y - hi)
                y = min(max(y, lo), hi)
            x = y
        elapsed = e1
        while sample_dt > 0.0 and k < n_out and k * sample_dt <= elapsed + tiny:
            out[k] = x
            k += 1
    return x, k, overshoot


@njit(cache=True, nogil=True)
def _raw_advance(x, dt, v, P, C, S, O):
    if dt > 0.0:
        return rk4_step(x, dt, v, P, C, S, O)
    if dt < 0.0:
        # backward sub-steps invert the forward step over the same cell piece
        return rk4_inverse_step(x, -dt, v, P, C, S, O)
    return x


@njit(cache=True, nogil=True)
def _advance(x, dt, v, P, C, S, O, kind, lo, hi):
    y = _raw_advance(x, dt, v, P, C, S, O)
    if kind == INTERVAL:
        y = min(max(y, lo), hi)
    return y


def empty_out():
    return np.empty(0, dtype=np.float64)

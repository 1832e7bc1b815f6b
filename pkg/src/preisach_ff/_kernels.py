"""Compiled inner loops for the Preisach update.

All state lives in plain arrays so the same kernels serve the single-step
Python API and the batch feedforward loop.  An operator is passed around as
the tuple ``(levels, colcum, edges, sc, ext, offcum, offw, diagcum)``.

levels : int64[n]
    Per beta-column exclusive upper alpha-row of the up region.  Column ``j``
    holds cells ``(i, j)``, ``i >= j``; those with ``j <= i < levels[j]`` are
    up.  ``levels[j] == j`` is an empty column.
colcum : float64[n, n + 1]
    ``colcum[j, i] = sum(w[:i, j])``.
edges : float64[n + 1]
    Row ``i`` switches up at ``edges[i + 1]``, column ``j`` down at ``edges[j]``.
sc : float64[5]
    u_prev, quantized output, sub-cell output, last direction, stack depth.
ext : float64[cap]
    Sub-cell mode memory: alternating extrema ``[m0, M1, m1, M2, ...]`` with
    ``m0 = u_min``; the top entry always equals u_prev.
offcum, offw, diagcum
    Prefix sums for the triangle mass used by the sub-cell mode (see
    :func:`triangle_mass`).
"""

import numpy as np
from numba import njit

U_PREV, Y, YC, DIRECTION, DEPTH = range(5)


@njit(cache=True)
def rows_reached(edges, u):
    """Number of alpha thresholds ``edges[1:]`` that are <= u."""
    n = edges.shape[0] - 1
    delta = (edges[n] - edges[0]) / n
    k = int((u - edges[0]) / delta)
    if k < 0:
        k = 0
    if k > n:
        k = n
    while k < n and edges[k + 1] <= u:
        k += 1
    while k > 0 and edges[k] > u:
        k -= 1
    return k


@njit(cache=True)
def cols_kept(edges, u):
    """Number of beta thresholds ``edges[:-1]`` strictly below u."""
    n = edges.shape[0] - 1
    delta = (edges[n] - edges[0]) / n
    m = int((u - edges[0]) / delta)
    if m < 0:
        m = 0
    if m > n:
        m = n
    while m < n and edges[m] < u:
        m += 1
    while m > 0 and edges[m - 1] >= u:
        m -= 1
    return m


@njit(cache=True)
def sweep_up(levels, colcum, k):
    # scanning left from column k-1, the first column already at or above k
    # ends the switched band (levels are non-increasing over filled columns)
    mass = 0.0
    j = k - 1
    while j >= 0 and levels[j] < k:
        mass += colcum[j, k] - colcum[j, levels[j]]
        levels[j] = k
        j -= 1
    return mass


@njit(cache=True)
def sweep_down(levels, colcum, m):
    # filled columns form a prefix, so the band ends at the first empty one
    n = levels.shape[0]
    mass = 0.0
    j = m
    while j < n and levels[j] > j:
        mass += colcum[j, levels[j]] - colcum[j, j]
        levels[j] = j
        j += 1
    return mass


@njit(cache=True)
def _locate(edges, x):
    n = edges.shape[0] - 1
    delta = (edges[n] - edges[0]) / n
    k = int((x - edges[0]) / delta)
    if k < 0:
        k = 0
    if k > n - 1:
        k = n - 1
    while k < n - 1 and edges[k + 1] <= x:
        k += 1
    while k > 0 and edges[k] > x:
        k -= 1
    f = (x - edges[k]) / (edges[k + 1] - edges[k])
    if f < 0.0:
        f = 0.0
    elif f > 1.0:
        f = 1.0
    return k, f


@njit(cache=True)
def triangle_mass(edges, offcum, offw, diagcum, b, a):
    """Mass of {b <= beta <= alpha <= a} with density uniform inside each cell.

    ``offcum[p, q]`` sums off-diagonal weights over rows < p and columns >= q;
    ``offw`` holds the off-diagonal weights; ``diagcum[k]`` sums the first k
    diagonal (half-cell) weights.
    """
    if a <= b:
        return 0.0
    ia, fa = _locate(edges, a)
    jb, fb = _locate(edges, b)
    gb = 1.0 - fb
    off = (offcum[ia, jb + 1]
           + fa * (offcum[ia + 1, jb + 1] - offcum[ia, jb + 1])
           + gb * (offcum[ia, jb] - offcum[ia, jb + 1])
           + fa * gb * offw[ia, jb])
    if ia == jb:
        d = fa - fb
        if d < 0.0:
            d = 0.0
        diag = (diagcum[ia + 1] - diagcum[ia]) * d * d
    else:
        diag = ((diagcum[jb + 1] - diagcum[jb]) * gb * gb
                + diagcum[ia] - diagcum[jb + 1]
                + (diagcum[ia + 1] - diagcum[ia]) * fa * fa)
    return off + diag


@njit(cache=True)
def stack_up(ext, ns, u, edges, offcum, offw, diagcum):
    cap = ext.shape[0]
    if ns % 2 == 1:
        if ns >= cap:
            return -1, 0.0
        ext[ns] = ext[ns - 1]
        ns += 1
    cur = ext[ns - 1]
    mass = 0.0
    while True:
        m = ext[ns - 2]
        if ns >= 4 and u >= ext[ns - 3]:
            top = ext[ns - 3]
            mass += (triangle_mass(edges, offcum, offw, diagcum, m, top)
                     - triangle_mass(edges, offcum, offw, diagcum, m, cur))
            ns -= 2
            cur = top
        else:
            mass += (triangle_mass(edges, offcum, offw, diagcum, m, u)
                     - triangle_mass(edges, offcum, offw, diagcum, m, cur))
            ext[ns - 1] = u
            return ns, mass


@njit(cache=True)
def stack_down(ext, ns, u, edges, offcum, offw, diagcum):
    cap = ext.shape[0]
    if ns % 2 == 0:
        if ns >= cap:
            return -1, 0.0
        ext[ns] = ext[ns - 1]
        ns += 1
    cur = ext[ns - 1]
    mass = 0.0
    while ns >= 2:
        top = ext[ns - 2]
        if ns >= 3 and u <= ext[ns - 3]:
            low = ext[ns - 3]
            mass += (triangle_mass(edges, offcum, offw, diagcum, low, top)
                     - triangle_mass(edges, offcum, offw, diagcum, cur, top))
            ns -= 2
            cur = low
        else:
            mass += (triangle_mass(edges, offcum, offw, diagcum, u, top)
                     - triangle_mass(edges, offcum, offw, diagcum, cur, top))
            ext[ns - 1] = u
            return ns, mass
    ext[0] = u
    return ns, mass


@njit(cache=True)
def stack_up_mass(ext, ns, edges, offcum, offw, diagcum):
    """Total up mass of the stack staircase, summed from scratch."""
    mass = 0.0
    k = 1
    while k < ns:
        top = ext[k]
        mass += triangle_mass(edges, offcum, offw, diagcum, ext[k - 1], top)
        if k + 1 < ns:
            mass -= triangle_mass(edges, offcum, offw, diagcum, ext[k + 1], top)
        k += 2
    return mass


@njit(cache=True)
def apply_input(op, u, interp):
    """Advance one monotone step to ``u``; returns the output increment.

    Returns NaN if the sub-cell memory stack overflows.
    """
    levels, colcum, edges, sc, ext, offcum, offw, diagcum = op
    n = levels.shape[0]
    if u < edges[0]:
        u = edges[0]
    elif u > edges[n]:
        u = edges[n]
    if u == sc[U_PREV]:
        return 0.0
    if u > sc[U_PREV]:
        s = 1.0
        dq = 2.0 * sweep_up(levels, colcum, rows_reached(edges, u))
    else:
        s = -1.0
        dq = -2.0 * sweep_down(levels, colcum, cols_kept(edges, u))
    sc[Y] += dq
    sc[DIRECTION] = s
    sc[U_PREV] = u
    if not interp:
        return dq
    ns = int(sc[DEPTH])
    if s > 0:
        ns, mass = stack_up(ext, ns, u, edges, offcum, offw, diagcum)
    else:
        ns, mass = stack_down(ext, ns, u, edges, offcum, offw, diagcum)
    if ns < 0:
        return np.nan
    sc[DEPTH] = ns
    dc = 2.0 * s * mass
    sc[YC] += dc
    return dc


@njit(cache=True)
def output(op, interp):
    sc = op[3]
    return sc[YC] if interp else sc[Y]


@njit(cache=True)
def apply_sequence(op, inputs, interp, out):
    for k in range(inputs.shape[0]):
        d = apply_input(op, inputs[k], interp)
        if not np.isfinite(d):
            return k
        out[k] = output(op, interp)
    return inputs.shape[0]


@njit(cache=True)
def feedforward_loop(r, kdt, u0, model, plant, interp, has_plant,
                     record_every, seg_bounds, out_u, out_ystar, out_y,
                     out_e, seg_peak):
    """Integral loop around ``model``; ``plant`` (optional) sees the same u.

    Rows are written every ``record_every`` samples.  ``seg_peak[c]`` is
    max |r - y| over ``seg_bounds[c] <= k < seg_bounds[c + 1]``.  Returns the
    number of samples completed (``len(r)`` unless a non-finite value shows up).
    """
    edges = model[2]
    n = edges.shape[0] - 1
    u_lo = edges[0]
    u_hi = edges[n]
    u = u0
    ystar = output(model, interp)
    n_seg = seg_bounds.shape[0] - 1
    seg = 0
    row = 0
    for k in range(r.shape[0]):
        e = r[k] - ystar
        u = u + kdt * e
        if not np.isfinite(u):
            return k
        if u < u_lo:
            u = u_lo
        elif u > u_hi:
            u = u_hi
        if not np.isfinite(apply_input(model, u, interp)):
            return k
        ystar = output(model, interp)
        if has_plant:
            if not np.isfinite(apply_input(plant, u, interp)):
                return k
            y = output(plant, interp)
        else:
            y = ystar
        while seg < n_seg and k >= seg_bounds[seg + 1]:
            seg += 1
        if seg < n_seg and k >= seg_bounds[seg]:
            d = abs(r[k] - y)
            if d > seg_peak[seg]:
                seg_peak[seg] = d
        if k % record_every == 0:
            out_u[row] = u
            out_ystar[row] = ystar
            out_y[row] = y
            out_e[row] = e
            row += 1
    return r.shape[0]

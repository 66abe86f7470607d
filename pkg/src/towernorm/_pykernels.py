"""Pure-Python implementation of the numerical kernels.

Mirrors ``_ckernels.pyx`` function for function; ``towernorm.kernels`` picks
whichever is available.  Shape parameters travel as rows of a float64 array
with columns ``(z, l, s, m, v, alpha, c)``.
"""

import math

import numpy as np

Z, L, S, M, V, ALPHA, C = range(7)

_EPS = 2.220446049250313e-16


def shape_value(z, l, s, m, alpha, c, t):
    if t <= z:
        return 0.0
    if t <= l:
        d = t - z
        return d * d / (2.0 * (l - z))
    if t <= s:
        return t - m
    if t < 1.0:
        return 1.0 - c * (1.0 - t) ** alpha
    return 1.0


def shape_slope(z, l, s, m, alpha, c, t):
    if t <= z:
        return 0.0
    if t <= l:
        return (t - z) / (l - z)
    if t <= s:
        return 1.0
    if t < 1.0:
        return c * alpha * (1.0 - t) ** (alpha - 1.0)
    return math.inf


def _one_minus_f(z, l, s, m, alpha, c, u, lam):
    # 1 - f(u/lam) without cancellation near t = 1
    t = u / lam
    if t <= z:
        return 1.0
    if t <= l:
        d = u - z * lam
        return 1.0 - d * d / (2.0 * (l - z) * lam * lam)
    if t <= s:
        return ((1.0 + m) * lam - u) / lam
    w = (lam - u) / lam
    if w <= 0.0:
        return 0.0
    return c * w ** alpha


def _level_partials(z, l, s, m, alpha, c, lam, u):
    """Return (d lam / d r, d lam / d u) at a solved level."""
    if lam <= 0.0:
        return 0.0, 0.0
    t = u / lam
    if t <= z:
        return 1.0, 0.0
    if t <= l:
        omf = _one_minus_f(z, l, s, m, alpha, c, u, lam)
        sl = (t - z) / (l - z)
        dg = omf + t * sl
        return 1.0 / dg, sl / dg
    if t <= s:
        dg = 1.0 + m
        return 1.0 / dg, 1.0 / dg
    w = (lam - u) / lam
    if w <= 0.0:
        return 0.0, 1.0
    # endcap: g' = c w^(a-1) (w + t a); divide through to keep it finite
    denom = w + t * alpha
    return w ** (1.0 - alpha) / (c * denom), alpha / denom


def solve_level(r, u, row, rel, max_iter):
    """Solve lam * (1 - f(u/lam)) = r for lam.  Returns (lam, iterations).

    ``iterations == -1`` signals non-convergence.
    """
    z, l, s, m = row[Z], row[L], row[S], row[M]
    alpha, c = row[ALPHA], row[C]
    if r == 0.0:
        return u, 0
    if u == 0.0 or u <= z * r:
        return r, 0
    lo = max(u, (r + u) / (1.0 + m))
    hi = r + u
    lam = lo
    polish = -1
    for it in range(1, max_iter + 1):
        omf = _one_minus_f(z, l, s, m, alpha, c, u, lam)
        F = lam * omf - r
        if F == 0.0:
            return lam, it
        if F < 0.0:
            lo = lam
        else:
            hi = lam
        t = u / lam
        if t <= z:
            dg = 1.0
        elif t <= l:
            dg = omf + t * (t - z) / (l - z)
        elif t <= s:
            dg = 1.0 + m
        else:
            w = (lam - u) / lam
            if w <= 0.0:
                # infinite slope at lam = u: no Newton information
                if hi - lo <= 4.0 * _EPS * hi:
                    # bracket is a single float: lam = u to working precision
                    return lam, it
                lam = 0.5 * (lo + hi)
                continue
            dg = c * w ** (alpha - 1.0) * (w + t * alpha)
        step = F / dg
        if abs(step) <= 2.0 * _EPS * lam:
            return lam, it
        new = lam - step
        if not (lo < new < hi):
            lam = 0.5 * (lo + hi)
            if hi - lo <= 4.0 * _EPS * hi:
                return lam, it
            continue
        lam = new
        if polish == 0:
            return lam, it
        if polish > 0:
            polish -= 1
        elif abs(step) <= rel * lam:
            # converged to tol; two more Newton steps reach rounding level
            polish = 2
    return lam, -1


def level_chain(base_norm, coords, params, rel, max_iter):
    """Run the level recurrence over ``coords``; one params row per coordinate.

    Returns ``(per_level, iterations)`` with ``per_level[0] = base_norm``.
    """
    n = len(coords)
    per = np.empty(n + 1)
    iters = np.zeros(n, dtype=np.int64)
    lam = float(base_norm)
    per[0] = lam
    for k in range(n):
        lam, it = solve_level(lam, abs(float(coords[k])), params[k], rel, max_iter)
        if it < 0:
            iters[k] = -1
            per[k + 1:] = np.nan
            return per, iters
        per[k + 1] = lam
        iters[k] = it
    return per, iters


def chain_partials(per_level, coords, params):
    """d lam_k / d lam_{k-1} and d lam_k / d |x_k| for k = 1..n."""
    n = len(coords)
    dr = np.empty(n)
    du = np.empty(n)
    for k in range(n):
        row = params[k]
        a, b = _level_partials(row[Z], row[L], row[S], row[M], row[ALPHA],
                               row[C], per_level[k + 1], abs(float(coords[k])))
        dr[k] = a
        du[k] = b
    return dr, du


def member_ball(base_norm, coords, params, scale):
    """Is x / scale in the level-n unit ball?  n = len(coords)."""
    s = float(scale)
    for k in range(len(coords) - 1, -1, -1):
        a = abs(float(coords[k]))
        t = a / s
        if t > 1.0:
            return False
        row = params[k]
        fac = 1.0 - shape_value(row[Z], row[L], row[S], row[M], row[ALPHA], row[C], t)
        if fac <= 0.0:
            if base_norm != 0.0:
                return False
            for j in range(k):
                if coords[j] != 0.0:
                    return False
            return True
        s *= fac
    return base_norm <= s


def bisect_norm(base_norm, coords, params, lo, hi, rel, max_iter):
    """Smallest scale with membership, by bisection on [lo, hi]."""
    if hi <= 0.0:
        return 0.0, 0
    it = 0
    while not member_ball(base_norm, coords, params, hi):
        lo, hi = hi, 2.0 * hi
        it += 1
        if it > max_iter:
            return hi, -1
    while lo > 0.0 and member_ball(base_norm, coords, params, lo):
        hi, lo = lo, 0.5 * lo
        it += 1
        if it > max_iter:
            return hi, -1
    while hi - lo > rel * hi:
        mid = 0.5 * (lo + hi)
        if member_ball(base_norm, coords, params, mid):
            hi = mid
        else:
            lo = mid
        it += 1
        if it > max_iter:
            return 0.5 * (lo + hi), -1
    return 0.5 * (lo + hi), it

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.  Same contract as ``_pykernels``."""

import numpy as np
from libc.math cimport fabs, pow, INFINITY

cdef double EPS = 2.220446049250313e-16


cdef inline double _value(double z, double l, double s, double m, double alpha,
                          double c, double t) nogil:
    cdef double d
    if t <= z:
        return 0.0
    if t <= l:
        d = t - z
        return d * d / (2.0 * (l - z))
    if t <= s:
        return t - m
    if t < 1.0:
        return 1.0 - c * pow(1.0 - t, alpha)
    return 1.0


cdef inline double _slope(double z, double l, double s, double m, double alpha,
                          double c, double t) nogil:
    if t <= z:
        return 0.0
    if t <= l:
        return (t - z) / (l - z)
    if t <= s:
        return 1.0
    if t < 1.0:
        return c * alpha * pow(1.0 - t, alpha - 1.0)
    return INFINITY


cdef inline double _omf(double z, double l, double s, double m, double alpha,
                        double c, double u, double lam) nogil:
    cdef double t = u / lam
    cdef double d, w
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
    return c * pow(w, alpha)


cdef double _solve(double r, double u, const double[::1] row, double rel,
                   int max_iter, int* iters) nogil:
    cdef double z = row[0], l = row[1], s = row[2], m = row[3]
    cdef double alpha = row[5], c = row[6]
    cdef double lo, hi, lam, omf, F, t, dg, w, new, step
    cdef int it, polish = -1
    iters[0] = 0
    if r == 0.0:
        return u
    if u == 0.0 or u <= z * r:
        return r
    lo = (r + u) / (1.0 + m)
    if lo < u:
        lo = u
    hi = r + u
    lam = lo
    for it in range(1, max_iter + 1):
        omf = _omf(z, l, s, m, alpha, c, u, lam)
        F = lam * omf - r
        if F == 0.0:
            iters[0] = it
            return lam
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
                if hi - lo <= 4.0 * EPS * hi:
                    iters[0] = it
                    return lam
                lam = 0.5 * (lo + hi)
                continue
            dg = c * pow(w, alpha - 1.0) * (w + t * alpha)
        step = F / dg
        if fabs(step) <= 2.0 * EPS * lam:
            iters[0] = it
            return lam
        new = lam - step
        if not (lo < new < hi):
            lam = 0.5 * (lo + hi)
            if hi - lo <= 4.0 * EPS * hi:
                iters[0] = it
                return lam
            continue
        lam = new
        if polish == 0:
            iters[0] = it
            return lam
        if polish > 0:
            polish -= 1
        elif fabs(step) <= rel * lam:
            polish = 2
    iters[0] = -1
    return lam


def shape_value(double z, double l, double s, double m, double alpha, double c,
                double t):
    return _value(z, l, s, m, alpha, c, t)


def shape_slope(double z, double l, double s, double m, double alpha, double c,
                double t):
    return _slope(z, l, s, m, alpha, c, t)


def solve_level(double r, double u, const double[::1] row, double rel, int max_iter):
    cdef int it
    cdef double lam = _solve(r, u, row, rel, max_iter, &it)
    return lam, it


def level_chain(double base_norm, const double[::1] coords, const double[:, ::1] params,
                double rel, int max_iter):
    cdef Py_ssize_t n = coords.shape[0], k
    per_arr = np.empty(n + 1)
    it_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] per = per_arr
    cdef long long[::1] iters = it_arr
    cdef double lam = base_norm
    cdef int it
    per[0] = lam
    for k in range(n):
        lam = _solve(lam, fabs(coords[k]), params[k], rel, max_iter, &it)
        if it < 0:
            iters[k] = -1
            per_arr[k + 1:] = np.nan
            return per_arr, it_arr
        per[k + 1] = lam
        iters[k] = it
    return per_arr, it_arr


def chain_partials(const double[::1] per_level, const double[::1] coords,
                   const double[:, ::1] params):
    cdef Py_ssize_t n = coords.shape[0], k
    dr_arr = np.empty(n)
    du_arr = np.empty(n)
    cdef double[::1] dr = dr_arr
    cdef double[::1] du = du_arr
    cdef double z, l, s, m, alpha, c, lam, u, t, omf, sl, dg, w, denom
    for k in range(n):
        z = params[k, 0]; l = params[k, 1]; s = params[k, 2]; m = params[k, 3]
        alpha = params[k, 5]; c = params[k, 6]
        lam = per_level[k + 1]
        u = fabs(coords[k])
        if lam <= 0.0:
            dr[k] = 0.0; du[k] = 0.0
            continue
        t = u / lam
        if t <= z:
            dr[k] = 1.0; du[k] = 0.0
        elif t <= l:
            omf = _omf(z, l, s, m, alpha, c, u, lam)
            sl = (t - z) / (l - z)
            dg = omf + t * sl
            dr[k] = 1.0 / dg; du[k] = sl / dg
        elif t <= s:
            dr[k] = 1.0 / (1.0 + m); du[k] = 1.0 / (1.0 + m)
        else:
            w = (lam - u) / lam
            if w <= 0.0:
                dr[k] = 0.0; du[k] = 1.0
            else:
                denom = w + t * alpha
                dr[k] = pow(w, 1.0 - alpha) / (c * denom)
                du[k] = alpha / denom
    return dr_arr, du_arr


cdef bint _member(double base_norm, const double[::1] coords, const double[:, ::1] params,
                  double scale) nogil:
    cdef Py_ssize_t k, j
    cdef double s = scale, t, fac
    for k in range(coords.shape[0] - 1, -1, -1):
        t = fabs(coords[k]) / s
        if t > 1.0:
            return False
        fac = 1.0 - _value(params[k, 0], params[k, 1], params[k, 2],
                           params[k, 3], params[k, 5], params[k, 6], t)
        if fac <= 0.0:
            if base_norm != 0.0:
                return False
            for j in range(k):
                if coords[j] != 0.0:
                    return False
            return True
        s *= fac
    return base_norm <= s


def member_ball(double base_norm, const double[::1] coords, const double[:, ::1] params,
                double scale):
    return bool(_member(base_norm, coords, params, scale))


def bisect_norm(double base_norm, const double[::1] coords, const double[:, ::1] params,
                double lo, double hi, double rel, int max_iter):
    cdef int it = 0
    cdef double mid
    if hi <= 0.0:
        return 0.0, 0
    while not _member(base_norm, coords, params, hi):
        lo = hi
        hi = 2.0 * hi
        it += 1
        if it > max_iter:
            return hi, -1
    while lo > 0.0 and _member(base_norm, coords, params, lo):
        hi = lo
        lo = 0.5 * lo
        it += 1
        if it > max_iter:
            return hi, -1
    while hi - lo > rel * hi:
        mid = 0.5 * (lo + hi)
        if _member(base_norm, coords, params, mid):
            hi = mid
        else:
            lo = mid
        it += 1
        if it > max_iter:
            return 0.5 * (lo + hi), -1
    return 0.5 * (lo + hi), it

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: Bowyer-Watson insertion and path-gain sums.

Mirrors ``_pykernels`` exactly; only the speed differs.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

from ._predicates import incircle_exact, orient2d_exact

cnp.import_array()

cdef double _EPS = 1.1102230246251565e-16
cdef double CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
cdef double ICC_ERRBOUND = (10.0 + 96.0 * _EPS) * _EPS


cdef int orient2d(double ax, double ay, double bx, double by, double cx, double cy) except -2:
    cdef double detleft = (ax - cx) * (by - cy)
    cdef double detright = (ay - cy) * (bx - cx)
    cdef double det = detleft - detright
    if fabs(det) >= CCW_ERRBOUND * (fabs(detleft) + fabs(detright)) and det != 0.0:
        return 1 if det > 0 else -1
    return orient2d_exact(ax, ay, bx, by, cx, cy)


cdef int incircle(double ax, double ay, double bx, double by, double cx, double cy,
                  double dx, double dy) except -2:
    cdef double adx = ax - dx, ady = ay - dy
    cdef double bdx = bx - dx, bdy = by - dy
    cdef double cdx = cx - dx, cdy = cy - dy
    cdef double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy
    cdef double cdxady = cdx * ady, adxcdy = adx * cdy
    cdef double adxbdy = adx * bdy, bdxady = bdx * ady
    cdef double alift = adx * adx + ady * ady
    cdef double blift = bdx * bdx + bdy * bdy
    cdef double clift = cdx * cdx + cdy * cdy
    cdef double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    cdef double permanent = ((fabs(bdxcdy) + fabs(cdxbdy)) * alift
                             + (fabs(cdxady) + fabs(adxcdy)) * blift
                             + (fabs(adxbdy) + fabs(bdxady)) * clift)
    if fabs(det) > ICC_ERRBOUND * permanent:
        return 1 if det > 0 else -1
    return incircle_exact(ax, ay, bx, by, cx, cy, dx, dy)


def bowyer_watson(double[::1] x, double[::1] y, cnp.int64_t[::1] order):
    cdef Py_ssize_t n = x.shape[0] - 3
    cdef Py_ssize_t cap = 2 * n + 16
    cdef cnp.int64_t[:, ::1] tv = np.empty((cap, 3), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] tn = np.empty((cap, 3), dtype=np.int64)
    cdef cnp.int8_t[::1] alive = np.zeros(cap, dtype=np.int8)
    cdef cnp.int64_t[::1] mark = np.full(cap, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] freelist = np.empty(cap, dtype=np.int64)
    cdef cnp.int64_t[::1] cavity = np.empty(cap, dtype=np.int64)
    cdef cnp.int64_t[::1] stack = np.empty(cap, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] boundary = np.empty((cap + 3, 3), dtype=np.int64)
    cdef cnp.int64_t[::1] created = np.empty(cap + 3, dtype=np.int64)
    cdef cnp.int64_t[::1] start_of = np.full(n + 3, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] end_of = np.full(n + 3, -1, dtype=np.int64)
    cdef Py_ssize_t n_tri = 1, n_free = 0, n_cav, n_stack, n_bnd, n_new
    cdef Py_ssize_t step, t, c, nb, i, j, k, a, b, p, last = 0
    cdef double px, py
    cdef bint moved

    tv[0, 0] = n
    tv[0, 1] = n + 1
    tv[0, 2] = n + 2
    tn[0, 0] = -1
    tn[0, 1] = -1
    tn[0, 2] = -1
    alive[0] = 1

    for step in range(order.shape[0]):
        p = order[step]
        px = x[p]
        py = y[p]
        t = last
        while True:
            moved = False
            for i in range(3):
                a = tv[t, (i + 1) % 3]
                b = tv[t, (i + 2) % 3]
                if orient2d(x[a], y[a], x[b], y[b], px, py) < 0:
                    t = tn[t, i]
                    moved = True
                    break
            if not moved:
                break
        if ((x[tv[t, 0]] == px and y[tv[t, 0]] == py) or (x[tv[t, 1]] == px and y[tv[t, 1]] == py)
                or (x[tv[t, 2]] == px and y[tv[t, 2]] == py)):
            continue

        mark[t] = step
        cavity[0] = t
        n_cav = 1
        stack[0] = t
        n_stack = 1
        n_bnd = 0
        while n_stack > 0:
            n_stack -= 1
            c = stack[n_stack]
            for i in range(3):
                nb = tn[c, i]
                a = tv[c, (i + 1) % 3]
                b = tv[c, (i + 2) % 3]
                if nb >= 0 and mark[nb] == step:
                    continue
                if nb >= 0 and incircle(x[tv[nb, 0]], y[tv[nb, 0]], x[tv[nb, 1]], y[tv[nb, 1]],
                                        x[tv[nb, 2]], y[tv[nb, 2]], px, py) > 0:
                    mark[nb] = step
                    cavity[n_cav] = nb
                    n_cav += 1
                    stack[n_stack] = nb
                    n_stack += 1
                    continue
                boundary[n_bnd, 0] = a
                boundary[n_bnd, 1] = b
                boundary[n_bnd, 2] = nb
                n_bnd += 1

        for k in range(n_cav):
            alive[cavity[k]] = 0
            freelist[n_free] = cavity[k]
            n_free += 1

        n_new = 0
        for k in range(n_bnd):
            a = boundary[k, 0]
            b = boundary[k, 1]
            nb = boundary[k, 2]
            if n_free > 0:
                n_free -= 1
                t = freelist[n_free]
            else:
                t = n_tri
                n_tri += 1
            tv[t, 0] = a
            tv[t, 1] = b
            tv[t, 2] = p
            tn[t, 0] = -1
            tn[t, 1] = -1
            tn[t, 2] = nb
            alive[t] = 1
            if nb >= 0:
                for j in range(3):
                    if tv[nb, (j + 1) % 3] == b and tv[nb, (j + 2) % 3] == a:
                        tn[nb, j] = t
                        break
            start_of[a] = t
            end_of[b] = t
            created[n_new] = t
            n_new += 1
        for k in range(n_new):
            t = created[k]
            tn[t, 0] = start_of[tv[t, 1]]
            tn[t, 1] = end_of[tv[t, 0]]
        last = created[n_new - 1]

    keep = [t for t in range(n_tri) if alive[t] and tv[t, 0] < n and tv[t, 1] < n and tv[t, 2] < n]
    return np.asarray(tv)[keep].reshape(-1, 3).copy()


def path_gain_sums(double[:, ::1] pos, double[:, ::1] pts, double[:, ::1] fades, double alpha):
    cdef Py_ssize_t nv = pos.shape[0], npt = pts.shape[0], v, i
    cdef double[::1] out = np.zeros(nv)
    cdef double vx, vy, dx, dy, d2, acc, e = -0.5 * alpha
    cdef bint four = alpha == 4.0
    for v in range(nv):
        vx = pos[v, 0]
        vy = pos[v, 1]
        acc = 0.0
        if four:
            for i in range(npt):
                dx = vx - pts[i, 0]
                dy = vy - pts[i, 1]
                d2 = dx * dx + dy * dy
                acc += fades[v, i] / (d2 * d2)
        else:
            for i in range(npt):
                dx = vx - pts[i, 0]
                dy = vy - pts[i, 1]
                d2 = dx * dx + dy * dy
                acc += fades[v, i] * pow(d2, e)
        out[v] = acc
    return np.asarray(out)

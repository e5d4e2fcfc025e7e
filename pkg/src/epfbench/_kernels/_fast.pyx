# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the reference kernels in ``_ref.py``.

Semantics must match the reference lane; only the inner loops differ.
"""

from libc.math cimport fabs, INFINITY

import numpy as np

cimport numpy as cnp

cnp.import_array()


def loess_smooth(y, int q, robustness=None, bint extend=False):
    """Degree-1 loess at integer design points; see the reference lane."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t m = yy.shape[0]
    if m == 0:
        raise ValueError("empty series")
    cdef int q_eff = q if q < m else <int> m
    cdef Py_ssize_t n_out = m + 2 if extend else m
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n_out, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rob
    cdef bint has_rob = robustness is not None
    if has_rob:
        rob = np.ascontiguousarray(robustness, dtype=np.float64)
    else:
        rob = yy  # placeholder, never read

    cdef Py_ssize_t k, jj, lo
    cdef int half = (q_eff - 1) // 2
    cdef double x, dmax, d, u, wgt, dx, yv
    cdef double sw, swx, swy, swxx, swxy, denom, fitted, extra
    extra = (q - m) / 2.0 if q > m else 0.0

    for k in range(n_out):
        x = (<double> k) - 1.0 if extend else <double> k
        lo = _round_clamp(x, half, m, q_eff)
        dmax = 0.0
        for jj in range(q_eff):
            d = fabs((<double> (lo + jj)) - x)
            if d > dmax:
                dmax = d
        dmax += extra
        if dmax <= 0.0:
            dmax = 1.0
        sw = swx = swy = swxx = swxy = 0.0
        for jj in range(q_eff):
            dx = (<double> (lo + jj)) - x
            u = fabs(dx) / dmax
            if u < 1.0:
                wgt = (1.0 - u * u * u)
                wgt = wgt * wgt * wgt
            else:
                wgt = 0.0
            if has_rob:
                wgt *= rob[lo + jj]
            yv = yy[lo + jj]
            sw += wgt
            swx += wgt * dx
            swy += wgt * yv
            swxx += wgt * dx * dx
            swxy += wgt * dx * yv
        denom = sw * swxx - swx * swx
        if denom > 1e-12 * (sw * swxx if sw * swxx > 1e-300 else 1e-300):
            fitted = (swxx * swy - swx * swxy) / denom
        elif sw > 0.0:
            fitted = swy / sw
        else:
            fitted = 0.0
            for jj in range(q_eff):
                fitted += yy[lo + jj]
            fitted /= q_eff
        out[k] = fitted
    return out


cdef inline Py_ssize_t _round_clamp(double x, int half, Py_ssize_t m, int q_eff):
    cdef long r = <long> (x + 0.5) if x >= 0 else -(<long> (-x + 0.5))
    cdef long lo = r - half
    if lo < 0:
        lo = 0
    if lo > m - q_eff:
        lo = m - q_eff
    return <Py_ssize_t> lo


def enet_cd(xt, y, double l1, double l2, w0, long max_sweeps, double tol,
            double obj_tol=0.0):
    """Cyclic coordinate descent for the elastic net on centred data.

    Mirrors the reference lane, including the optional objective-plateau
    stop used by the cross-validation grid.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2] xtc = np.ascontiguousarray(xt, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yc = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t p = xtc.shape[0]
    cdef Py_ssize_t n = xtc.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.array(w0, dtype=np.float64, copy=True)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] csq = np.empty(p, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] r = np.empty(n, dtype=np.float64)

    cdef Py_ssize_t i, j
    cdef double acc, rho, new, delta, max_delta, cj, obj, prev_obj
    cdef long sweeps = 0

    for j in range(p):
        acc = 0.0
        for i in range(n):
            acc += xtc[j, i] * xtc[j, i]
        csq[j] = acc / n
    for i in range(n):
        acc = 0.0
        for j in range(p):
            acc += w[j] * xtc[j, i]
        r[i] = yc[i] - acc

    max_delta = INFINITY
    prev_obj = INFINITY
    while sweeps < max_sweeps:
        sweeps += 1
        max_delta = 0.0
        for j in range(p):
            cj = csq[j]
            if cj == 0.0:
                new = 0.0
            else:
                acc = 0.0
                for i in range(n):
                    acc += xtc[j, i] * r[i]
                rho = acc / n + cj * w[j]
                if rho > l1:
                    new = (rho - l1) / (cj + l2)
                elif rho < -l1:
                    new = (rho + l1) / (cj + l2)
                else:
                    new = 0.0
            delta = new - w[j]
            if delta != 0.0:
                for i in range(n):
                    r[i] -= delta * xtc[j, i]
                w[j] = new
                if fabs(delta) > max_delta:
                    max_delta = fabs(delta)
        if max_delta < tol:
            break
        if obj_tol > 0.0:
            obj = 0.0
            for i in range(n):
                obj += r[i] * r[i]
            obj /= 2.0 * n
            for j in range(p):
                obj += l1 * fabs(w[j]) + 0.5 * l2 * w[j] * w[j]
            if prev_obj - obj < obj_tol * (1.0 + fabs(obj)):
                break
            prev_obj = obj
    return w, int(sweeps), float(max_delta)


def svr_smo(kmat, y, double c, double eps, double tol, long max_iter):
    """Maximal-violating-pair SMO for the epsilon-SVR dual; see _ref."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] k = np.ascontiguousarray(kmat, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yc = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = yc.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] beta = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad = -yc.copy()

    cdef Py_ssize_t ii, best_i, best_j, nc, ci
    cdef long iters = 0
    cdef double dplus, dminus, best_up, best_dn, violation
    cdef double lo, hi, a, g0, bi, bj, t, best_t, val, best_val
    cdef double cands[16]
    cdef double mid, si, sj, t_star
    cdef double edges[4]
    cdef Py_ssize_t ne, ei, ej
    cdef double tmp

    violation = INFINITY
    while True:
        best_up = INFINITY
        best_dn = -INFINITY
        best_i = -1
        best_j = -1
        for ii in range(n):
            dplus = grad[ii] + (eps if beta[ii] >= 0.0 else -eps)
            dminus = grad[ii] + (eps if beta[ii] > 0.0 else -eps)
            if beta[ii] < c and dplus < best_up:
                best_up = dplus
                best_i = ii
            if beta[ii] > -c and dminus > best_dn:
                best_dn = dminus
                best_j = ii
        if best_i < 0 or best_j < 0:
            violation = 0.0
            break
        violation = best_dn - best_up
        if violation < tol or iters >= max_iter:
            break
        bi = beta[best_i]
        bj = beta[best_j]
        lo = -c - bi if -c - bi > bj - c else bj - c
        hi = c - bi if c - bi < bj + c else bj + c
        a = k[best_i, best_i] + k[best_j, best_j] - 2.0 * k[best_i, best_j]
        g0 = grad[best_i] - grad[best_j]

        nc = 0
        cands[nc] = lo; nc += 1
        cands[nc] = hi; nc += 1
        if lo < -bi < hi:
            cands[nc] = -bi; nc += 1
        if lo < bj < hi:
            cands[nc] = bj; nc += 1
        if a > 0.0:
            ne = 0
            edges[ne] = lo; ne += 1
            if lo < -bi < hi:
                edges[ne] = -bi; ne += 1
            if lo < bj < hi and bj != -bi:
                edges[ne] = bj; ne += 1
            edges[ne] = hi; ne += 1
            # insertion sort of the tiny edge list
            for ei in range(1, ne):
                tmp = edges[ei]
                ej = ei
                while ej > 0 and edges[ej - 1] > tmp:
                    edges[ej] = edges[ej - 1]
                    ej -= 1
                edges[ej] = tmp
            for ei in range(ne - 1):
                mid = 0.5 * (edges[ei] + edges[ei + 1])
                si = 1.0 if bi + mid >= 0.0 else -1.0
                sj = 1.0 if bj - mid >= 0.0 else -1.0
                t_star = -(g0 + eps * (si - sj)) / a
                if edges[ei] <= t_star <= edges[ei + 1]:
                    cands[nc] = t_star; nc += 1

        best_t = 0.0
        best_val = 0.0
        for ci in range(nc):
            t = cands[ci]
            val = (0.5 * a * t * t + g0 * t
                   + eps * (fabs(bi + t) - fabs(bi) + fabs(bj - t) - fabs(bj)))
            if val < best_val:
                best_val = val
                best_t = t
        if best_val >= 0.0:
            break
        beta[best_i] = bi + best_t
        beta[best_j] = bj - best_t
        for ii in range(n):
            grad[ii] += best_t * (k[ii, best_i] - k[ii, best_j])
        iters += 1

    cdef double bias_acc = 0.0
    cdef Py_ssize_t n_margin = 0
    for ii in range(n):
        if fabs(beta[ii]) > 1e-10 and fabs(beta[ii]) < c * (1.0 - 1e-10):
            bias_acc += -grad[ii] - (eps if beta[ii] > 0.0 else -eps)
            n_margin += 1
    cdef double bias
    if n_margin > 0:
        bias = bias_acc / n_margin
    else:
        best_up = INFINITY
        best_dn = -INFINITY
        for ii in range(n):
            dplus = grad[ii] + (eps if beta[ii] >= 0.0 else -eps)
            dminus = grad[ii] + (eps if beta[ii] > 0.0 else -eps)
            if beta[ii] < c and dplus < best_up:
                best_up = dplus
            if beta[ii] > -c and dminus > best_dn:
                best_dn = dminus
        bias = -0.5 * (best_up + best_dn)
    return beta, float(bias), int(iters), float(violation if violation > 0.0 else 0.0)


def ets_sse(y, int kind, double alpha, double beta, double phi):
    """One-step-ahead SSE of an exponential-smoothing recursion."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] yc = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = yc.shape[0]
    cdef double level = yc[0]
    cdef double sse = 0.0
    cdef double e, trend, damp, pred, new_level
    cdef Py_ssize_t t
    if kind == 0:
        for t in range(1, n):
            e = yc[t] - level
            sse += e * e
            level += alpha * e
        return sse, level, 0.0
    trend = yc[1] - yc[0]
    damp = phi if kind == 2 else 1.0
    for t in range(1, n):
        pred = level + damp * trend
        e = yc[t] - pred
        sse += e * e
        new_level = pred + alpha * e
        trend = beta * (new_level - level) + (1.0 - beta) * damp * trend
        level = new_level
    return sse, level, trend

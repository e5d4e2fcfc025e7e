"""Pure-Python/numpy reference implementations of the hot kernels.

Selected automatically when the compiled extension is unavailable (or
when EPFBENCH_PURE_PYTHON is set). Must stay semantically identical to
the Cython twins in ``_fast.pyx``; the kernel test suite cross-checks
the two lanes on random inputs.
"""

from __future__ import annotations

import numpy as np


def loess_smooth(
    y: np.ndarray,
    q: int,
    robustness: np.ndarray | None = None,
    extend: bool = False,
) -> np.ndarray:
    """Degree-1 loess at integer design points 0..m-1.

    Each point is fitted from its q nearest neighbours with tricube
    weights (truncated asymmetric windows at the edges). With
    ``extend=True`` the local lines are also evaluated at -1 and m, as
    the seasonal sub-series smoother requires; the output then has m+2
    entries for positions -1..m.
    """
    y = np.asarray(y, dtype=np.float64)
    m = len(y)
    if m == 0:
        raise ValueError("empty series")
    q_eff = min(q, m)
    if extend:
        xs = np.arange(-1.0, m + 1.0)
    else:
        xs = np.arange(0.0, float(m))

    half = (q_eff - 1) // 2
    lo = np.clip(np.rint(xs).astype(np.int64) - half, 0, m - q_eff)
    idx = lo[:, None] + np.arange(q_eff)[None, :]
    dx = idx - xs[:, None]
    dist = np.abs(dx)
    dmax = dist.max(axis=1)
    if q > m:
        dmax = dmax + (q - m) / 2.0
    dmax = np.where(dmax > 0.0, dmax, 1.0)
    u = dist / dmax[:, None]
    w = np.clip(1.0 - u**3, 0.0, None) ** 3
    if robustness is not None:
        w = w * np.asarray(robustness, dtype=np.float64)[idx]

    yy = y[idx]
    sw = w.sum(axis=1)
    swx = (w * dx).sum(axis=1)
    swy = (w * yy).sum(axis=1)
    swxx = (w * dx * dx).sum(axis=1)
    swxy = (w * dx * yy).sum(axis=1)

    denom = sw * swxx - swx * swx
    with np.errstate(divide="ignore", invalid="ignore"):
        fitted = (swxx * swy - swx * swxy) / denom
        fallback = np.where(sw > 0.0, swy / np.where(sw > 0.0, sw, 1.0),
                            yy.mean(axis=1))
    bad = ~np.isfinite(fitted) | (denom <= 1e-12 * np.maximum(sw * swxx, 1e-300))
    return np.where(bad, fallback, fitted)


def _soft_threshold(z: float, t: float) -> float:
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def enet_cd(
    xt: np.ndarray,
    y: np.ndarray,
    l1: float,
    l2: float,
    w0: np.ndarray,
    max_sweeps: int,
    tol: float,
    obj_tol: float = 0.0,
) -> tuple[np.ndarray, int, float]:
    """Cyclic coordinate descent for the elastic net on centred data.

    Minimises (1/2n)||y - Xw||^2 + l1*||w||_1 + (l2/2)*||w||^2 where
    ``xt`` is X transposed, shape (features, samples). Stops when the
    largest coordinate update in a sweep drops below ``tol``; a nonzero
    ``obj_tol`` additionally stops once the per-sweep objective decrease
    falls below obj_tol*(1+|objective|), which exits the flat valleys
    that duplicated columns create long before the coordinates settle.
    Returns the weights, sweeps used, and the final maximum update.
    """
    xt = np.ascontiguousarray(xt, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    p, n = xt.shape
    w = np.array(w0, dtype=np.float64, copy=True)
    csq = (xt * xt).sum(axis=1) / n
    r = y - w @ xt
    max_delta = np.inf
    sweeps = 0
    prev_obj = np.inf
    while sweeps < max_sweeps:
        sweeps += 1
        max_delta = 0.0
        for j in range(p):
            cj = csq[j]
            if cj == 0.0:
                new = 0.0
            else:
                rho = float(xt[j] @ r) / n + cj * w[j]
                new = _soft_threshold(rho, l1) / (cj + l2)
            delta = new - w[j]
            if delta != 0.0:
                r -= delta * xt[j]
                w[j] = new
                if abs(delta) > max_delta:
                    max_delta = abs(delta)
        if max_delta < tol:
            break
        if obj_tol > 0.0:
            obj = (float(r @ r) / (2.0 * n)
                   + l1 * float(np.abs(w).sum())
                   + 0.5 * l2 * float(w @ w))
            if prev_obj - obj < obj_tol * (1.0 + abs(obj)):
                break
            prev_obj = obj
    return w, sweeps, max_delta


def svr_smo(
    kmat: np.ndarray,
    y: np.ndarray,
    c: float,
    eps: float,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, float, int, float]:
    """SMO solver for the epsilon-SVR dual in beta = alpha - alpha* form.

    Minimises f(beta) = 0.5 beta'K beta + eps*||beta||_1 - y'beta subject
    to sum(beta) = 0, |beta_i| <= C, via maximal-violating-pair updates
    with exact two-coordinate line search. Returns (beta, bias,
    iterations, final KKT violation).
    """
    kmat = np.asarray(kmat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    beta = np.zeros(n)
    grad = -y.copy()  # K beta - y
    iters = 0
    violation = np.inf
    while True:
        dplus = grad + np.where(beta >= 0.0, eps, -eps)
        dminus = grad + np.where(beta > 0.0, eps, -eps)
        up_ok = beta < c
        dn_ok = beta > -c
        if not up_ok.any() or not dn_ok.any():
            violation = 0.0
            break
        i = int(np.where(up_ok, dplus, np.inf).argmin())
        j = int(np.where(dn_ok, dminus, -np.inf).argmax())
        violation = dminus[j] - dplus[i]
        if violation < tol or iters >= max_iter:
            break
        lo = max(-c - beta[i], beta[j] - c)
        hi = min(c - beta[i], beta[j] + c)
        a = kmat[i, i] + kmat[j, j] - 2.0 * kmat[i, j]
        g0 = grad[i] - grad[j]
        bi, bj = beta[i], beta[j]

        def phi(t: float) -> float:
            return (0.5 * a * t * t + g0 * t
                    + eps * (abs(bi + t) - abs(bi) + abs(bj - t) - abs(bj)))

        cands = [lo, hi]
        for bp in (-bi, bj):
            if lo < bp < hi:
                cands.append(bp)
        if a > 0.0:
            edges = sorted({lo, hi, *[b for b in (-bi, bj) if lo < b < hi]})
            for s_lo, s_hi in zip(edges, edges[1:]):
                mid = 0.5 * (s_lo + s_hi)
                si = 1.0 if bi + mid >= 0.0 else -1.0
                sj = 1.0 if bj - mid >= 0.0 else -1.0
                t_star = -(g0 + eps * (si - sj)) / a
                if s_lo <= t_star <= s_hi:
                    cands.append(t_star)
        best_t = min(cands, key=phi)
        if phi(best_t) >= 0.0:
            break  # numerically stuck: no strict descent available
        beta[i] += best_t
        beta[j] -= best_t
        grad += best_t * (kmat[:, i] - kmat[:, j])
        iters += 1

    margin = (np.abs(beta) > 1e-10) & (np.abs(beta) < c * (1.0 - 1e-10))
    if margin.any():
        bias = float(np.mean(-grad[margin] - eps * np.sign(beta[margin])))
    else:
        dplus = grad + np.where(beta >= 0.0, eps, -eps)
        dminus = grad + np.where(beta > 0.0, eps, -eps)
        up = np.where(beta < c, dplus, np.inf).min()
        dn = np.where(beta > -c, dminus, -np.inf).max()
        bias = -0.5 * (up + dn)
    return beta, bias, iters, float(max(violation, 0.0))


def ets_sse(
    y: np.ndarray, kind: int, alpha: float, beta: float, phi: float
) -> tuple[float, float, float]:
    """One-step-ahead SSE of an exponential-smoothing recursion.

    kind 0 = simple, 1 = Holt linear trend, 2 = damped trend. Initial
    level is y[0]; initial trend is y[1] - y[0]. Returns (sse, final
    level, final trend).
    """
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    level = float(y[0])
    sse = 0.0
    if kind == 0:
        for t in range(1, n):
            e = y[t] - level
            sse += e * e
            level += alpha * e
        return sse, level, 0.0
    trend = float(y[1]) - float(y[0])
    damp = phi if kind == 2 else 1.0
    for t in range(1, n):
        pred = level + damp * trend
        e = y[t] - pred
        sse += e * e
        new_level = pred + alpha * e
        trend = beta * (new_level - level) + (1.0 - beta) * damp * trend
        level = new_level
    return sse, level, trend

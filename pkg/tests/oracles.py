"""Independent oracles the implementation is checked against.

These deliberately avoid the library's own code paths: plain-Python
summation for the metrics, a projected-gradient method for the elastic
net, exhaustive grid search for the SVR dual, and constants frozen from
a 40-digit mpmath session for the normal distribution.
"""

import math

import numpy as np

# mpmath (mp.dps=40): sqrt(2)*erfinv(2e-7 - 1)
PHI_INV_CLIP_1E7 = -5.1993375821928169
# delta = [-2,-1,-3,-2]: sqrt(4)*mean/std(ddof=1)
DM_EXAMPLE_STAT = -4.8989794855663562
# mpmath ncdf of the statistic above
DM_EXAMPLE_P = 4.816785043e-7
# mpmath ncdf reference points
NCDF_POINTS = {
    0.0: 0.5,
    1.0: 0.841344746068542949,
    -1.0: 0.158655253931457051,
    2.5: 0.993790334674223865,
    1.959964: 0.975000000904,
    -5.1993375821928165: 1.00000000000000232e-7,
    7.0: 0.999999999998720187,
    -7.0: 1.279812543885835e-12,
}


# --- metric oracles (plain loops, fsum) ---------------------------------------


def brute_mae(records) -> float:
    terms = []
    for r in records:
        for y, yhat in zip(r.actuals, r.predictions):
            terms.append(abs(y - yhat))
    return math.fsum(terms) / len(terms)


def brute_rmse(records) -> float:
    terms = []
    for r in records:
        for y, yhat in zip(r.actuals, r.predictions):
            terms.append((y - yhat) ** 2)
    return math.sqrt(math.fsum(terms) / len(terms))


def brute_smape(records) -> float:
    terms = []
    for r in records:
        for y, yhat in zip(r.actuals, r.predictions):
            den = abs(y) + abs(yhat)
            terms.append(abs(y - yhat) / den if den != 0.0 else 0.0)
    return 100.0 * math.fsum(terms) / len(terms)


# --- elastic net oracle ---------------------------------------------------------


def enet_projected_gradient(
    x: np.ndarray,
    y: np.ndarray,
    alpha: float,
    l1_ratio: float,
    iters: int = 200_000,
) -> tuple[np.ndarray, float]:
    """Projected gradient on the split w = u - v, u, v >= 0.

    The L1 term becomes linear on the nonnegative orthant, so plain
    gradient steps followed by projection (clipping at zero) solve the
    same problem the coordinate-descent solver does. Returns (weights,
    intercept) at convergence.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = x.shape
    x_mean = x.mean(axis=0)
    y_mean = y.mean()
    xc = x - x_mean
    yc = y - y_mean

    h_scale = np.linalg.eigvalsh(xc.T @ xc / n).max() + alpha * (1 - l1_ratio)
    step = 1.0 / (2.0 * max(h_scale, 1e-12))
    l1 = alpha * l1_ratio
    l2 = alpha * (1 - l1_ratio)

    u = np.zeros(p)
    v = np.zeros(p)
    for _ in range(iters):
        w = u - v
        smooth = xc.T @ (xc @ w - yc) / n + l2 * w
        u_new = np.clip(u - step * (smooth + l1), 0.0, None)
        v_new = np.clip(v - step * (-smooth + l1), 0.0, None)
        if max(np.abs(u_new - u).max(), np.abs(v_new - v).max()) < 1e-15:
            u, v = u_new, v_new
            break
        u, v = u_new, v_new
    w = u - v
    intercept = y_mean - float(x_mean @ w)
    return w, intercept


# --- SVR oracle ------------------------------------------------------------------


def svr_dual_grid_search(
    kmat: np.ndarray,
    y: np.ndarray,
    c: float,
    eps: float,
    coarse: int = 201,
    refinements: int = 5,
) -> float:
    """Best dual objective over the feasible box for a 3-sample problem.

    beta3 is eliminated via the equality constraint; the remaining
    2-D box is scanned on a dense grid, then re-scanned at finer scales
    around the incumbent.
    """
    assert len(y) == 3

    def scan(lo1, hi1, lo2, hi2):
        b1, b2 = np.meshgrid(
            np.linspace(lo1, hi1, coarse), np.linspace(lo2, hi2, coarse),
            indexing="ij",
        )
        b3 = -b1 - b2
        quad = (
            kmat[0, 0] * b1 * b1 + kmat[1, 1] * b2 * b2 + kmat[2, 2] * b3 * b3
            + 2 * (kmat[0, 1] * b1 * b2 + kmat[0, 2] * b1 * b3
                   + kmat[1, 2] * b2 * b3)
        )
        vals = (
            y[0] * b1 + y[1] * b2 + y[2] * b3
            - 0.5 * quad
            - eps * (np.abs(b1) + np.abs(b2) + np.abs(b3))
        )
        vals[np.abs(b3) > c] = -np.inf
        flat = int(vals.argmax())
        i, j = divmod(flat, coarse)
        return float(vals[i, j]), float(b1[i, j]), float(b2[i, j])

    lo1, hi1, lo2, hi2 = -c, c, -c, c
    best = (-np.inf, 0.0, 0.0)
    for _ in range(refinements):
        cand = scan(lo1, hi1, lo2, hi2)
        if cand[0] > best[0]:
            best = cand
        span1 = (hi1 - lo1) / (coarse - 1) * 2
        span2 = (hi2 - lo2) / (coarse - 1) * 2
        lo1, hi1 = max(-c, best[1] - span1), min(c, best[1] + span1)
        lo2, hi2 = max(-c, best[2] - span2), min(c, best[2] + span2)
    return best[0]

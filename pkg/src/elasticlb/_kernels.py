"""Numba kernels for the banded DPs, envelopes and graph lower bounds.

All kernels take the measure as an integer code (``MeasureKind`` value) and
the parameters as a float64 vector ``[g, c, nu, lam, eps, p, r]``. Series
are 0-based; the DP tables are padded by one row and column.
"""
import numpy as np
from numba import njit

DTW, ERP, MSM, TWED, LCSS, EDR, SWALE = 0, 1, 2, 3, 4, 5, 6
G, C, NU, LAM, EPS, PP, R = 0, 1, 2, 3, 4, 5, 6

INF = np.inf


@njit(cache=True, nogil=True)
def is_padded(kind):
    return kind == ERP or kind == LCSS or kind == EDR or kind == SWALE


@njit(cache=True, nogil=True)
def value_cost(kind, P, a, b):
    """Context-free match cost (TWED without its neighbour terms)."""
    d = a - b
    if kind == DTW or kind == ERP:
        return d * d
    if kind == MSM or kind == TWED:
        return abs(d)
    if kind == SWALE:
        return P[R] if abs(d) <= P[EPS] else P[PP]
    return 0.0 if abs(d) <= P[EPS] else 1.0


@njit(cache=True, nogil=True)
def self_cost(kind, P, x, i):
    """Deletion cost of x[i]; DTW returns inf since its bound weights never need it."""
    if kind == DTW:
        return INF
    if kind == ERP:
        d = x[i] - P[G]
        return d * d
    if kind == MSM:
        return P[C]
    if kind == TWED:
        prev = x[i - 1] if i > 0 else 0.0
        return abs(x[i] - prev) + P[NU] + P[LAM]
    if kind == SWALE:
        return P[PP]
    return 1.0


@njit(cache=True, nogil=True)
def _msm_c(new, a, b, c):
    if (a <= new and new <= b) or (a >= new and new >= b):
        return c
    return c + min(abs(new - a), abs(new - b))


@njit(cache=True, nogil=True)
def _twed_match(P, x, i, q, j):
    # 0-based i, j; timestamps are 1-based positions so |t_i - t_j| = |i - j|
    xp = x[i - 1] if i > 0 else 0.0
    qp = q[j - 1] if j > 0 else 0.0
    return abs(x[i] - q[j]) + abs(xp - qp) + 2.0 * P[NU] * abs(i - j)


@njit(cache=True, nogil=True)
def _gap(kind, P, v):
    # padded-family gap cost for an element of value v
    if kind == ERP:
        d = v - P[G]
        return d * d
    if kind == SWALE:
        return P[PP]
    return 1.0


@njit(cache=True, nogil=True)
def dp_min(kind, P, x, q, w, cut):
    """Banded minimum-cost DP for every measure except LCSS.

    Returns ``(raw, abandoned)``. The DP abandons as soon as the minimum of a
    row exceeds ``cut``; every path crosses every row and costs are non-negative.
    """
    n = x.shape[0]
    m = q.shape[0]
    padded = is_padded(kind)
    prev = np.full(m + 1, INF)
    cur = np.full(m + 1, INF)
    prev[0] = 0.0
    if padded:
        top = min(m, w)
        for j in range(1, top + 1):
            prev[j] = prev[j - 1] + _gap(kind, P, q[j - 1])
    for i in range(1, n + 1):
        jlo = max(0, i - w)
        jhi = min(m, i + w)
        if jlo >= 1:
            cur[jlo - 1] = INF
        xi = x[i - 1]
        rowmin = INF
        for j in range(jlo, jhi + 1):
            if j == 0:
                v = prev[0] + _gap(kind, P, xi) if padded else INF
            else:
                qj = q[j - 1]
                diag = prev[j - 1]
                up = prev[j]
                left = cur[j - 1]
                if kind == DTW:
                    d = xi - qj
                    best = diag
                    if up < best:
                        best = up
                    if left < best:
                        best = left
                    v = best + d * d
                elif kind == MSM:
                    v = diag + abs(xi - qj)
                    if i >= 2 and up < INF:
                        t = up + _msm_c(xi, x[i - 2], qj, P[C])
                        if t < v:
                            v = t
                    if j >= 2 and left < INF:
                        t = left + _msm_c(qj, q[j - 2], xi, P[C])
                        if t < v:
                            v = t
                elif kind == TWED:
                    v = diag + _twed_match(P, x, i - 1, q, j - 1)
                    if i >= 2 and up < INF:
                        t = up + abs(xi - x[i - 2]) + P[NU] + P[LAM]
                        if t < v:
                            v = t
                    if j >= 2 and left < INF:
                        t = left + abs(qj - q[j - 2]) + P[NU] + P[LAM]
                        if t < v:
                            v = t
                else:
                    if kind == ERP:
                        dd = xi - qj
                        mc = dd * dd
                    elif kind == EDR:
                        mc = 0.0 if abs(xi - qj) <= P[EPS] else 1.0
                    else:
                        mc = P[R] if abs(xi - qj) <= P[EPS] else P[PP]
                    v = diag + mc
                    t = up + _gap(kind, P, xi)
                    if t < v:
                        v = t
                    t = left + _gap(kind, P, qj)
                    if t < v:
                        v = t
            cur[j] = v
            if v < rowmin:
                rowmin = v
        if jhi + 1 <= m:
            cur[jhi + 1] = INF
        if rowmin > cut:
            return INF, True
        tmp = prev
        prev = cur
        cur = tmp
    return prev[m], False


@njit(cache=True, nogil=True)
def dp_lcss(P, x, q, w, need):
    """Banded LCSS similarity. Abandons once the similarity cannot reach ``need``."""
    n = x.shape[0]
    m = q.shape[0]
    NEG = -INF
    prev = np.full(m + 1, NEG)
    cur = np.full(m + 1, NEG)
    for j in range(0, min(m, w) + 1):
        prev[j] = 0.0
    eps = P[EPS]
    for i in range(1, n + 1):
        jlo = max(0, i - w)
        jhi = min(m, i + w)
        if jlo >= 1:
            cur[jlo - 1] = NEG
        xi = x[i - 1]
        rowmax = NEG
        for j in range(jlo, jhi + 1):
            if j == 0:
                v = 0.0
            else:
                v = prev[j - 1]
                if abs(xi - q[j - 1]) <= eps:
                    v += 1.0
                if prev[j] > v:
                    v = prev[j]
                if cur[j - 1] > v:
                    v = cur[j - 1]
            cur[j] = v
            if v > rowmax:
                rowmax = v
        if jhi + 1 <= m:
            cur[jhi + 1] = NEG
        if rowmax + (n - i) < need:
            return NEG, True
        tmp = prev
        prev = cur
        cur = tmp
    return prev[m], False


@njit(cache=True, nogil=True)
def envelope(values, w, out_len, upper, lower):
    """Windowed max/min of ``values`` at positions 0..out_len-1.

    The window of position p is [p - w, p + w] clipped to the valid index
    range; two monotone deques give O(len) time.
    """
    L = values.shape[0]
    dq_max = np.empty(L, dtype=np.int64)
    dq_min = np.empty(L, dtype=np.int64)
    hmx = 0
    tmx = 0
    hmn = 0
    tmn = 0
    nxt = 0
    for p in range(out_len):
        hi = p + w
        if hi > L - 1:
            hi = L - 1
        while nxt <= hi:
            v = values[nxt]
            while tmx > hmx and values[dq_max[tmx - 1]] <= v:
                tmx -= 1
            dq_max[tmx] = nxt
            tmx += 1
            while tmn > hmn and values[dq_min[tmn - 1]] >= v:
                tmn -= 1
            dq_min[tmn] = nxt
            tmn += 1
            nxt += 1
        lo = p - w
        while hmx < tmx and dq_max[hmx] < lo:
            hmx += 1
        while hmn < tmn and dq_min[hmn] < lo:
            hmn += 1
        if hmx < tmx:
            upper[p] = values[dq_max[hmx]]
            lower[p] = values[dq_min[hmn]]
        else:
            # window beyond the series; cannot happen when w >= |n - m|
            upper[p] = values[L - 1]
            lower[p] = values[L - 1]


@njit(cache=True, nogil=True)
def window_max(values, w, out_len, out):
    """Windowed maximum only; used for the base-weight upper envelope."""
    L = values.shape[0]
    dq = np.empty(L, dtype=np.int64)
    h = 0
    t = 0
    nxt = 0
    for p in range(out_len):
        hi = p + w
        if hi > L - 1:
            hi = L - 1
        while nxt <= hi:
            v = values[nxt]
            while t > h and values[dq[t - 1]] <= v:
                t -= 1
            dq[t] = nxt
            t += 1
            nxt += 1
        lo = p - w
        while h < t and dq[h] < lo:
            h += 1
        out[p] = values[dq[h]] if h < t else 0.0


@njit(cache=True, nogil=True)
def boundary(kind, P, x, q, w):
    """Lower bound on the cost of the first and last DP steps.

    Corner-anchored measures pay the forced first cell plus the cheapest
    feasible move into the last cell. Padded measures pay the cheapest first
    move out of the origin plus the cheapest move into the last cell; with
    more than one element in total these are distinct steps.
    """
    n = x.shape[0]
    m = q.shape[0]
    if not is_padded(kind):
        d0 = x[0] - q[0]
        init = d0 * d0 if kind == DTW else abs(d0)
        if n == 1 and m == 1:
            return init
        if kind == DTW:
            d = x[n - 1] - q[m - 1]
            return init + d * d
        last = INF
        if kind == MSM:
            if n >= 2 and m >= 2:
                last = abs(x[n - 1] - q[m - 1])
            if n >= 2:
                last = min(last, _msm_c(x[n - 1], x[n - 2], q[m - 1], P[C]))
            if m >= 2:
                last = min(last, _msm_c(q[m - 1], q[m - 2], x[n - 1], P[C]))
        else:
            if n >= 2 and m >= 2:
                last = _twed_match(P, x, n - 1, q, m - 1)
            if n >= 2:
                last = min(last, abs(x[n - 1] - x[n - 2]) + P[NU] + P[LAM])
            if m >= 2:
                last = min(last, abs(q[m - 1] - q[m - 2]) + P[NU] + P[LAM])
        return init + last
    first_m = value_cost(kind, P, x[0], q[0])
    dx1 = self_cost(kind, P, x, 0)
    dq1 = self_cost(kind, P, q, 0)
    if n == 1 and m == 1:
        if w >= 1:
            return min(first_m, dx1 + dq1)
        return first_m
    first = first_m
    if w >= 1:
        first = min(first, dx1, dq1)
    last = value_cost(kind, P, x[n - 1], q[m - 1])
    if abs(n - 1 - m) <= w:
        last = min(last, self_cost(kind, P, x, n - 1))
    if abs(n - m + 1) <= w:
        last = min(last, self_cost(kind, P, q, m - 1))
    return first + last


@njit(cache=True, nogil=True)
def _delta(kind, P, x, i, up, lo):
    v = x[i]
    if v > up:
        b = up
    elif v < lo:
        b = lo
    else:
        return 0.0
    mc = value_cost(kind, P, v, b)
    dc = self_cost(kind, P, x, i)
    return mc if mc < dc else dc


@njit(cache=True, nogil=True)
def _gamma(kind, P, x, i, up, lo, umax):
    v = x[i]
    if v > up:
        b = up
    elif v < lo:
        b = lo
    else:
        return 0.0
    mc = value_cost(kind, P, v, b) - umax
    if mc < 0.0:
        mc = 0.0
    dc = self_cost(kind, P, x, i)
    return mc if mc < dc else dc


@njit(cache=True, nogil=True)
def graph_bound(kind, P, x, q, w, uq, lq, ux, lx, bdy, cut, interior, with_aug,
                du1, dv1, dv2, du2, out):
    """GLB (``with_aug=False``) or BGLB (``with_aug=True``) in the raw domain.

    ``uq, lq`` is the envelope of q at positions 0..n-1 and ``ux, lx`` the
    envelope of x at positions 0..m-1. Direction 1 puts base weights on x
    (``du1``) and augmented weights on q (``dv1``); direction 2 swaps roles
    (``dv2`` base on q, ``du2`` augmented on x). ``out`` receives
    ``[base1, aug1, base2, aug2]``. Returns ``(raw, stopped)``; a stopped
    evaluation has proved ``raw > cut``.
    """
    n = x.shape[0]
    m = q.shape[0]
    i0 = 1 if interior else 0
    i1 = n - 1 if interior else n
    j0 = 1 if interior else 0
    j1 = m - 1 if interior else m
    base1 = 0.0
    aug1 = 0.0
    base2 = 0.0
    aug2 = 0.0
    for k in range(4):
        out[k] = 0.0
    if bdy > cut:
        return INF, True
    for i in range(i0, i1):
        d = _delta(kind, P, x, i, uq[i], lq[i])
        du1[i] = d
        base1 += d
        if bdy + base1 > cut:
            out[0] = base1
            return INF, True
    out[0] = base1
    if not with_aug:
        for j in range(j0, j1):
            d = _delta(kind, P, q, j, ux[j], lx[j])
            dv2[j] = d
            base2 += d
            if bdy + base2 > cut:
                out[2] = base2
                return INF, True
        out[2] = base2
        return bdy + max(base1, base2), False
    umax1 = np.empty(m)
    window_max(du1, w, m, umax1)
    for j in range(j0, j1):
        d = _delta(kind, P, q, j, ux[j], lx[j])
        g = _gamma(kind, P, q, j, ux[j], lx[j], umax1[j])
        dv2[j] = d
        dv1[j] = g
        base2 += d
        aug1 += g
        if bdy + base1 + aug1 > cut or bdy + base2 > cut:
            out[1] = aug1
            out[2] = base2
            return INF, True
    out[1] = aug1
    out[2] = base2
    umax2 = np.empty(n)
    window_max(dv2, w, n, umax2)
    for i in range(i0, i1):
        g = _gamma(kind, P, x, i, uq[i], lq[i], umax2[i])
        du2[i] = g
        aug2 += g
        if bdy + base2 + aug2 > cut:
            out[3] = aug2
            return INF, True
    out[3] = aug2
    return bdy + max(base1 + aug1, base2 + aug2), False


@njit(cache=True, nogil=True)
def transport(supply, demand, w, i0, i1, j0, j1, rem, need_left):
    """Maximum mass shipped from supplies ``[i0, i1)`` to demands ``[j0, j1)``.

    Supply i may serve demand j iff ``|i - j| <= w``. Demands are served left
    to right from the earliest still-usable supply; each supply reaches an
    interval of demands whose endpoints grow with i, so this greedy is
    optimal. ``rem`` and ``need_left`` receive the unshipped supply and the
    unserved demand.
    """
    for i in range(rem.shape[0]):
        rem[i] = supply[i] if i0 <= i and i < i1 else 0.0
    for j in range(need_left.shape[0]):
        need_left[j] = 0.0
    total = 0.0
    p = i0
    for j in range(j0, j1):
        need = demand[j]
        while p < i1 and (p < j - w or rem[p] <= 0.0):
            p += 1
        k = p
        while need > 0.0 and k < i1 and k <= j + w:
            if rem[k] > 0.0:
                t = rem[k] if rem[k] < need else need
                rem[k] -= t
                need -= t
                total += t
            k += 1
        need_left[j] = need
    return total


@njit(cache=True, nogil=True)
def dual_bound(kind, P, x, q, w, uq, lq, ux, lx, bdy, cut, interior, du, dv, out):
    """Bound from base weights on both sides with the shared mass cancelled.

    A diagonal step (i, j) costs at least max(du[i], dv[j]) while the two
    base sums count it as du[i] + dv[j]; subtracting the largest amount that
    can be cancelled along window-feasible pairs keeps the sum valid.
    ``out`` receives ``[base1, resid_q, base2, resid_x]``.
    """
    n = x.shape[0]
    m = q.shape[0]
    i0 = 1 if interior else 0
    i1 = n - 1 if interior else n
    j0 = 1 if interior else 0
    j1 = m - 1 if interior else m
    for k in range(4):
        out[k] = 0.0
    if bdy > cut:
        return INF, True
    base1 = 0.0
    for i in range(i0, i1):
        d = _delta(kind, P, x, i, uq[i], lq[i])
        du[i] = d
        base1 += d
        if bdy + base1 > cut:
            out[0] = base1
            return INF, True
    base2 = 0.0
    for j in range(j0, j1):
        d = _delta(kind, P, q, j, ux[j], lx[j])
        dv[j] = d
        base2 += d
        if bdy + base2 > cut:
            out[0] = base1
            out[2] = base2
            return INF, True
    out[0] = base1
    out[2] = base2
    rem = np.empty(n)
    need_left = np.empty(m)
    transport(du, dv, w, i0, i1, j0, j1, rem, need_left)
    # sum residuals term by term so each side stays >= its own base sum
    resid_q = 0.0
    for j in range(j0, j1):
        resid_q += need_left[j]
    resid_x = 0.0
    for i in range(i0, i1):
        resid_x += rem[i]
    out[1] = resid_q
    out[3] = resid_x
    return bdy + max(base1 + resid_q, base2 + resid_x), False

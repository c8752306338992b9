"""Compiled kernels for slice-rank-1 2D LWS.

Each axis carries arrays P, Q with n+1 columns (column 0 unused), row
strides ps, qs in {0, 1} and a mode.  A stride of 0 means the array has a
single row shared by every group.  For a target in group ``o`` at moving
coordinate ``j`` with predecessor ``p`` the weight is

    mode 0:  P[o*ps, p] * Q[o*qs, j]   (slope P[o*ps, p] queried at Q[o*qs, j])
    mode 1:  P[j, p] * Q[o*qs, j]      (no line structure, scanned directly)

Tables are stored group-major per axis: ``G1[o, p] = T[p, o]`` for axis 1
and ``G2[o, p] = T[o, p]`` for axis 2.  Infinity is ``INF``; any value at
or above ``HALF`` is treated as infinite.  Callers guarantee headroom.
"""
import numba
import numpy as np

INF = np.int64(2**62)
HALF = np.int64(2**61)
DIRECT = 12


@numba.njit(cache=True)
def _hull_group(row, sl, trow, xrow, win, hs, hc, direct):
    """min into ``trow`` of the lines (sl, row) at points ``xrow``, via a hull."""
    L = row.shape[0]
    nq = trow.shape[0]
    xmin = xrow[0]
    xmax = xrow[0]
    for q in range(nq):
        xmin = min(xmin, xrow[q])
        xmax = max(xmax, xrow[q])
    v1 = INF
    v2 = INF
    for q in range(L):
        v1 = min(v1, row[q] + sl[q] * xmin)
        v2 = min(v2, row[q] + sl[q] * xmax)
    if v1 >= HALF:
        return
    # lines optimal at the two query extremes, flattest toward the inside
    s1 = INF
    s2 = -INF
    for q in range(L):
        s = sl[q]
        s1 = min(s1, s if row[q] + s * xmin == v1 else INF)
        s2 = max(s2, s if row[q] + s * xmax == v2 else -INF)
    c1 = v1 - s1 * xmin
    c2 = v2 - s2 * xmax
    if s1 <= s2:
        for q in range(nq):
            trow[q] = min(trow[q], c1 + s1 * xrow[q])
        return
    # keep lines that dip below the chord through both extreme lines
    p = c2 - c1
    d = s1 - s2
    h = 0
    for q in range(L):
        if row[q] < HALF and (row[q] - c1) * d <= (s1 - sl[q]) * p:
            win[h] = q
            h += 1
    if h <= direct:
        for u in range(h):
            s = sl[win[u]]
            c = row[win[u]]
            for q in range(nq):
                trow[q] = min(trow[q], c + s * xrow[q])
        return
    # TODO: switch to np.argsort once survivor counts grow past a few dozen
    for u in range(1, h):
        q = win[u]
        s = sl[q]
        c = row[q]
        v = u
        while v > 0 and (sl[win[v - 1]] < s or (sl[win[v - 1]] == s and row[win[v - 1]] > c)):
            win[v] = win[v - 1]
            v -= 1
        win[v] = q
    m = 0
    for u in range(h):
        q = win[u]
        s = sl[q]
        c = row[q]
        if m > 0 and hs[m - 1] == s:
            continue
        while m >= 2:
            sa = hs[m - 2]
            ca = hc[m - 2]
            sb = hs[m - 1]
            cb = hc[m - 1]
            if (c - ca) * (sa - sb) <= (cb - ca) * (sa - s):
                m -= 1
            else:
                break
        hs[m] = s
        hc[m] = c
        m += 1
    if m <= 8:
        for u in range(m):
            s = hs[u]
            c = hc[u]
            for q in range(nq):
                trow[q] = min(trow[q], c + s * xrow[q])
        return
    for q in range(nq):
        x = xrow[q]
        lo = 0
        step = m
        while step > 1:
            half = step >> 1
            mm = lo + half - 1
            lo = lo + half if hc[mm] + hs[mm] * x > hc[mm + 1] + hs[mm + 1] * x else lo
            step -= half
        trow[q] = min(trow[q], hc[lo] + hs[lo] * x)


@numba.njit(cache=True)
def _hull_axis(G, t, alpha, mid, beta, n, P, ps, Q, qs, win, hs, hc, direct):
    for o in range(1, n + 1):
        k0 = max(1, alpha - o)
        k1 = min(n, mid - 1 - o)
        i0 = max(1, mid - o)
        i1 = min(n, beta - 1 - o)
        if k0 > k1 or i0 > i1:
            continue
        _hull_group(G[o, k0:k1 + 1], P[o * ps, k0:k1 + 1], t[o, i0:i1 + 1], Q[o * qs, i0:i1 + 1],
                    win, hs, hc, direct)


@numba.njit(cache=True)
def _scan_axis(G, t, alpha, mid, beta, n, P, Q, qs):
    for o in range(1, n + 1):
        k0 = max(1, alpha - o)
        k1 = min(n, mid - 1 - o)
        i0 = max(1, mid - o)
        i1 = min(n, beta - 1 - o)
        if k0 > k1 or i0 > i1:
            continue
        row = G[o, k0:k1 + 1]
        for j in range(i0, i1 + 1):
            x = Q[o * qs, j]
            prow = P[j, k0:k1 + 1]
            best = t[o, j]
            for q in range(row.shape[0]):
                best = min(best, row[q] + prow[q] * x)
            t[o, j] = best


@numba.njit(cache=True)
def static_stage(G1, G2, t1, t2, alpha, mid, beta, n, P1, p1, Q1, q1, m1, P2, p2, Q2, q2, m2, win, hs, hc, direct):
    if m1 == 0:
        _hull_axis(G1, t1, alpha, mid, beta, n, P1, p1, Q1, q1, win, hs, hc, direct)
    else:
        _scan_axis(G1, t1, alpha, mid, beta, n, P1, Q1, q1)
    if m2 == 0:
        _hull_axis(G2, t2, alpha, mid, beta, n, P2, p2, Q2, q2, win, hs, hc, direct)
    else:
        _scan_axis(G2, t2, alpha, mid, beta, n, P2, Q2, q2)


@numba.njit(cache=True)
def leaf(G1, G2, t1, t2, alpha, beta, n, P1, p1, Q1, q1, m1, P2, p2, Q2, q2, m2):
    for i in range(max(1, alpha - n), min(n, beta - 2) + 1):
        row = G2[i]
        for j in range(max(1, alpha - i), min(n, beta - 1 - i) + 1):
            best = min(t1[j, i], t2[i, j])
            # axis 1: group j, moving coordinate i
            k0 = max(1, alpha - j)
            col = G1[j, k0:i]
            pr = P1[j * p1, k0:i] if m1 == 0 else P1[i, k0:i]
            x = Q1[j * q1, i]
            for q in range(col.shape[0]):
                best = min(best, col[q] + pr[q] * x)
            # axis 2: group i, moving coordinate j
            k0 = max(1, alpha - i)
            rr = row[k0:j]
            pr = P2[i * p2, k0:j] if m2 == 0 else P2[j, k0:j]
            x = Q2[i * q2, j]
            for q in range(rr.shape[0]):
                best = min(best, rr[q] + pr[q] * x)
            if best >= HALF:
                best = INF
            row[j] = best
            G1[j, i] = best


@numba.njit(cache=True)
def naive_2d(n, P1, p1, Q1, q1, m1, P2, p2, Q2, q2, m2):
    """Plain cubic evaluation of the same recurrence, for timing baselines."""
    G2 = np.full((n + 1, n + 1), INF, dtype=np.int64)
    G1 = np.full((n + 1, n + 1), INF, dtype=np.int64)
    G2[1, 1] = 0
    G1[1, 1] = 0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == 1 and j == 1:
                continue
            best = INF
            col = G1[j]
            x = Q1[j * q1, i]
            pr = P1[j * p1] if m1 == 0 else P1[i]
            for q in range(1, i):
                best = min(best, col[q] + pr[q] * x)
            row = G2[i]
            x = Q2[i * q2, j]
            pr = P2[i * p2] if m2 == 0 else P2[j]
            for q in range(1, j):
                best = min(best, row[q] + pr[q] * x)
            if best >= HALF:
                best = INF
            G2[i, j] = best
            G1[j, i] = best
    return G2


@numba.njit(cache=True)
def padded_transpose(B):
    """``B.T`` behind a zero row and column, copied in cache-sized blocks."""
    r, c = B.shape
    out = np.zeros((c + 1, r + 1), dtype=np.int64)
    for i0 in range(0, r, 32):
        for j0 in range(0, c, 32):
            for i in range(i0, min(r, i0 + 32)):
                for j in range(j0, min(c, j0 + 32)):
                    out[j + 1, i + 1] = B[i, j]
    return out


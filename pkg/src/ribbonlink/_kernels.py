"""Compiled inner loops: segment distances and projected segment crossings."""

import numpy as np
from numba import njit


@njit(cache=True)
def _seg_seg_dist2(p0, p1, q0, q1):
    # closest points between segments [p0,p1] and [q0,q1] (clamped parameters)
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]
    e = d2[0] * d2[0] + d2[1] * d2[1] + d2[2] * d2[2]
    f = d2[0] * r[0] + d2[1] * r[1] + d2[2] * r[2]
    c = d1[0] * r[0] + d1[1] * r[1] + d1[2] * r[2]
    b = d1[0] * d2[0] + d1[1] * d2[1] + d1[2] * d2[2]
    denom = a * e - b * b
    if denom > 1e-300:
        s = (b * f - c * e) / denom
        s = min(max(s, 0.0), 1.0)
    else:
        s = 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = min(max(-c / a, 0.0), 1.0)
    elif t > 1.0:
        t = 1.0
        s = min(max((b - c) / a, 0.0), 1.0)
    dx = p0[0] + d1[0] * s - q0[0] - d2[0] * t
    dy = p0[1] + d1[1] * s - q0[1] - d2[1] * t
    dz = p0[2] + d1[2] * s - q0[2] - d2[2] * t
    return dx * dx + dy * dy + dz * dz


@njit(cache=True)
def min_nonadjacent_distance(pts):
    """Smallest distance between two non-adjacent segments of a closed polyline."""
    n = pts.shape[0]
    best = np.inf
    for i in range(n):
        p0 = pts[i]
        p1 = pts[(i + 1) % n]
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            d = _seg_seg_dist2(p0, p1, pts[j], pts[(j + 1) % n])
            if d < best:
                best = d
    return np.sqrt(best)


@njit(cache=True)
def min_curve_distance(pa, pb):
    """Smallest distance between any segment of closed polyline ``pa`` and any of ``pb``."""
    n = pa.shape[0]
    m = pb.shape[0]
    best = np.inf
    for i in range(n):
        p0 = pa[i]
        p1 = pa[(i + 1) % n]
        for j in range(m):
            d = _seg_seg_dist2(p0, p1, pb[j], pb[(j + 1) % m])
            if d < best:
                best = d
    return np.sqrt(best)


@njit(cache=True)
def _side(d, tol):
    if d > tol:
        return 1
    if d < -tol:
        return -1
    return 0


@njit(cache=True)
def segment_crossings(P, Pz, Q, Qz, same, tol):
    """Transversal crossings between closed projected polylines P and Q.

    P, Q are (n, 2) projected vertex arrays; Pz, Qz the depths along the view
    direction. With ``same`` the curve is tested against itself (each unordered
    non-adjacent pair once). Returns (degenerate, i, j, tp, tq, sign); on the
    first degenerate configuration the scan stops with ``degenerate`` True.
    Sign is +1 when (over tangent x under tangent) points toward the viewer.
    """
    n = P.shape[0]
    m = Q.shape[0]
    qxmin = np.empty(m)
    qxmax = np.empty(m)
    qymin = np.empty(m)
    qymax = np.empty(m)
    maxw = 0.0
    for j in range(m):
        j1 = (j + 1) % m
        qxmin[j] = min(Q[j, 0], Q[j1, 0])
        qxmax[j] = max(Q[j, 0], Q[j1, 0])
        qymin[j] = min(Q[j, 1], Q[j1, 1])
        qymax[j] = max(Q[j, 1], Q[j1, 1])
        w = qxmax[j] - qxmin[j]
        if w > maxw:
            maxw = w
    order = np.argsort(qxmin)
    sorted_xmin = qxmin[order]

    out_i = []
    out_j = []
    out_tp = []
    out_tq = []
    out_s = []
    for i in range(n):
        i1 = (i + 1) % n
        p0x = P[i, 0]
        p0y = P[i, 1]
        dpx = P[i1, 0] - p0x
        dpy = P[i1, 1] - p0y
        lp = np.sqrt(dpx * dpx + dpy * dpy)
        if lp < tol:
            return True, out_i, out_j, out_tp, out_tq, out_s
        xmin = min(p0x, P[i1, 0])
        xmax = max(p0x, P[i1, 0])
        ymin = min(p0y, P[i1, 1])
        ymax = max(p0y, P[i1, 1])
        k = np.searchsorted(sorted_xmin, xmin - maxw - tol)
        while k < m and sorted_xmin[k] <= xmax + tol:
            j = order[k]
            k += 1
            if same:
                if j <= i + 1:
                    continue
                if i == 0 and j == n - 1:
                    continue
            if qxmax[j] < xmin - tol or qymax[j] < ymin - tol or qymin[j] > ymax + tol:
                continue
            j1 = (j + 1) % m
            q0x = Q[j, 0]
            q0y = Q[j, 1]
            dqx = Q[j1, 0] - q0x
            dqy = Q[j1, 1] - q0y
            lq = np.sqrt(dqx * dqx + dqy * dqy)
            if lq < tol:
                return True, out_i, out_j, out_tp, out_tq, out_s
            # signed distances of each endpoint from the other segment's line
            d1 = (dqx * (p0y - q0y) - dqy * (p0x - q0x)) / lq
            d2 = (dqx * (P[i1, 1] - q0y) - dqy * (P[i1, 0] - q0x)) / lq
            d3 = (dpx * (q0y - p0y) - dpy * (q0x - p0x)) / lp
            d4 = (dpx * (Q[j1, 1] - p0y) - dpy * (Q[j1, 0] - p0x)) / lp
            s1 = _side(d1, tol)
            s2 = _side(d2, tol)
            s3 = _side(d3, tol)
            s4 = _side(d4, tol)
            if s1 * s2 > 0 or s3 * s4 > 0:
                continue
            if s1 == 0 or s2 == 0 or s3 == 0 or s4 == 0:
                return True, out_i, out_j, out_tp, out_tq, out_s
            tp = d1 / (d1 - d2)
            tq = d3 / (d3 - d4)
            zp = Pz[i] + tp * (Pz[i1] - Pz[i])
            zq = Qz[j] + tq * (Qz[j1] - Qz[j])
            if abs(zp - zq) < tol:
                return True, out_i, out_j, out_tp, out_tq, out_s
            c = dpx * dqy - dpy * dqx
            sg = 1 if c > 0 else -1
            if zp < zq:
                sg = -sg
            out_i.append(i)
            out_j.append(j)
            out_tp.append(tp)
            out_tq.append(tq)
            out_s.append(sg)
    return False, out_i, out_j, out_tp, out_tq, out_s

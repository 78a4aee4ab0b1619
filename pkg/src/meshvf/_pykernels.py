"""Pure numpy fallback for the compiled geometry kernels.

Same API and semantics as ``_ckernels``: Eberly-style point-triangle closest
point with barycentric region classification, and an iterative sphere query
over the packed tree arrays. Used when the extension is unavailable or when
``MESHVF_BACKEND=python`` forces it (the benchmark compares the two).
"""

import numpy as np

EPS_BARY = 1e-9

REGION_IN = 0
REGION_EDGE = 1
REGION_VERTEX = 2

# barycentric index -> local edge opposite that vertex
_OPP_EDGE = np.array([1, 2, 0], dtype=np.int32)


def _solve_st(q, tv):
    """Vectorized closest-point parameters (s, t) with p = a + s*E0 + t*E1."""
    a = tv[:, 0]
    b = tv[:, 1]
    c = tv[:, 2]
    e0 = b - a
    e1 = c - a
    d = a - q
    a00 = np.einsum("ij,ij->i", e0, e0)
    a01 = np.einsum("ij,ij->i", e0, e1)
    a11 = np.einsum("ij,ij->i", e1, e1)
    b0 = np.einsum("ij,ij->i", e0, d)
    b1 = np.einsum("ij,ij->i", e1, d)
    det = a00 * a11 - a01 * a01

    s = a01 * b1 - a11 * b0
    t = a01 * b0 - a00 * b1
    s_out = np.zeros_like(s)
    t_out = np.zeros_like(t)

    with np.errstate(divide="ignore", invalid="ignore"):
        inv_a00 = np.where(a00 > 0, -b0 / a00, 0.0)
        inv_a11 = np.where(a11 > 0, -b1 / a11, 0.0)
        edge0 = np.clip(inv_a00, 0.0, 1.0)  # foot on edge a->b
        edge2 = np.clip(inv_a11, 0.0, 1.0)  # foot on edge a->c
        denom = a00 - 2.0 * a01 + a11

        inside = s + t <= det
        r4 = inside & (s < 0) & (t < 0)
        r3 = inside & (s < 0) & (t >= 0)
        r5 = inside & (s >= 0) & (t < 0)
        r0 = inside & (s >= 0) & (t >= 0)
        r2 = ~inside & (s < 0)
        r6 = ~inside & (s >= 0) & (t < 0)
        r1 = ~inside & (s >= 0) & (t >= 0)

        # region 4: nearest of the two edges meeting at vertex a
        m = r4 & (b0 < 0)
        s_out[m] = edge0[m]
        t_out[m] = 0.0
        m = r4 & (b0 >= 0)
        s_out[m] = 0.0
        t_out[m] = edge2[m]

        s_out[r3] = 0.0
        t_out[r3] = edge2[r3]

        s_out[r5] = edge0[r5]
        t_out[r5] = 0.0

        safe_det = np.where(det > 0, det, 1.0)
        s_out[r0] = (s / safe_det)[r0]
        t_out[r0] = (t / safe_det)[r0]

        tmp0 = a01 + b0
        tmp1 = a11 + b1
        m = r2 & (tmp1 > tmp0)
        sv = np.clip((tmp1 - tmp0) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
        s_out[m] = sv[m]
        t_out[m] = 1.0 - sv[m]
        m = r2 & (tmp1 <= tmp0)
        s_out[m] = 0.0
        t_out[m] = edge2[m]

        tmp0 = a01 + b1
        tmp1 = a00 + b0
        m = r6 & (tmp1 > tmp0)
        tvv = np.clip((tmp1 - tmp0) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
        t_out[m] = tvv[m]
        s_out[m] = 1.0 - tvv[m]
        m = r6 & (tmp1 <= tmp0)
        t_out[m] = 0.0
        s_out[m] = edge0[m]

        numer = (a11 + b1) - (a01 + b0)
        sv = np.where(numer <= 0, 0.0,
                      np.clip(numer / np.where(denom > 0, denom, 1.0), 0.0, 1.0))
        s_out[r1] = sv[r1]
        t_out[r1] = 1.0 - sv[r1]

    # Slivers with det ~ 0: best of the three edge projections.
    degen = det <= 0.0
    if np.any(degen):
        idx = np.nonzero(degen)[0]
        for i in idx:
            s_out[i], t_out[i] = _degenerate_st(q, tv[i])
    return e0, e1, s_out, t_out


def _degenerate_st(q, tri):
    best = np.inf
    st = (0.0, 0.0)
    params = [((0.0, 0.0), (1.0, 0.0)), ((1.0, 0.0), (0.0, 1.0)), ((0.0, 1.0), (0.0, 0.0))]
    for k in range(3):
        p0 = tri[k]
        p1 = tri[(k + 1) % 3]
        dv = p1 - p0
        d2 = float(dv @ dv)
        u = float(np.clip((q - p0) @ dv / d2, 0.0, 1.0)) if d2 > 0 else 0.0
        pt = p0 + u * dv
        dd = float((q - pt) @ (q - pt))
        if dd < best:
            best = dd
            (s0, t0), (s1, t1) = params[k]
            st = (s0 + u * (s1 - s0), t0 + u * (t1 - t0))
    return st


def _classify(s, t):
    bary = np.stack([1.0 - s - t, s, t], axis=1)
    small = bary <= EPS_BARY
    n_small = small.sum(axis=1)
    regions = np.empty(len(s), dtype=np.int32)
    features = np.empty(len(s), dtype=np.int32)
    regions[n_small == 0] = REGION_IN
    features[n_small == 0] = -1
    m = n_small == 1
    if np.any(m):
        regions[m] = REGION_EDGE
        features[m] = _OPP_EDGE[np.argmax(small[m], axis=1)]
    m = n_small >= 2
    if np.any(m):
        regions[m] = REGION_VERTEX
        features[m] = np.argmax(~small[m], axis=1)
    return regions, features


def closest_point_batch(q, tv):
    """Closest points from q (3,) to each triangle in tv (k,3,3)."""
    q = np.asarray(q, dtype=np.float64)
    tv = np.asarray(tv, dtype=np.float64)
    if tv.shape[0] == 0:
        return (np.empty((0, 3)), np.empty(0, np.int32),
                np.empty(0, np.int32), np.empty(0))
    e0, e1, s, t = _solve_st(q, tv)
    pts = tv[:, 0] + s[:, None] * e0 + t[:, None] * e1
    dists = np.linalg.norm(q - pts, axis=1)
    regions, features = _classify(s, t)
    return pts, regions, features, dists


def closest_point_tri(q, v0, v1, v2):
    """Return (point, region, feature, distance) for one query/triangle pair."""
    tv = np.stack([v0, v1, v2])[None, :, :].astype(np.float64)
    pts, regions, features, dists = closest_point_batch(np.asarray(q, np.float64), tv)
    return pts[0], int(regions[0]), int(features[0]), float(dists[0])


def sphere_query(rot, lo, hi, left, right, start, count, tv, order,
                 cx, cy, cz, radius):
    """All triangles whose closest point to (cx,cy,cz) is within radius."""
    center = np.array([cx, cy, cz])
    ids_parts = []
    pts_parts = []
    regs_parts = []
    feats_parts = []
    dists_parts = []
    stack = [0]
    while stack:
        node = stack.pop()
        cl = rot[node] @ center
        d = np.maximum(np.maximum(lo[node] - cl, cl - hi[node]), 0.0)
        if d @ d > radius * radius:
            continue
        if left[node] < 0:
            s0 = start[node]
            s1 = s0 + count[node]
            pts, regs, feats, dists = closest_point_batch(center, tv[s0:s1])
            keep = dists <= radius
            if np.any(keep):
                ids_parts.append(order[s0:s1][keep])
                pts_parts.append(pts[keep])
                regs_parts.append(regs[keep])
                feats_parts.append(feats[keep])
                dists_parts.append(dists[keep])
        else:
            stack.append(left[node])
            stack.append(right[node])
    if not ids_parts:
        return (np.empty(0, np.int32), np.empty((0, 3)), np.empty(0, np.int32),
                np.empty(0, np.int32), np.empty(0))
    return (np.concatenate(ids_parts), np.concatenate(pts_parts),
            np.concatenate(regs_parts), np.concatenate(feats_parts),
            np.concatenate(dists_parts))

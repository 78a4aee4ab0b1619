# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled geometry kernels: point-triangle closest point and tree sphere query.

Mirrors the API of ``_pykernels``; selected at import time by ``kernels``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdlib cimport free, malloc, realloc

cnp.import_array()

cdef double EPS_BARY = 1e-9

REGION_IN = 0
REGION_EDGE = 1
REGION_VERTEX = 2


cdef inline double _clamp01(double v) nogil:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


cdef void _cp_tri(const double* q, const double* a, const double* b, const double* c,
                  double* p, int* region, int* feature, double* dist) nogil:
    """Closest point on triangle (a,b,c) to q, with barycentric region tag.

    Region: 0 interior, 1 edge, 2 vertex. Feature: local edge index
    (edge k runs v[k] -> v[(k+1)%3]) or local vertex index; -1 for interior.
    """
    cdef double e0x = b[0] - a[0], e0y = b[1] - a[1], e0z = b[2] - a[2]
    cdef double e1x = c[0] - a[0], e1y = c[1] - a[1], e1z = c[2] - a[2]
    cdef double dx = a[0] - q[0], dy = a[1] - q[1], dz = a[2] - q[2]
    cdef double a00 = e0x * e0x + e0y * e0y + e0z * e0z
    cdef double a01 = e0x * e1x + e0y * e1y + e0z * e1z
    cdef double a11 = e1x * e1x + e1y * e1y + e1z * e1z
    cdef double b0 = e0x * dx + e0y * dy + e0z * dz
    cdef double b1 = e1x * dx + e1y * dy + e1z * dz
    cdef double det = a00 * a11 - a01 * a01
    cdef double s = a01 * b1 - a11 * b0
    cdef double t = a01 * b0 - a00 * b1
    cdef double tmp0, tmp1, numer, denom
    cdef double bary0, bary1, bary2
    cdef int n_small

    if det <= 0.0:
        # Degenerate sliver; fall back to the best edge projection.
        _cp_degenerate(q, a, b, c, &s, &t)
    elif s + t <= det:
        if s < 0.0:
            if t < 0.0:  # region 4
                if b0 < 0.0:
                    t = 0.0
                    s = _clamp01(-b0 / a00)
                else:
                    s = 0.0
                    t = _clamp01(-b1 / a11)
            else:  # region 3
                s = 0.0
                t = _clamp01(-b1 / a11)
        elif t < 0.0:  # region 5
            t = 0.0
            s = _clamp01(-b0 / a00)
        else:  # region 0
            s /= det
            t /= det
    else:
        if s < 0.0:  # region 2
            tmp0 = a01 + b0
            tmp1 = a11 + b1
            if tmp1 > tmp0:
                numer = tmp1 - tmp0
                denom = a00 - 2.0 * a01 + a11
                s = _clamp01(numer / denom)
                t = 1.0 - s
            else:
                s = 0.0
                t = _clamp01(-b1 / a11)
        elif t < 0.0:  # region 6
            tmp0 = a01 + b1
            tmp1 = a00 + b0
            if tmp1 > tmp0:
                numer = tmp1 - tmp0
                denom = a00 - 2.0 * a01 + a11
                t = _clamp01(numer / denom)
                s = 1.0 - t
            else:
                t = 0.0
                s = _clamp01(-b0 / a00)
        else:  # region 1
            numer = (a11 + b1) - (a01 + b0)
            if numer <= 0.0:
                s = 0.0
            else:
                denom = a00 - 2.0 * a01 + a11
                s = _clamp01(numer / denom)
            t = 1.0 - s

    p[0] = a[0] + s * e0x + t * e1x
    p[1] = a[1] + s * e0y + t * e1y
    p[2] = a[2] + s * e0z + t * e1z
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    dz = q[2] - p[2]
    dist[0] = sqrt(dx * dx + dy * dy + dz * dz)

    bary0 = 1.0 - s - t
    bary1 = s
    bary2 = t
    n_small = 0
    if bary0 <= EPS_BARY:
        n_small += 1
    if bary1 <= EPS_BARY:
        n_small += 1
    if bary2 <= EPS_BARY:
        n_small += 1
    if n_small == 0:
        region[0] = 0
        feature[0] = -1
    elif n_small == 1:
        region[0] = 1
        # The near-zero barycentric is opposite the edge the point lies on.
        if bary0 <= EPS_BARY:
            feature[0] = 1  # edge v1->v2
        elif bary1 <= EPS_BARY:
            feature[0] = 2  # edge v2->v0
        else:
            feature[0] = 0  # edge v0->v1
    else:
        region[0] = 2
        if bary0 > EPS_BARY:
            feature[0] = 0
        elif bary1 > EPS_BARY:
            feature[0] = 1
        else:
            feature[0] = 2


cdef void _cp_degenerate(const double* q, const double* a, const double* b,
                         const double* c, double* s_out, double* t_out) nogil:
    # Closest point over the three edges of a (near) zero-area triangle,
    # reported in the (s, t) parametrization p = a + s*(b-a) + t*(c-a).
    cdef double best = 1e300
    cdef double u, d2, px, py, pz, dx, dy, dz
    cdef int k
    cdef const double* p0
    cdef const double* p1
    for k in range(3):
        if k == 0:
            p0 = a; p1 = b
        elif k == 1:
            p0 = b; p1 = c
        else:
            p0 = c; p1 = a
        dx = p1[0] - p0[0]; dy = p1[1] - p0[1]; dz = p1[2] - p0[2]
        d2 = dx * dx + dy * dy + dz * dz
        if d2 > 0.0:
            u = _clamp01(((q[0] - p0[0]) * dx + (q[1] - p0[1]) * dy + (q[2] - p0[2]) * dz) / d2)
        else:
            u = 0.0
        px = p0[0] + u * dx; py = p0[1] + u * dy; pz = p0[2] + u * dz
        dx = q[0] - px; dy = q[1] - py; dz = q[2] - pz
        d2 = dx * dx + dy * dy + dz * dz
        if d2 < best:
            best = d2
            if k == 0:
                s_out[0] = u; t_out[0] = 0.0
            elif k == 1:
                s_out[0] = 1.0 - u; t_out[0] = u
            else:
                s_out[0] = 0.0; t_out[0] = 1.0 - u


def closest_point_tri(double[::1] q, double[::1] v0, double[::1] v1, double[::1] v2):
    """Return (point, region, feature, distance) for one query/triangle pair."""
    cdef double p[3]
    cdef int region, feature
    cdef double dist
    _cp_tri(&q[0], &v0[0], &v1[0], &v2[0], p, &region, &feature, &dist)
    out = np.empty(3, dtype=np.float64)
    out[0] = p[0]
    out[1] = p[1]
    out[2] = p[2]
    return out, region, feature, dist


def closest_point_batch(double[::1] q, double[:, :, ::1] tv):
    """Closest points from q to each triangle in tv (k,3,3)."""
    cdef Py_ssize_t k = tv.shape[0]
    pts_arr = np.empty((k, 3), dtype=np.float64)
    regs_arr = np.empty(k, dtype=np.int32)
    feats_arr = np.empty(k, dtype=np.int32)
    dists_arr = np.empty(k, dtype=np.float64)
    cdef double[:, ::1] pts = pts_arr
    cdef int[::1] regs = regs_arr
    cdef int[::1] feats = feats_arr
    cdef double[::1] dists = dists_arr
    cdef Py_ssize_t i
    cdef int region, feature
    cdef double dist
    with nogil:
        for i in range(k):
            _cp_tri(&q[0], &tv[i, 0, 0], &tv[i, 1, 0], &tv[i, 2, 0],
                    &pts[i, 0], &region, &feature, &dist)
            regs[i] = region
            feats[i] = feature
            dists[i] = dist
    return pts_arr, regs_arr, feats_arr, dists_arr


cdef struct HitBuf:
    int* ids
    double* pts
    int* regs
    int* feats
    double* dists
    Py_ssize_t n
    Py_ssize_t cap


cdef int _buf_push(HitBuf* buf, int tid, const double* p, int region, int feature,
                   double dist) nogil:
    cdef Py_ssize_t cap
    if buf.n == buf.cap:
        cap = buf.cap * 2
        buf.ids = <int*>realloc(buf.ids, cap * sizeof(int))
        buf.pts = <double*>realloc(buf.pts, cap * 3 * sizeof(double))
        buf.regs = <int*>realloc(buf.regs, cap * sizeof(int))
        buf.feats = <int*>realloc(buf.feats, cap * sizeof(int))
        buf.dists = <double*>realloc(buf.dists, cap * sizeof(double))
        if buf.ids == NULL or buf.pts == NULL or buf.regs == NULL \
                or buf.feats == NULL or buf.dists == NULL:
            return -1
        buf.cap = cap
    buf.ids[buf.n] = tid
    buf.pts[3 * buf.n] = p[0]
    buf.pts[3 * buf.n + 1] = p[1]
    buf.pts[3 * buf.n + 2] = p[2]
    buf.regs[buf.n] = region
    buf.feats[buf.n] = feature
    buf.dists[buf.n] = dist
    buf.n += 1
    return 0


def sphere_query(double[:, :, ::1] rot, double[:, ::1] lo, double[:, ::1] hi,
                 int[::1] left, int[::1] right, int[::1] start, int[::1] count,
                 double[:, :, ::1] tv, int[::1] order,
                 double cx, double cy, double cz, double radius):
    """All triangles whose closest point to (cx,cy,cz) is within radius.

    Nodes with left < 0 are leaves covering packed triangles
    [start, start+count); ``order`` maps packed slots to original ids.
    Returns (ids, points, regions, features, dists) in traversal order.
    """
    cdef int stack[512]
    cdef int stack_cap = 512
    cdef int sp = 0
    cdef int node, j, region, feature
    cdef Py_ssize_t i
    cdef double clx, cly, clz, d, d2, r2 = radius * radius
    cdef double q[3]
    cdef double p[3]
    cdef double dist
    cdef int overflow = 0
    cdef HitBuf buf
    q[0] = cx
    q[1] = cy
    q[2] = cz

    buf.n = 0
    buf.cap = 256
    buf.ids = <int*>malloc(buf.cap * sizeof(int))
    buf.pts = <double*>malloc(buf.cap * 3 * sizeof(double))
    buf.regs = <int*>malloc(buf.cap * sizeof(int))
    buf.feats = <int*>malloc(buf.cap * sizeof(int))
    buf.dists = <double*>malloc(buf.cap * sizeof(double))
    if buf.ids == NULL or buf.pts == NULL or buf.regs == NULL \
            or buf.feats == NULL or buf.dists == NULL:
        raise MemoryError()

    with nogil:
        stack[0] = 0
        sp = 1
        while sp > 0:
            sp -= 1
            node = stack[sp]
            # squared distance from the query to the node box, in node frame
            clx = rot[node, 0, 0] * cx + rot[node, 0, 1] * cy + rot[node, 0, 2] * cz
            cly = rot[node, 1, 0] * cx + rot[node, 1, 1] * cy + rot[node, 1, 2] * cz
            clz = rot[node, 2, 0] * cx + rot[node, 2, 1] * cy + rot[node, 2, 2] * cz
            d2 = 0.0
            d = lo[node, 0] - clx
            if d > 0.0:
                d2 += d * d
            d = clx - hi[node, 0]
            if d > 0.0:
                d2 += d * d
            d = lo[node, 1] - cly
            if d > 0.0:
                d2 += d * d
            d = cly - hi[node, 1]
            if d > 0.0:
                d2 += d * d
            d = lo[node, 2] - clz
            if d > 0.0:
                d2 += d * d
            d = clz - hi[node, 2]
            if d > 0.0:
                d2 += d * d
            if d2 > r2:
                continue
            if left[node] < 0:
                for i in range(start[node], start[node] + count[node]):
                    _cp_tri(q, &tv[i, 0, 0], &tv[i, 1, 0], &tv[i, 2, 0],
                            p, &region, &feature, &dist)
                    if dist <= radius:
                        if _buf_push(&buf, order[i], p, region, feature, dist) != 0:
                            overflow = 1
                            break
                if overflow:
                    break
            else:
                if sp + 2 > stack_cap:
                    overflow = 2
                    break
                stack[sp] = left[node]
                stack[sp + 1] = right[node]
                sp += 2

    try:
        if overflow == 1:
            raise MemoryError()
        if overflow == 2:
            raise RuntimeError("tree deeper than traversal stack")
        ids_arr = np.empty(buf.n, dtype=np.int32)
        pts_arr = np.empty((buf.n, 3), dtype=np.float64)
        regs_arr = np.empty(buf.n, dtype=np.int32)
        feats_arr = np.empty(buf.n, dtype=np.int32)
        dists_arr = np.empty(buf.n, dtype=np.float64)
        cdef_copy(ids_arr, pts_arr, regs_arr, feats_arr, dists_arr, &buf)
        return ids_arr, pts_arr, regs_arr, feats_arr, dists_arr
    finally:
        free(buf.ids)
        free(buf.pts)
        free(buf.regs)
        free(buf.feats)
        free(buf.dists)


cdef void cdef_copy(cnp.ndarray ids_arr, cnp.ndarray pts_arr, cnp.ndarray regs_arr,
                    cnp.ndarray feats_arr, cnp.ndarray dists_arr, HitBuf* buf):
    cdef int[::1] ids = ids_arr
    cdef double[:, ::1] pts = pts_arr
    cdef int[::1] regs = regs_arr
    cdef int[::1] feats = feats_arr
    cdef double[::1] dists = dists_arr
    cdef Py_ssize_t i
    for i in range(buf.n):
        ids[i] = buf.ids[i]
        pts[i, 0] = buf.pts[3 * i]
        pts[i, 1] = buf.pts[3 * i + 1]
        pts[i, 2] = buf.pts[3 * i + 2]
        regs[i] = buf.regs[i]
        feats[i] = buf.feats[i]
        dists[i] = buf.dists[i]

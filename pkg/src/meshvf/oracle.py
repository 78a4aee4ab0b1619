"""Brute-force geometric verifiers, independent of the query structures.

Everything here recomputes from raw vertex data by a different route than
the production kernels: closest points come from a candidate-minimum search
(plane projection plus three edge clamps) instead of region classification,
and inside/outside comes from ray-crossing parity. O(triangles) per query —
strictly for validation, never in the control loop.
"""

import numpy as np

from .errors import OpenMeshSignUndefined

# Fixed ray directions for crossing parity; irrational components so axis- or
# grid-aligned meshes don't produce edge-grazing hits. Fallbacks are used
# when a hit is numerically ambiguous.
_RAY_DIRS = np.array([
    [0.57735026918962576, 0.30028310600770413, 0.75918792401734416],
    [-0.23570226039551584, 0.87038827977848462, 0.43213594529740558],
    [0.80178372573727319, -0.53452248382484879, 0.26726124191242434],
])
_RAY_DIRS /= np.linalg.norm(_RAY_DIRS, axis=1, keepdims=True)


class _MeshArrays:
    """Cached per-mesh arrays for the batch routines."""

    def __init__(self, mesh):
        tv = mesh.packed_triangles()
        self.v0 = tv[:, 0]
        self.e0 = tv[:, 1] - tv[:, 0]
        self.e1 = tv[:, 2] - tv[:, 0]
        self.a00 = np.einsum("ij,ij->i", self.e0, self.e0)
        self.a01 = np.einsum("ij,ij->i", self.e0, self.e1)
        self.a11 = np.einsum("ij,ij->i", self.e1, self.e1)
        self.det = self.a00 * self.a11 - self.a01 ** 2
        self.edges = []  # (origin, direction, squared length) per edge
        for p, d in ((self.v0, self.e0), (self.v0, self.e1),
                     (tv[:, 1], tv[:, 2] - tv[:, 1])):
            self.edges.append((p, d, np.einsum("ij,ij->i", d, d)))


_cache = {}


def _arrays(mesh):
    key = id(mesh)
    got = _cache.get(key)
    if got is None or got[0] is not mesh:
        got = (mesh, _MeshArrays(mesh))
        _cache[key] = got
    return got[1]


def closest_point_candidates(q, v0, v1, v2):
    """Closest point by candidate minimum: interior projection + edge clamps.

    Deliberately different from the production region-walk so the two can
    check each other.
    """
    q = np.asarray(q, dtype=np.float64)
    v0 = np.asarray(v0, dtype=np.float64)
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    cands = []
    e0, e1 = v1 - v0, v2 - v0
    n = np.cross(e0, e1)
    n2 = float(n @ n)
    if n2 > 0:
        proj = q - ((q - v0) @ n / n2) * n
        # barycentric via cross-product areas
        w = np.array([
            np.cross(v1 - proj, v2 - proj) @ n,
            np.cross(v2 - proj, v0 - proj) @ n,
            np.cross(v0 - proj, v1 - proj) @ n,
        ]) / n2
        if np.all(w >= 0.0):
            cands.append(proj)
    for a, b in ((v0, v1), (v1, v2), (v2, v0)):
        d = b - a
        dd = float(d @ d)
        t = float((q - a) @ d) / dd if dd > 0 else 0.0
        cands.append(a + min(max(t, 0.0), 1.0) * d)
    cands = np.asarray(cands)
    dist = np.linalg.norm(cands - q, axis=1)
    i = int(np.argmin(dist))
    return cands[i], float(dist[i])


def _block_distances(ar, Q):
    """(len(Q), n_tri) distances by the candidate-minimum route."""
    d = Q[:, None, :] - ar.v0[None, :, :]
    b0 = np.einsum("qtj,tj->qt", d, ar.e0)
    b1 = np.einsum("qtj,tj->qt", d, ar.e1)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (ar.a11 * b0 - ar.a01 * b1) / np.where(ar.det > 0, ar.det, 1.0)
        t = (ar.a00 * b1 - ar.a01 * b0) / np.where(ar.det > 0, ar.det, 1.0)
    inside = (s >= 0) & (t >= 0) & (s + t <= 1) & (ar.det > 0)
    proj = ar.v0 + s[..., None] * ar.e0 + t[..., None] * ar.e1
    best = np.where(
        inside,
        np.linalg.norm(Q[:, None, :] - proj, axis=2),
        np.inf,
    )
    for p, dvec, dd in ar.edges:
        w = Q[:, None, :] - p[None, :, :]
        u = np.einsum("qtj,tj->qt", w, dvec) / np.where(dd > 0, dd, 1.0)
        u = np.clip(u, 0.0, 1.0)
        foot = p + u[..., None] * dvec
        best = np.minimum(best, np.linalg.norm(Q[:, None, :] - foot, axis=2))
    return best


def brute_closest_distance(mesh, Q, block=256):
    """Unsigned distance from each query point to the mesh surface."""
    ar = _arrays(mesh)
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    out = np.empty(len(Q))
    for s in range(0, len(Q), block):
        out[s : s + block] = _block_distances(ar, Q[s : s + block]).min(axis=1)
    return out


def brute_sphere_hits(mesh, center, radius):
    """Triangle ids whose distance to center is <= radius (sorted)."""
    ar = _arrays(mesh)
    d = _block_distances(ar, np.asarray(center, dtype=np.float64)[None, :])[0]
    return np.nonzero(d <= radius)[0].astype(np.int32)


def _ray_parity(ar, Q, direction):
    """Crossing count parity per query; NaN-flagged when a hit is ambiguous."""
    h = np.cross(direction, ar.e1)
    a = np.einsum("tj,tj->t", ar.e0, h)
    ok = np.abs(a) > 1e-12
    inv = np.where(ok, 1.0 / np.where(ok, a, 1.0), 0.0)
    s_vec = Q[:, None, :] - ar.v0[None, :, :]
    u = np.einsum("qtj,tj->qt", s_vec, h) * inv
    qv = np.cross(s_vec, ar.e0[None, :, :])
    v = np.einsum("qtj,j->qt", qv, direction) * inv
    t = np.einsum("qtj,tj->qt", qv, ar.e1) * inv
    eps = 1e-10
    hit = ok & (u > eps) & (v > eps) & (u + v < 1 - eps) & (t > eps)
    # a crossing through (or extremely near) an edge, vertex, or the query
    # itself makes the count untrustworthy for that query
    grazing = ok & (t > -eps) & (
        (np.abs(u) <= eps) | (np.abs(v) <= eps)
        | (np.abs(1 - u - v) <= eps) | (np.abs(t) <= eps)
    ) & (u > -eps) & (v > -eps) & (u + v < 1 + eps)
    return hit.sum(axis=1) % 2 == 1, grazing.any(axis=1)


def inside_batch(mesh, Q, block=256):
    """Ray-parity inside test for each query (closed meshes)."""
    ar = _arrays(mesh)
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    inside = np.zeros(len(Q), dtype=bool)
    for s in range(0, len(Q), block):
        chunk = Q[s : s + block]
        todo = np.arange(len(chunk))
        for k in range(len(_RAY_DIRS)):
            par, amb = _ray_parity(ar, chunk[todo], _RAY_DIRS[k])
            inside[s + todo[~amb]] = par[~amb]
            todo = todo[amb]
            if len(todo) == 0:
                break
            if k == len(_RAY_DIRS) - 1:
                # grazed every fallback: accept the last parity as-is
                inside[s + todo] = par[amb]
    return inside


def signed_distance_batch(mesh, Q):
    """Signed distances: positive outside, negative inside.

    Raises
    ------
    OpenMeshSignUndefined
        If the mesh has boundary or non-manifold edges (no inside).
    """
    if not mesh.is_closed():
        raise OpenMeshSignUndefined("mesh has boundary edges; sign undefined")
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    d = brute_closest_distance(mesh, Q)
    sign = np.where(inside_batch(mesh, Q), -1.0, 1.0)
    return sign * d


def signed_distance_oracle(mesh, x):
    """Scalar signed distance (positive outside)."""
    return float(signed_distance_batch(mesh, np.asarray(x, dtype=np.float64)[None, :])[0])

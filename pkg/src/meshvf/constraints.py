"""Active plane-constraint generation around the current tool position.

For every triangle intersecting the motion sphere, decide whether it
contributes a half-space constraint and with which plane:

* C1 — closest point inside the triangle, tool on the positive side of the
  face normal: the face plane through the closest point.
* C2 — closest point on a shared edge (or vertex), the neighbor's closest
  point coincides, and the edge is convex: a plane through the closest point
  whose normal points at the tool. This rounds convex edges instead of
  wedging the tool between two face planes.
* C3 — closest point on an edge of a concave (or flat) junction with the
  tool on the positive side: the face plane again. Both faces of a valley
  emit their planes, which is exactly the convex-set intersection a concave
  region needs.
* Boundary — the edge has no neighbor (open mesh): the face plane when the
  tool is on the positive side. Conservative: protects mesh borders at the
  cost of possible over-restriction there.

Vertex hits reuse the edge logic through the two incident edges of the
triangle. The result is a pure function of (mesh, x, r): deduplicated,
sorted by source triangle id, suitable for record/replay.
"""

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .errors import NonManifoldError
from .pdtree import MotionSphere

# Tolerance for "tool on the positive side": numerical drift can leave x
# marginally inside a half-space and the constraint must still be emitted
# (the solver's right-hand side then pushes outward).
EPS_FEAS = 1e-7
# Two closest points are "the same point on the shared edge" within (mm):
EPS_CP_MATCH = 1e-9
# Quantization step for duplicate-plane removal (normal and point).
DEDUP_QUANTUM = 1e-9
# Dihedral tolerance reused from edge classification.
EPS_CONVEX = 1e-9
# Fraction of the bbox diagonal below which an edge/vertex hit counts as
# contact: there (x - cp)/|x - cp| is normalization noise, and a plane tilted
# by that noise lets a full step sink measurably through the surface. The
# face plane is the sound substitute — it contains the feature and keeps the
# whole local wedge on its negative side.
EPS_CONTACT = 1e-4

_REGION_IN = 0
_REGION_EDGE = 1
_REGION_VERTEX = 2


class Condition(enum.Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    BOUNDARY = "Boundary"


_COND_BY_CODE = {0: Condition.C1, 1: Condition.C2, 2: Condition.C3, 3: Condition.BOUNDARY}
_CODE_BY_COND = {v: k for k, v in _COND_BY_CODE.items()}


@dataclass
class PlaneConstraint:
    """One half-space: motion must keep ``normal · (x' - point) >= 0``."""

    normal: np.ndarray
    point: np.ndarray
    source_triangle: int
    condition: Condition


class ActiveConstraintSet:
    """Deduplicated plane constraints for one tick.

    Stores the planes as packed arrays (``normals``/``points`` of shape
    (c, 3), ``triangles``/``codes``); the ``constraints`` list view is built
    on first access so the control loop never pays for object construction.
    """

    def __init__(self, normals, points, triangles, codes, tool_position, tick=0):
        self.normals = normals
        self.points = points
        self.triangles = triangles
        self.codes = codes
        self.tool_position = np.asarray(tool_position, dtype=np.float64)
        self.tick = tick

    def __len__(self):
        return len(self.normals)

    @cached_property
    def constraints(self):
        return [
            PlaneConstraint(self.normals[i], self.points[i],
                            int(self.triangles[i]), _COND_BY_CODE[int(self.codes[i])])
            for i in range(len(self.normals))
        ]

    def rows(self, x=None):
        """Constraint rows (A, b) for motion from ``x``: A @ dx >= b.

        Row i is the plane normal; b_i = -n_i . (x - p_i), the negated
        signed distance, so any step satisfying the rows keeps the tool on
        or outside every plane.
        """
        if x is None:
            x = self.tool_position
        if len(self.normals) == 0:
            return np.empty((0, 3)), np.empty(0)
        b = -np.einsum("ij,ij->i", self.normals, x - self.points)
        return self.normals, b

    def to_json(self):
        return {
            "tick": int(self.tick),
            "x": [float(v) for v in self.tool_position],
            "constraints": [
                {
                    "n": [float(v) for v in self.normals[i]],
                    "p": [float(v) for v in self.points[i]],
                    "tri": int(self.triangles[i]),
                    "cond": _COND_BY_CODE[int(self.codes[i])].value,
                }
                for i in range(len(self.normals))
            ],
        }

    @classmethod
    def from_json(cls, data):
        cons = data.get("constraints", [])
        n = np.asarray([c["n"] for c in cons], dtype=np.float64).reshape(len(cons), 3)
        p = np.asarray([c["p"] for c in cons], dtype=np.float64).reshape(len(cons), 3)
        tris = np.asarray([c["tri"] for c in cons], dtype=np.int32)
        codes = np.asarray([_CODE_BY_COND[Condition(c["cond"])] for c in cons], dtype=np.int8)
        return cls(n, p, tris, codes, np.asarray(data["x"]), data.get("tick", 0))

    @classmethod
    def empty(cls, x, tick=0):
        return cls(np.empty((0, 3)), np.empty((0, 3)),
                   np.empty(0, np.int32), np.empty(0, np.int8), x, tick)


def _neighbor_cp(ids, pts, nbr, x, mesh):
    """Closest point of each neighbor triangle, looked up in the hit arrays.

    Neighbors of an on-edge hit are themselves within the sphere (the shared
    edge is), so the lookup nearly always succeeds; the rare miss at the
    sphere rim is recomputed directly.
    """
    idx = np.searchsorted(ids, nbr)
    idx_c = np.minimum(idx, len(ids) - 1)
    found = ids[idx_c] == nbr
    out = pts[idx_c].copy()
    if not np.all(found):
        for j in np.nonzero(~found)[0]:
            tv = mesh.vertices[mesh.triangles[nbr[j]]]
            p, _, _, _ = kernels.closest_point_tri(x, tv[0], tv[1], tv[2])
            out[j] = p
    return out


def generate_constraints(mesh, tree, x, r, tick=0, hits=None):
    """Run the per-triangle constraint decision over a motion-sphere query.

    Parameters
    ----------
    mesh : TriangleMesh
    tree : PDTree built over ``mesh``
    x : (3,) current tool position (mm)
    r : float motion-sphere radius (mm)
    hits : optional SphereHits
        Precomputed query result for this (x, r); queried here when absent.
        (The benchmark times the two phases separately.)

    Returns
    -------
    ActiveConstraintSet
        Deduplicated, ordered by source triangle id.

    Raises
    ------
    NonManifoldError
        If a hit triangle's relevant edge is shared by 3+ triangles.
    """
    x = np.asarray(x, dtype=np.float64)
    if hits is None:
        hits = tree.query_sphere(MotionSphere(x, r))
    k = len(hits)
    if k == 0:
        return ActiveConstraintSet.empty(x, tick)

    ids = hits.ids
    pts = hits.points
    regs = hits.regions
    feats = hits.features
    dists = hits.distances

    tris = mesh.triangles
    verts = mesh.vertices
    nbrs = mesh.neighbors
    N = mesh.face_normals[ids]

    side = np.einsum("ij,ij->i", N, x[None, :] - pts)
    pos = side >= -EPS_FEAS

    # -1 none, else condition code
    cond = np.full(k, -1, dtype=np.int8)
    out_n = N.copy()

    cond[(regs == _REGION_IN) & pos] = 0  # C1

    for which in (_REGION_EDGE, _REGION_VERTEX):
        sel = np.nonzero(regs == which)[0]
        if len(sel) == 0:
            continue
        t = ids[sel]
        if which == _REGION_EDGE:
            edges = feats[sel][:, None]  # one edge per hit
        else:
            f = feats[sel]
            edges = np.stack([f, (f + 2) % 3], axis=1)  # both edges at the vertex

        got_c2 = np.zeros(len(sel), dtype=bool)
        got_c3 = np.zeros(len(sel), dtype=bool)
        got_open = np.zeros(len(sel), dtype=bool)
        for col in range(edges.shape[1]):
            e = edges[:, col]
            nb = nbrs[t, e]
            bad = nb == -2
            if np.any(bad):
                j = int(np.nonzero(bad)[0][0])
                a, b = mesh.edge_vertex_ids(int(t[j]), int(e[j]))
                key = (a, b) if a < b else (b, a)
                raise NonManifoldError(key, mesh.edge_adjacency[key])
            has = nb >= 0
            got_open |= nb == -1
            if not np.any(has):
                continue
            hs = np.nonzero(has)[0]
            th, eh, nbh = t[hs], e[hs], nb[hs]
            a = tris[th, eh]
            b = tris[th, (eh + 1) % 3]
            far = tris[nbh].sum(axis=1) - a - b
            s = np.einsum("ij,ij->i", N[sel][hs], verts[far] - verts[a])
            convex = s < -EPS_CONVEX
            cpn = _neighbor_cp(ids, pts, nbh, x, mesh)
            coinc = np.linalg.norm(cpn - pts[sel][hs], axis=1) <= EPS_CP_MATCH
            got_c2[hs] |= coinc & convex
            got_c3[hs] |= ~convex

        posv = pos[sel]
        c2 = got_c2
        c3 = ~c2 & got_c3 & posv
        bd = ~c2 & ~c3 & got_open & posv
        cond[sel[c2]] = 1
        cond[sel[c3]] = 2
        cond[sel[bd]] = 3

        # C2 plane normal: from the closest point toward the tool. In
        # contact the direction degenerates; fall back to the face plane.
        c2i = sel[c2]
        if len(c2i):
            d = dists[c2i]
            safe = d > EPS_CONTACT * mesh.bbox_diagonal()
            dirs = np.where(safe[:, None], (x[None, :] - pts[c2i]) /
                            np.where(safe, d, 1.0)[:, None], N[c2i])
            out_n[c2i] = dirs

    keep = np.nonzero(cond >= 0)[0]
    if len(keep) == 0:
        return ActiveConstraintSet.empty(x, tick)

    n_keep = out_n[keep]
    p_keep = pts[keep]
    key = np.round(np.hstack([n_keep, p_keep]) / DEDUP_QUANTUM).astype(np.int64)
    if len(key) <= 32:
        # contact sets are nearly always this small; a set walk beats
        # np.unique by an order of magnitude here
        seen = set()
        first = []
        for i, row in enumerate(map(tuple, key.tolist())):
            if row not in seen:
                seen.add(row)
                first.append(i)
        first = np.asarray(first)
    else:
        _, first = np.unique(key, axis=0, return_index=True)
        first = np.sort(first)

    return ActiveConstraintSet(
        np.ascontiguousarray(n_keep[first]),
        np.ascontiguousarray(p_keep[first]),
        ids[keep][first].astype(np.int32),
        cond[keep][first],
        x,
        tick,
    )

"""Point-triangle closest points and edge convexity classification.

Thin typed layer over the selected kernel backend. Distances are Euclidean,
region classification is barycentric with tolerance EPS_BARY so that points
numerically on an edge are treated as edge hits (the constraint generator
branches on this).
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateTriangleError, NotAdjacentError
from .mesh import EPS_AREA

EPS_BARY = 1e-9
# Dihedral tolerance (mm): below it a neighbor's far vertex is considered
# in-plane and the shared edge classifies as coplanar.
EPS_CONVEX = 1e-9


class Region(enum.IntEnum):
    """Where on the triangle the closest point falls."""

    IN_TRIANGLE = 0
    ON_EDGE = 1
    ON_VERTEX = 2


class Convexity(enum.Enum):
    CONVEX = "convex"
    CONCAVE = "concave"
    COPLANAR = "coplanar"


@dataclass
class ClosestPointResult:
    """Closest point on a single triangle.

    ``feature`` is the local edge index for ON_EDGE, the local vertex index
    for ON_VERTEX, and -1 for interior hits. ``triangle_id`` is -1 when the
    query was not made through a mesh.
    """

    point: np.ndarray
    distance: float
    region: Region
    feature: int
    triangle_id: int = -1


def closest_point_on_triangle(q, v0, v1, v2, triangle_id=-1):
    """Closest point from ``q`` to triangle (v0, v1, v2).

    Handles all Voronoi regions of the triangle.

    Raises
    ------
    DegenerateTriangleError
        If the triangle area is below the degeneracy threshold.
    """
    v0 = np.asarray(v0, dtype=np.float64)
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0)) < EPS_AREA:
        raise DegenerateTriangleError("triangle area below threshold")
    pt, region, feature, dist = kernels.closest_point_tri(
        np.asarray(q, dtype=np.float64), v0, v1, v2)
    return ClosestPointResult(pt, dist, Region(region), feature, triangle_id)


def closest_point_batch(q, tv):
    """Vectorized form over triangles ``tv`` of shape (k, 3, 3).

    Returns raw arrays (points, regions, features, distances); callers in the
    hot path use these directly instead of building result objects.
    """
    return kernels.closest_point_batch(q, tv)


def edge_convexity(mesh, tri_a, tri_b, shared_edge=None):
    """Classify the edge shared by two adjacent triangles.

    The test is purely geometric: the edge is convex when triangle ``tri_b``'s
    far vertex lies strictly below the supporting plane of ``tri_a`` (outward
    normals assumed). Within EPS_CONVEX of the plane the edge is coplanar.
    Symmetric in (tri_a, tri_b) for consistently wound manifold meshes.

    Parameters
    ----------
    shared_edge : optional (vertex id, vertex id)
        When given, verified against the actual shared pair.

    Raises
    ------
    NotAdjacentError
        If the triangles do not share exactly one edge (two vertices), or
        the shared pair differs from ``shared_edge``.
    """
    va = mesh.triangles[tri_a]
    vb = mesh.triangles[tri_b]
    shared = set(int(x) for x in va) & set(int(x) for x in vb)
    if len(shared) != 2:
        raise NotAdjacentError(tri_a, tri_b)
    if shared_edge is not None and set(int(v) for v in shared_edge) != shared:
        raise NotAdjacentError(tri_a, tri_b, tuple(shared_edge))
    far = next(int(x) for x in vb if int(x) not in shared)
    p_edge = mesh.vertices[next(iter(shared))]
    s = float(mesh.face_normals[tri_a] @ (mesh.vertices[far] - p_edge))
    if s < -EPS_CONVEX:
        return Convexity.CONVEX
    if s > EPS_CONVEX:
        return Convexity.CONCAVE
    return Convexity.COPLANAR

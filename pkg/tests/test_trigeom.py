import numpy as np
import pytest

from meshvf.errors import DegenerateTriangleError, NotAdjacentError
from meshvf.mesh import TriangleMesh
from meshvf.trigeom import (Convexity, Region, closest_point_on_triangle,
                            edge_convexity)

T0 = (np.array([0.0, 0, 0]), np.array([1.0, 0, 0]), np.array([0.0, 1, 0]))


def bary(point, v0, v1, v2):
    """Barycentric coordinates of a point known to lie in the triangle plane."""
    m = np.column_stack([v1 - v0, v2 - v0])
    uv, *_ = np.linalg.lstsq(m, point - v0, rcond=None)
    return np.array([1.0 - uv.sum(), uv[0], uv[1]])


def test_projection_lands_inside():
    res = closest_point_on_triangle(np.array([0.25, 0.25, 1.0]), *T0)
    assert np.allclose(res.point, [0.25, 0.25, 0.0])
    assert res.region == Region.IN_TRIANGLE
    assert res.distance == pytest.approx(1.0)


def test_projection_onto_edge():
    res = closest_point_on_triangle(np.array([0.5, -1.0, 0.0]), *T0)
    assert np.allclose(res.point, [0.5, 0.0, 0.0])
    assert res.region == Region.ON_EDGE
    assert res.feature == 0  # edge v0 -> v1
    assert res.distance == pytest.approx(1.0)


def test_nearest_vertex():
    res = closest_point_on_triangle(np.array([2.0, -1.0, 0.0]), *T0)
    assert np.allclose(res.point, [1.0, 0.0, 0.0])
    assert res.region == Region.ON_VERTEX
    assert res.feature == 1
    assert res.distance == pytest.approx(np.sqrt(2.0))


def test_degenerate_triangle_rejected():
    with pytest.raises(DegenerateTriangleError):
        closest_point_on_triangle(
            np.array([0.0, 0, 1]),
            np.array([0.0, 0, 0]), np.array([1.0, 0, 0]), np.array([2.0, 0, 0]))


def test_grid_oracle_10k(rng):
    """Closest distance vs brute-force minimum over a 200x200 barycentric grid."""
    from scipy.spatial.distance import cdist

    n_grid = 200
    u = np.linspace(0.0, 1.0, n_grid + 1)
    uu, vv = np.meshgrid(u, u)
    keep = uu + vv <= 1.0 + 1e-12
    gu, gv = uu[keep], vv[keep]

    n_tris, per_tri = 20, 500
    for _ in range(n_tris):
        v0, v1, v2 = rng.normal(scale=3.0, size=(3, 3))
        if 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0)) < 1e-3:
            continue
        grid = (v0[None, :] + np.outer(gu, v1 - v0) + np.outer(gv, v2 - v0))
        diam = max(np.linalg.norm(v1 - v0), np.linalg.norm(v2 - v0),
                   np.linalg.norm(v2 - v1))
        queries = rng.normal(scale=5.0, size=(per_tri, 3))
        brute = cdist(queries, grid).min(axis=1)
        for q, d_ref in zip(queries, brute):
            res = closest_point_on_triangle(q, v0, v1, v2)
            assert res.distance <= d_ref + 1e-12
            assert abs(res.distance - d_ref) <= 1e-3 * diam


def test_region_matches_barycentrics(rng):
    eps_b = 1e-9
    for _ in range(2000):
        v0, v1, v2 = rng.normal(scale=2.0, size=(3, 3))
        if 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0)) < 1e-3:
            continue
        q = rng.normal(scale=4.0, size=3)
        res = closest_point_on_triangle(q, v0, v1, v2)
        b = bary(res.point, v0, v1, v2)
        assert b.min() >= -1e-7 and abs(b.sum() - 1.0) < 1e-7
        small = b <= eps_b + 1e-7
        if res.region == Region.IN_TRIANGLE:
            assert not small.any()
        elif res.region == Region.ON_VERTEX:
            assert small.sum() == 2
        else:
            assert small.sum() == 1
        assert res.distance == pytest.approx(np.linalg.norm(q - res.point))


def test_distance_lipschitz(rng):
    v0, v1, v2 = rng.normal(scale=2.0, size=(3, 3))
    for _ in range(500):
        q1 = rng.normal(scale=4.0, size=3)
        q2 = q1 + rng.normal(scale=0.5, size=3)
        d1 = closest_point_on_triangle(q1, v0, v1, v2).distance
        d2 = closest_point_on_triangle(q2, v0, v1, v2).distance
        assert abs(d1 - d2) <= np.linalg.norm(q1 - q2) + 1e-12


def ridge_mesh(far):
    """Two triangles sharing the y-axis edge; triA in z=0 with normal +z."""
    v = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0], far])
    return TriangleMesh(v, np.array([[0, 1, 2], [0, 2, 3]]))


def test_convexity_spec_cases():
    assert edge_convexity(ridge_mesh([-1.0, 0, -1]), 0, 1) == Convexity.CONVEX
    assert edge_convexity(ridge_mesh([-1.0, 0, 1]), 0, 1) == Convexity.CONCAVE
    assert edge_convexity(ridge_mesh([-1.0, 0, 0]), 0, 1) == Convexity.COPLANAR


def test_convexity_symmetric_and_explicit_edge():
    mesh = ridge_mesh([-1.0, 0, -1])
    assert edge_convexity(mesh, 1, 0) == Convexity.CONVEX
    assert edge_convexity(mesh, 0, 1, shared_edge=(0, 2)) == Convexity.CONVEX
    with pytest.raises(NotAdjacentError):
        edge_convexity(mesh, 0, 1, shared_edge=(0, 1))
    with pytest.raises(NotAdjacentError):
        edge_convexity(mesh, 0, 0)


def test_icosahedron_all_edges_convex():
    from meshvf.shapes import icosahedron

    mesh = icosahedron(10.0)
    # hull property, checked independently: every vertex on or below the
    # supporting plane of every face
    for t in range(mesh.n_triangles):
        n = mesh.face_normals[t]
        p = mesh.vertices[mesh.triangles[t][0]]
        assert np.all((mesh.vertices - p) @ n <= 1e-9)
    for t in range(mesh.n_triangles):
        for e in range(3):
            nb = mesh.adjacent_triangles(t, e)
            assert edge_convexity(mesh, t, nb[0]) == Convexity.CONVEX


def test_torus_has_concave_inner_edges(torus):
    seen = set()
    for t in range(torus.n_triangles):
        for e in range(3):
            nb = torus.adjacent_triangles(t, e)[0]
            seen.add(edge_convexity(torus, t, nb))
    assert Convexity.CONVEX in seen
    assert Convexity.CONCAVE in seen


def test_convexity_rigid_and_scale_invariant(rng):
    base = ridge_mesh([-1.0, 0, 1])
    for _ in range(20):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        s = float(rng.uniform(0.1, 10.0))
        shift = rng.normal(scale=5.0, size=3)
        moved = TriangleMesh(s * (base.vertices @ q.T) + shift, base.triangles)
        assert edge_convexity(moved, 0, 1) == Convexity.CONCAVE

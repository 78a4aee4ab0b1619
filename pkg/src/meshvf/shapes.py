"""Procedural test meshes.

Everything the test-suite and benchmarks need without shipping binary
assets: closed solids of varied curvature (cube, spheres, torus, gear,
blob, ...), an open flat sheet, and two-triangle wedge pairs that isolate a
single convex or concave edge. All dimensions in mm.
"""

import numpy as np

from .mesh import TriangleMesh


def _outward(vertices, triangles):
    """Flip winding if the signed volume is negative (closed meshes only)."""
    v = np.asarray(vertices, dtype=np.float64)
    t = np.asarray(triangles, dtype=np.int64)
    vol = np.einsum("ij,ij->i", v[t[:, 0]], np.cross(v[t[:, 1]], v[t[:, 2]])).sum() / 6.0
    if vol < 0:
        t = t[:, [0, 2, 1]]
    return TriangleMesh(v, t)


def cube(size=20.0, center=(0.0, 0.0, 0.0)):
    """Axis-aligned cube: 8 vertices, 12 triangles."""
    h = size / 2.0
    c = np.asarray(center, dtype=np.float64)
    v = np.array([[x, y, z] for x in (-h, h) for y in (-h, h) for z in (-h, h)]) + c
    # faces as quads (indices into the (x,y,z) lattice above), outward order
    quads = [
        (0, 1, 3, 2),  # -x
        (4, 6, 7, 5),  # +x
        (0, 4, 5, 1),  # -y
        (2, 3, 7, 6),  # +y
        (0, 2, 6, 4),  # -z
        (1, 5, 7, 3),  # +z
    ]
    t = []
    for a, b, c_, d in quads:
        t += [[a, b, c_], [a, c_, d]]
    return _outward(v, t)


def tetrahedron(scale=10.0):
    s = scale / np.sqrt(3.0)
    v = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=np.float64) * s
    t = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
    return _outward(v, t)


def icosahedron(radius=10.0):
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    v = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=np.float64)
    v *= radius / np.linalg.norm(v[0])
    t = [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
    return _outward(v, t)


def _subdivide_tris(vertices, triangles):
    """One midpoint (1-to-4) split; shared edge midpoints are merged."""
    verts = list(map(tuple, vertices))
    cache = {}

    def mid(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            cache[key] = len(verts)
            verts.append(tuple((np.asarray(verts[i]) + np.asarray(verts[j])) / 2.0))
        return cache[key]

    out = []
    for a, b, c in triangles:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        out += [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
    return np.asarray(verts, dtype=np.float64), np.asarray(out)


def icosphere(radius=10.0, subdivisions=3):
    mesh = icosahedron(radius)
    v, t = mesh.vertices, mesh.triangles
    for _ in range(subdivisions):
        v, t = _subdivide_tris(v, t)
        v = v * (radius / np.linalg.norm(v, axis=1, keepdims=True))
    return TriangleMesh(v, t)


def blob(radius=10.0, subdivisions=4, amplitude=0.22):
    """Wavy star-convex solid: icosphere with harmonically modulated radius.

    Mixes convex and concave regions; ~5k triangles at the default level.
    """
    base = icosphere(1.0, subdivisions)
    d = base.vertices / np.linalg.norm(base.vertices, axis=1, keepdims=True)
    theta = np.arccos(np.clip(d[:, 2], -1, 1))
    phi = np.arctan2(d[:, 1], d[:, 0])
    wave = (np.sin(3 * theta) * np.cos(2 * phi)
            + 0.6 * np.cos(4 * phi) * np.sin(theta) ** 2)
    r = radius * (1.0 + amplitude * wave / (1.0 + 0.6))
    return TriangleMesh(d * r[:, None], base.triangles)


def cylinder(radius=8.0, height=20.0, segments=24):
    ang = 2 * np.pi * np.arange(segments) / segments
    ring = np.stack([radius * np.cos(ang), radius * np.sin(ang)], axis=1)
    zt, zb = height / 2.0, -height / 2.0
    v = [(x, y, zb) for x, y in ring] + [(x, y, zt) for x, y in ring]
    v += [(0.0, 0.0, zb), (0.0, 0.0, zt)]
    cb, ct = 2 * segments, 2 * segments + 1
    t = []
    for i in range(segments):
        j = (i + 1) % segments
        t += [[i, j, segments + j], [i, segments + j, segments + i]]  # wall
        t += [[cb, j, i], [ct, segments + i, segments + j]]  # caps
    return _outward(v, t)


def torus(major=12.0, minor=4.0, n_major=32, n_minor=16):
    """Closed torus; inner-ring edges are concave, outer convex."""
    u = 2 * np.pi * np.arange(n_major) / n_major
    w = 2 * np.pi * np.arange(n_minor) / n_minor
    uu, ww = np.meshgrid(u, w, indexing="ij")
    x = (major + minor * np.cos(ww)) * np.cos(uu)
    y = (major + minor * np.cos(ww)) * np.sin(uu)
    z = minor * np.sin(ww)
    v = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)
    t = []
    for i in range(n_major):
        for j in range(n_minor):
            a = i * n_minor + j
            b = ((i + 1) % n_major) * n_minor + j
            c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
            d = i * n_minor + (j + 1) % n_minor
            t += [[a, b, c], [a, c, d]]
    return _outward(v, t)


def _extrude_polygon(profile, depth):
    """Closed prism from a star-shaped 2D profile (CCW, in xy), along z."""
    profile = np.asarray(profile, dtype=np.float64)
    n = len(profile)
    zb, zt = -depth / 2.0, depth / 2.0
    v = [(x, y, zb) for x, y in profile] + [(x, y, zt) for x, y in profile]
    centroid = profile.mean(axis=0)
    v += [(centroid[0], centroid[1], zb), (centroid[0], centroid[1], zt)]
    cb, ct = 2 * n, 2 * n + 1
    t = []
    for i in range(n):
        j = (i + 1) % n
        t += [[i, j, n + j], [i, n + j, n + i]]
        t += [[cb, j, i], [ct, n + i, n + j]]
    return _outward(v, t)


def gear(teeth=9, r_root=8.0, r_tip=11.0, depth=6.0):
    """Extruded gear silhouette: alternating convex tips and concave roots."""
    pts = []
    step = 2 * np.pi / teeth
    for k in range(teeth):
        base = k * step
        for frac, r in ((0.0, r_root), (0.25, r_tip), (0.55, r_tip), (0.8, r_root)):
            a = base + frac * step
            pts.append((r * np.cos(a), r * np.sin(a)))
    return _extrude_polygon(pts, depth)


def house(width=16.0, wall=10.0, roof=7.0, depth=18.0):
    """Gabled prism: vertical walls, slanted roof ridge, sharp eaves."""
    w = width / 2.0
    profile = [(-w, 0.0), (w, 0.0), (w, wall), (0.0, wall + roof), (-w, wall)]
    return _extrude_polygon(profile, depth)


def plane_grid(nx=10, ny=10, size=40.0, z=0.0):
    """Open flat sheet in the z-plane, normals +z. Boundary edges all around."""
    xs = np.linspace(-size / 2.0, size / 2.0, nx + 1)
    ys = np.linspace(-size / 2.0, size / 2.0, ny + 1)
    v = np.array([(x, y, z) for y in ys for x in xs])
    t = []
    for j in range(ny):
        for i in range(nx):
            a = j * (nx + 1) + i
            b = a + 1
            c = a + nx + 2
            d = a + nx + 1
            t += [[a, b, c], [a, c, d]]
    return TriangleMesh(v, np.asarray(t))


def _reflect(p, q1, q2):
    """Reflect point p across the line through q1, q2 (stays in any plane
    containing all three)."""
    u = q2 - q1
    u = u / np.linalg.norm(u)
    w = p - q1
    return q1 + 2.0 * (w @ u) * u - w


def wedge_pair(opening_deg, kind, face_len=10.0, half_height=50.0, extended=False):
    """Two triangles meeting at one straight edge along the y-axis.

    ``kind`` is "convex" (ridge: material below, faces tilt down) or
    "concave" (valley: faces tilt up, free space between them).
    ``opening_deg`` is the angle between the two faces.

    Face 1 tilts toward -x, face 2 toward +x; the shared edge runs from
    (0, -half_height, 0) to (0, +half_height, 0), each face's apex sits at
    face_len along its direction. Face normals:
    concave -> (±cos a, 0, sin a) pointing into the valley,
    convex  -> (∓cos a, 0, sin a) pointing away from the material.

    With ``extended`` every rim (non-shared) edge gains a coplanar neighbor
    triangle (the apex pushed well past that edge, three rim-distances out),
    so the remaining boundary edges are far from the shared edge and from
    any tool position near the original faces.
    """
    a = np.radians(opening_deg) / 2.0
    zsign = 1.0 if kind == "concave" else -1.0
    d1 = np.array([-np.sin(a), 0.0, zsign * np.cos(a)])
    d2 = np.array([+np.sin(a), 0.0, zsign * np.cos(a)])

    am = np.array([0.0, -half_height, 0.0])
    ap = np.array([0.0, +half_height, 0.0])
    b1 = face_len * d1
    b2 = face_len * d2
    verts = [am, ap, b1, b2]
    tris = [[0, 1, 2], [1, 0, 3]]

    if extended:
        def extend(edge_from, edge_to, opposite):
            q1, q2 = verts[edge_from], verts[edge_to]
            u = (q2 - q1) / np.linalg.norm(q2 - q1)
            w = verts[opposite] - q1
            foot = q1 + (w @ u) * u
            verts.append(foot + 3.0 * (foot - verts[opposite]))
            # neighbor traverses the rim edge in the reverse direction
            tris.append([len(verts) - 1, edge_to, edge_from])

        extend(1, 2, 0)  # face 1, rim A+ -> B1
        extend(2, 0, 1)  # face 1, rim B1 -> A-
        extend(0, 3, 1)  # face 2, rim A- -> B2
        extend(3, 1, 0)  # face 2, rim B2 -> A+
    return TriangleMesh(np.asarray(verts), np.asarray(tris))

"""Resolution series of a base mesh: midpoint subdivision and decimation.

The benchmark needs the same shape at ~2x triangle-count steps. Subdivision
quadruples (each triangle splits in four); decimation collapses shortest
edges first under a manifold-preserving link condition.
"""

import heapq

import numpy as np

from .errors import DecimationFailure
from .mesh import TriangleMesh
from .shapes import _subdivide_tris


def subdivide(mesh):
    """One midpoint split: every triangle becomes four, mesh stays manifold."""
    v, t = _subdivide_tris(mesh.vertices, mesh.triangles)
    return TriangleMesh(v, t)


def decimate(mesh, target_triangles):
    """Shortest-edge-collapse decimation to approximately the target count.

    Collapses merge an edge to its midpoint, rejecting any collapse that
    would break the link condition (non-manifold result) or flip a surviving
    triangle's orientation. Stops within one collapse of the target.

    Raises
    ------
    DecimationFailure
        If no further safe collapse exists above the target count.
    """
    verts = [p.copy() for p in mesh.vertices]
    tri_verts = {i: list(map(int, mesh.triangles[i])) for i in range(mesh.n_triangles)}
    vert_tris = {}
    for t, vs in tri_verts.items():
        for v in vs:
            vert_tris.setdefault(v, set()).add(t)
    alive = len(tri_verts)
    version = {v: 0 for v in vert_tris}

    def neighbors(v):
        out = set()
        for t in vert_tris[v]:
            out.update(tri_verts[t])
        out.discard(v)
        return out

    def push_edges(heap, v):
        for u in neighbors(v):
            a, b = (v, u) if v < u else (u, v)
            d = float(np.linalg.norm(verts[a] - verts[b]))
            heapq.heappush(heap, (d, a, b, version[a], version[b]))

    heap = []
    for v in vert_tris:
        for u in neighbors(v):
            if v < u:
                d = float(np.linalg.norm(verts[v] - verts[u]))
                heapq.heappush(heap, (d, v, u, 0, 0))

    def try_collapse(a, b):
        nonlocal alive
        shared = vert_tris[a] & vert_tris[b]
        if not shared:
            return False
        # link condition: common neighbor vertices must be exactly the
        # opposite vertices of the shared triangles
        opposite = set()
        for t in shared:
            for v in tri_verts[t]:
                if v != a and v != b:
                    opposite.add(v)
        if neighbors(a) & neighbors(b) != opposite:
            return False
        mid = 0.5 * (verts[a] + verts[b])
        # no surviving triangle may flip or collapse
        for t in (vert_tris[a] | vert_tris[b]) - shared:
            vs = tri_verts[t]
            old = [verts[v] for v in vs]
            new = [mid if v in (a, b) else verts[v] for v in vs]
            n_old = np.cross(old[1] - old[0], old[2] - old[0])
            n_new = np.cross(new[1] - new[0], new[2] - new[0])
            if float(n_new @ n_new) < 1e-20 or float(n_old @ n_new) <= 0.0:
                return False
        # commit: b merges into a at the midpoint
        verts[a] = mid
        for t in shared:
            for v in tri_verts[t]:
                vert_tris[v].discard(t)
            del tri_verts[t]
        alive -= len(shared)
        for t in list(vert_tris[b]):
            tri_verts[t] = [a if v == b else v for v in tri_verts[t]]
            vert_tris[a].add(t)
        del vert_tris[b]
        del version[b]
        version[a] += 1
        return True

    while alive > target_triangles:
        progressed = False
        while heap:
            d, a, b, va, vb = heapq.heappop(heap)
            if a not in version or b not in version:
                continue
            if version[a] != va or version[b] != vb:
                continue
            if try_collapse(a, b):
                push_edges(heap, a)
                progressed = True
                break
        if not progressed:
            raise DecimationFailure(
                f"stuck at {alive} triangles (target {target_triangles})")

    remap = {}
    out_tris = []
    for vs in tri_verts.values():
        out_tris.append([remap.setdefault(v, len(remap)) for v in vs])
    out_verts = np.empty((len(remap), 3))
    for old, new in remap.items():
        out_verts[new] = verts[old]
    return TriangleMesh(out_verts, np.asarray(out_tris))


def generate_mesh_series(base, levels, mode="subdivide"):
    """Meshes at ~2x triangle steps: [base, level1, ...], largest last.

    mode "subdivide" quadruples per level (so ~4x steps); "decimate" halves
    repeatedly. The benchmark uses whichever direction brackets its range.
    """
    out = [base]
    current = base
    for _ in range(levels):
        if mode == "subdivide":
            current = subdivide(current)
        elif mode == "decimate":
            current = decimate(current, current.n_triangles // 2)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        out.append(current)
    if mode == "decimate":
        out.reverse()
    return out

"""Indexed triangle mesh with per-face normals and edge/vertex adjacency.

All geometry is in millimeters. A mesh is immutable after construction and
safe to share across threads.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeshError, NonManifoldError

# Triangles with area below this (mm^2) are dropped at load: they break
# closest-point region classification downstream.
EPS_AREA = 1e-12

# local edge k of a triangle runs vertex k -> vertex (k+1) % 3
_EDGE_VERTS = ((0, 1), (1, 2), (2, 0))


@dataclass
class ValidationReport:
    """Topology summary: counts that must be zero for constraint generation."""

    boundary_edges: int
    non_manifold_edges: int
    flipped_pairs: int

    def to_json(self):
        return {
            "boundary": self.boundary_edges,
            "nonManifold": self.non_manifold_edges,
            "flipped": self.flipped_pairs,
        }


class TriangleMesh:
    """Triangle surface with winding-derived normals and adjacency maps.

    Parameters
    ----------
    vertices : (n, 3) float array
    triangles : (m, 3) int array
        Vertex indices, counterclockwise when viewed from outside.
    drop_degenerate : bool
        Remove triangles with area < EPS_AREA (recorded in ``warnings``).
    """

    def __init__(self, vertices, triangles, drop_degenerate=True):
        self.vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        tris = np.ascontiguousarray(triangles, dtype=np.int32)
        if tris.size and (tris.min() < 0 or tris.max() >= len(self.vertices)):
            raise IndexError("triangle index out of range")
        self.warnings = []

        repeated = (
            (tris[:, 0] == tris[:, 1])
            | (tris[:, 1] == tris[:, 2])
            | (tris[:, 2] == tris[:, 0])
        )
        if np.any(repeated):
            self.warnings.append(f"dropped {int(repeated.sum())} triangles with repeated vertices")
            tris = tris[~repeated]

        if drop_degenerate and len(tris):
            areas = _areas(self.vertices, tris)
            bad = areas < EPS_AREA
            if np.any(bad):
                self.warnings.append(f"dropped {int(bad.sum())} degenerate triangles")
                tris = tris[~bad]

        if len(tris) == 0:
            raise DegenerateMeshError("no non-degenerate triangles")

        self.triangles = np.ascontiguousarray(tris)
        self.face_normals = _face_normals(self.vertices, self.triangles)
        self._build_adjacency()

    # -- adjacency ---------------------------------------------------------

    def _build_adjacency(self):
        m = len(self.triangles)
        edge_map = {}
        for t in range(m):
            tri = self.triangles[t]
            for e, (i, j) in enumerate(_EDGE_VERTS):
                a, b = int(tri[i]), int(tri[j])
                key = (a, b) if a < b else (b, a)
                edge_map.setdefault(key, []).append((t, e, a < b))
        self.edge_adjacency = {k: [t for t, _, _ in v] for k, v in edge_map.items()}
        self._edge_records = edge_map

        # neighbor across local edge e; -1 boundary, -2 non-manifold
        nbr = np.full((m, 3), -1, dtype=np.int32)
        for key, recs in edge_map.items():
            if len(recs) == 2:
                (t0, e0, _), (t1, e1, _) = recs
                nbr[t0, e0] = t1
                nbr[t1, e1] = t0
            elif len(recs) > 2:
                for t, e, _ in recs:
                    nbr[t, e] = -2
        self.neighbors = nbr

        incidence = {}
        for t in range(m):
            for v in self.triangles[t]:
                incidence.setdefault(int(v), []).append(t)
        self.vertex_incidence = incidence

    # -- queries -----------------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def triangle_vertices(self, t):
        return self.vertices[self.triangles[t]]

    def packed_triangles(self):
        """(m, 3, 3) array of triangle vertex coordinates."""
        return np.ascontiguousarray(self.vertices[self.triangles])

    def edge_vertex_ids(self, t, local_edge):
        i, j = _EDGE_VERTS[local_edge]
        tri = self.triangles[t]
        return int(tri[i]), int(tri[j])

    def adjacent_triangles(self, t, local_edge):
        """Triangles sharing edge ``local_edge`` of triangle ``t`` (0 or 1)."""
        n = int(self.neighbors[t, local_edge])
        if n == -2:
            a, b = self.edge_vertex_ids(t, local_edge)
            key = (a, b) if a < b else (b, a)
            raise NonManifoldError(key, self.edge_adjacency[key])
        return [] if n == -1 else [n]

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def bbox_diagonal(self):
        d = getattr(self, "_bbox_diag", None)
        if d is None:
            lo, hi = self.bounds()
            d = self._bbox_diag = float(np.linalg.norm(hi - lo))
        return d

    def boundary_edge_count(self):
        return sum(1 for v in self.edge_adjacency.values() if len(v) == 1)

    def non_manifold_edges(self):
        return [k for k, v in self.edge_adjacency.items() if len(v) > 2]

    def is_closed(self):
        return self.boundary_edge_count() == 0 and not self.non_manifold_edges()


def _areas(vertices, triangles):
    v = vertices[triangles]
    cross = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    return 0.5 * np.linalg.norm(cross, axis=1)


def _face_normals(vertices, triangles):
    v = vertices[triangles]
    cross = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
    norms = np.linalg.norm(cross, axis=1, keepdims=True)
    return np.ascontiguousarray(cross / norms)


def validate(mesh):
    """Deterministic topology report (boundary / non-manifold / flipped).

    A mesh fed to constraint generation must report zero non-manifold edges;
    flipped pairs indicate inconsistent winding across a shared edge.
    """
    boundary = 0
    non_manifold = 0
    flipped = 0
    for recs in mesh._edge_records.values():
        if len(recs) == 1:
            boundary += 1
        elif len(recs) > 2:
            non_manifold += 1
        else:
            # Consistent winding traverses a shared edge in opposite
            # directions in its two triangles.
            (_, _, fwd0), (_, _, fwd1) = recs
            if fwd0 == fwd1:
                flipped += 1
    return ValidationReport(boundary, non_manifold, flipped)

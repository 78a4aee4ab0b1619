"""Bounding-volume tree split along principal directions of the geometry.

Each node carries an oriented frame (eigenbasis of its triangle-centroid
covariance) and an axis-aligned box in that frame, so boxes hug elongated
patches much tighter than world-axis boxes. Built once per mesh; queried
every tick with a small sphere around the tool.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

LEAF_CAPACITY = 8


@dataclass
class MotionSphere:
    """Ball the tool can reach within one tick: center (3,) and radius (mm)."""

    center: np.ndarray
    radius: float


@dataclass
class SphereHits:
    """Triangles intersecting a motion sphere, ascending by triangle id.

    Parallel arrays: ``ids`` (int32), ``points`` (k, 3) closest points,
    ``regions``/``features`` (int32 classification codes), ``distances``.
    """

    ids: np.ndarray
    points: np.ndarray
    regions: np.ndarray
    features: np.ndarray
    distances: np.ndarray

    def __len__(self):
        return len(self.ids)


class PDTree:
    """Principal-direction tree over a mesh's triangles.

    Construction is deterministic: eigenvector signs are canonicalized and
    the median split uses a stable sort, so identical meshes yield identical
    trees.

    Parameters
    ----------
    mesh : TriangleMesh
    leaf_capacity : int
        Maximum triangles per leaf (default 8).
    """

    def __init__(self, mesh, leaf_capacity=LEAF_CAPACITY):
        if leaf_capacity < 1:
            raise ValueError("leaf_capacity must be >= 1")
        self.mesh = mesh
        self.leaf_capacity = leaf_capacity
        packed = mesh.packed_triangles()
        centroids = packed.mean(axis=1)

        lo, hi = mesh.bounds()
        self._pad = max(1e-12, 1e-12 * float(np.linalg.norm(hi - lo)))

        # flat node arrays, appended during the recursive build
        self._rot = []
        self._lo = []
        self._hi = []
        self._left = []
        self._right = []
        self._start = []
        self._count = []
        self._order = np.arange(len(packed), dtype=np.int32)
        self._packed_all = packed
        self._centroids = centroids
        self._next_slot = 0

        self._build(np.arange(len(packed), dtype=np.int64), 0)

        self.rot = np.ascontiguousarray(np.stack(self._rot))
        self.lo = np.ascontiguousarray(np.stack(self._lo))
        self.hi = np.ascontiguousarray(np.stack(self._hi))
        self.left = np.asarray(self._left, dtype=np.int32)
        self.right = np.asarray(self._right, dtype=np.int32)
        self.start = np.asarray(self._start, dtype=np.int32)
        self.count = np.asarray(self._count, dtype=np.int32)
        # triangle vertices permuted into leaf order for contiguous batches
        self.tv = np.ascontiguousarray(self._packed_all[self._order])
        del self._rot, self._lo, self._hi, self._left, self._right
        del self._start, self._count, self._packed_all, self._centroids

    @property
    def n_nodes(self):
        return len(self.left)

    def _frame(self, idx):
        """Canonical eigenbasis (rows, principal first) of centroid spread."""
        pts = self._centroids[idx]
        mean = pts.mean(axis=0)
        x = pts - mean
        cov = x.T @ x
        _, vecs = np.linalg.eigh(cov)
        rot = vecs.T[::-1].copy()  # eigh sorts ascending; principal row first
        for r in rot:
            j = int(np.argmax(np.abs(r)))
            if r[j] < 0:
                r *= -1.0
        return rot

    def _build(self, idx, slot):
        """Create node ``slot`` over triangles ``idx`` (indices into order)."""
        rot = self._frame(idx)
        verts = self._packed_all[idx].reshape(-1, 3) @ rot.T
        self._rot.append(rot)
        self._lo.append(verts.min(axis=0) - self._pad)
        self._hi.append(verts.max(axis=0) + self._pad)

        if len(idx) <= self.leaf_capacity:
            self._left.append(-1)
            self._right.append(-1)
            self._start.append(self._next_slot)
            self._count.append(len(idx))
            self._order[self._next_slot : self._next_slot + len(idx)] = np.sort(idx)
            self._next_slot += len(idx)
            return

        proj = self._centroids[idx] @ rot[0]
        perm = np.argsort(proj, kind="stable")
        half = len(idx) // 2
        left_idx = idx[perm[:half]]
        right_idx = idx[perm[half:]]

        me = len(self._left)
        self._left.append(0)  # patched below
        self._right.append(0)
        self._start.append(0)
        self._count.append(0)

        self._left[me] = len(self._left)
        self._build(left_idx, self._left[me])
        self._right[me] = len(self._left)
        self._build(right_idx, self._right[me])

    def query_sphere(self, sphere):
        """Triangles whose closest point lies within the sphere.

        Exactly equivalent to brute force over every triangle; results are
        sorted by ascending triangle id.
        """
        c = np.asarray(sphere.center, dtype=np.float64)
        ids, pts, regs, feats, dists = kernels.sphere_query(
            self.rot, self.lo, self.hi, self.left, self.right,
            self.start, self.count, self.tv, self.order,
            float(c[0]), float(c[1]), float(c[2]), float(sphere.radius),
        )
        if len(ids) > 1:
            perm = np.argsort(ids, kind="stable")
            ids, pts = ids[perm], pts[perm]
            regs, feats, dists = regs[perm], feats[perm], dists[perm]
        return SphereHits(ids, pts, regs, feats, dists)

    @property
    def order(self):
        return self._order


def build_pdtree(mesh, leaf_capacity=LEAF_CAPACITY):
    """Convenience constructor mirroring PDTree(mesh, leaf_capacity)."""
    return PDTree(mesh, leaf_capacity)


def query_sphere(tree, sphere):
    return tree.query_sphere(sphere)

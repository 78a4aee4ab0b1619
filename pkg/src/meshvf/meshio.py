"""Mesh file I/O: binary/ASCII STL, Wavefront OBJ, ASCII PLY.

Loaders weld duplicate vertices (STL stores each triangle independently)
and drop degenerate faces, then hand off to TriangleMesh.
"""

import os
import struct

import numpy as np

from .errors import NonManifoldError, ParseError
from .mesh import TriangleMesh

# Welding tolerance as a fraction of the bounding-box diagonal.
WELD_FRACTION = 1e-6


def load_mesh(path):
    """Load a mesh file, dispatching on extension (.stl/.obj/.ply).

    Raises NonManifoldError if any edge has three or more incident
    triangles — such meshes cannot feed constraint generation.
    """
    ext = os.path.splitext(path)[1].lower()
    if ext == ".stl":
        mesh = load_stl(path)
    elif ext == ".obj":
        mesh = load_obj(path)
    elif ext == ".ply":
        mesh = load_ply(path)
    else:
        raise ParseError(f"unsupported mesh format: {ext!r}")
    bad = mesh.non_manifold_edges()
    if bad:
        raise NonManifoldError(bad[0], mesh.edge_adjacency[bad[0]])
    return mesh


# -- STL -------------------------------------------------------------------


def load_stl(path):
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 84:
        # Could still be a short ASCII file.
        if data.lstrip().startswith(b"solid"):
            return _parse_ascii_stl(data.decode("ascii", "replace"))
        raise ParseError("STL file too short")
    # Binary detection: header says little, trust the triangle count.
    n = struct.unpack_from("<I", data, 80)[0]
    if len(data) == 84 + 50 * n:
        return _parse_binary_stl(data, n)
    if data.lstrip().startswith(b"solid"):
        return _parse_ascii_stl(data.decode("ascii", "replace"))
    raise ParseError("STL size does not match declared triangle count")


def _parse_binary_stl(data, n):
    if n == 0:
        raise ParseError("binary STL declares zero triangles")
    raw = np.frombuffer(data, dtype=np.uint8, count=50 * n, offset=84)
    rec = raw.reshape(n, 50)[:, :48].copy().view("<f4").reshape(n, 12)
    corners = rec[:, 3:12].astype(np.float64).reshape(n * 3, 3)
    return _weld(corners)


def _parse_ascii_stl(text):
    corners = []
    for line in text.splitlines():
        parts = line.split()
        if len(parts) == 4 and parts[0] == "vertex":
            try:
                corners.append([float(parts[1]), float(parts[2]), float(parts[3])])
            except ValueError as e:
                raise ParseError(f"bad vertex line: {line.strip()!r}") from e
    if not corners or len(corners) % 3:
        raise ParseError("ASCII STL vertex count is not a multiple of 3")
    return _weld(np.asarray(corners, dtype=np.float64))


def _weld(corners):
    """Merge coincident corners into shared vertices.

    Quantizes to a grid scaled off the bounding box; identical STL corner
    triples land in the same cell, so exact duplicates always merge.
    """
    lo = corners.min(axis=0)
    hi = corners.max(axis=0)
    diag = float(np.linalg.norm(hi - lo))
    tol = WELD_FRACTION * diag if diag > 0 else 1e-12
    keys = np.round((corners - lo) / tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    vertices = corners[first]
    triangles = inverse.reshape(-1, 3)
    return TriangleMesh(vertices, triangles)


def save_stl(mesh, path):
    """Write binary STL (80-byte header, float32 normals + vertices)."""
    tv = mesh.packed_triangles().astype(np.float32)
    nrm = mesh.face_normals.astype(np.float32)
    m = len(tv)
    rec = np.zeros((m, 50), dtype=np.uint8)
    f32 = rec[:, :48].view("<f4").reshape(m, 12)
    f32[:, 0:3] = nrm
    f32[:, 3:12] = tv.reshape(m, 9)
    with open(path, "wb") as f:
        f.write(b"meshvf binary stl".ljust(80, b" "))
        f.write(struct.pack("<I", m))
        f.write(rec.tobytes())


def mesh_to_stl_bytes(mesh):
    """Binary STL as bytes (for serving over HTTP)."""
    tv = mesh.packed_triangles().astype(np.float32)
    nrm = mesh.face_normals.astype(np.float32)
    m = len(tv)
    rec = np.zeros((m, 50), dtype=np.uint8)
    f32 = rec[:, :48].view("<f4").reshape(m, 12)
    f32[:, 0:3] = nrm
    f32[:, 3:12] = tv.reshape(m, 9)
    return b"meshvf binary stl".ljust(80, b" ") + struct.pack("<I", m) + rec.tobytes()


# -- OBJ -------------------------------------------------------------------


def load_obj(path):
    vertices = []
    faces = []
    with open(path, "r", errors="replace") as f:
        for ln, line in enumerate(f, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                if len(parts) < 4:
                    raise ParseError(f"line {ln}: short vertex")
                vertices.append([float(parts[1]), float(parts[2]), float(parts[3])])
            elif parts[0] == "f":
                idx = []
                for tok in parts[1:]:
                    s = tok.split("/")[0]
                    i = int(s)
                    # OBJ negative indices count back from the newest vertex
                    idx.append(i - 1 if i > 0 else len(vertices) + i)
                if len(idx) < 3:
                    raise ParseError(f"line {ln}: face with <3 vertices")
                # fan-triangulate polygons
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[k], idx[k + 1]])
    if not vertices or not faces:
        raise ParseError("OBJ contains no usable geometry")
    return TriangleMesh(np.asarray(vertices, dtype=np.float64), np.asarray(faces))


# -- PLY (ASCII only) ------------------------------------------------------


def load_ply(path):
    with open(path, "r", errors="replace") as f:
        if f.readline().strip() != "ply":
            raise ParseError("missing ply magic")
        fmt = f.readline().split()
        if len(fmt) < 2 or fmt[1] != "ascii":
            raise ParseError("only ASCII PLY is supported")
        n_vert = n_face = 0
        current = None
        vert_props = []
        while True:
            line = f.readline()
            if not line:
                raise ParseError("unterminated PLY header")
            parts = line.split()
            if not parts or parts[0] == "comment":
                continue
            if parts[0] == "element":
                current = parts[1]
                if current == "vertex":
                    n_vert = int(parts[2])
                elif current == "face":
                    n_face = int(parts[2])
            elif parts[0] == "property" and current == "vertex":
                vert_props.append(parts[-1])
            elif parts[0] == "end_header":
                break
        try:
            ix, iy, iz = vert_props.index("x"), vert_props.index("y"), vert_props.index("z")
        except ValueError as e:
            raise ParseError("PLY vertex element lacks x/y/z") from e

        vertices = np.empty((n_vert, 3), dtype=np.float64)
        for i in range(n_vert):
            vals = f.readline().split()
            vertices[i] = (float(vals[ix]), float(vals[iy]), float(vals[iz]))
        faces = []
        for _ in range(n_face):
            vals = f.readline().split()
            k = int(vals[0])
            idx = [int(v) for v in vals[1 : 1 + k]]
            for j in range(1, k - 1):
                faces.append([idx[0], idx[j], idx[j + 1]])
    if not faces:
        raise ParseError("PLY contains no faces")
    return TriangleMesh(vertices, np.asarray(faces))

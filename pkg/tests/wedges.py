"""Analytic twin of the two-face wedge, shared by the constraint unit tests
and the acceptance gate.

Everything here is derived independently of the production code: closest
points come from the candidate-minimum oracle, classification from raw sign
tests against the analytic face frames, and the expected constraint rows
from the local decision table (face plane / rounded edge plane / valley
planes / open-edge fallback).
"""

import math

import numpy as np

from meshvf import oracle, shapes
from meshvf.pdtree import PDTree

L = 10.0          # wedge face length
H = 50.0          # wedge half-height; probes sit at y = H/2, far from A+/A-
Y = 0.5 * H
RQ = 3.0 * L      # query radius: both faces and their rims always in reach
SWEEP = range(10, 180, 10)

# A probe is only scored when every classification margin clears this, so
# grid angles that land a probe on a region boundary are skipped, not
# misjudged.
MARGIN = 1e-3 * L


def frames(deg, kind):
    """Face directions d1/d2 and outward normals n1/n2 of the wedge."""
    a = math.radians(deg) / 2.0
    zs = 1.0 if kind == "concave" else -1.0
    d1 = np.array([-math.sin(a), 0.0, zs * math.cos(a)])
    d2 = np.array([math.sin(a), 0.0, zs * math.cos(a)])
    if kind == "concave":
        n1 = np.array([math.cos(a), 0.0, math.sin(a)])
        n2 = np.array([-math.cos(a), 0.0, math.sin(a)])
    else:
        n1 = np.array([-math.cos(a), 0.0, math.sin(a)])
        n2 = np.array([math.cos(a), 0.0, math.sin(a)])
    return d1, d2, n1, n2


def _unit_normal(a, b, c):
    n = np.cross(b - a, c - a)
    return n / np.linalg.norm(n)


def seg_dist(q, a, b):
    d = b - a
    t = float((q - a) @ d) / float(d @ d)
    return float(np.linalg.norm(q - (a + min(max(t, 0.0), 1.0) * d)))


class Wedge:
    """Analytic twin of shapes.wedge_pair used to classify probe positions."""

    def __init__(self, deg, kind):
        self.kind = kind
        self.d1, self.d2, self.n1, self.n2 = frames(deg, kind)
        self.am = np.array([0.0, -H, 0.0])
        self.ap = np.array([0.0, +H, 0.0])
        self.b1 = L * self.d1
        self.b2 = L * self.d2
        self.faces = [
            (self.am, self.ap, self.b1),
            (self.ap, self.am, self.b2),
        ]
        self.normals = [self.n1, self.n2]
        self.rims = [
            [(self.ap, self.b1), (self.b1, self.am)],
            [(self.am, self.b2), (self.b2, self.ap)],
        ]
        self.mesh = shapes.wedge_pair(deg, kind, face_len=L, half_height=H)
        self.tree = PDTree(self.mesh)
        assert np.allclose(self.mesh.vertices,
                           [self.am, self.ap, self.b1, self.b2], atol=1e-12)
        for i in range(2):
            assert np.allclose(_unit_normal(*self.faces[i]), self.normals[i],
                               atol=1e-12)
        # independent convexity check: the other face's far vertex against
        # this face's plane
        s = float(self.n1 @ (self.b2 - self.am))
        assert (s < -1e-9) if kind == "convex" else (s > 1e-9)

    def face_state(self, p, i):
        cp, dist = oracle.closest_point_candidates(p, *self.faces[i])
        on_shared = math.hypot(cp[0], cp[2]) <= 1e-7
        on_rim = (not on_shared) and any(
            seg_dist(cp, a, b) <= 1e-7 for a, b in self.rims[i])
        side = float(self.normals[i] @ (p - cp))
        return {
            "cp": cp, "dist": dist, "side": side,
            "shared": on_shared, "rim": on_rim,
            "interior": not on_shared and not on_rim,
        }

    def probes(self):
        """Tool placements aimed at the enumerated sub-cases (classified by
        face_state afterwards; angles where a placement is degenerate are
        dropped by the margin check)."""
        d1, d2, n1, n2 = self.d1, self.d2, self.n1, self.n2
        up = np.array([0.0, 0.0, 1.0])
        if self.kind == "convex":
            pts = [
                0.25 * d2 + 0.06 * n2,   # over face 2, close in
                0.30 * d2 + 0.20 * n2,
                0.12 * d2 + 0.50 * n2,   # high over face 2
                0.35 * up + np.array([0.02, 0.0, 0.0]),  # normal cone
            ]
        else:
            a = math.acos(float(d2 @ up))
            c2a, s2a = math.cos(2 * a), math.sin(2 * a)
            pts = [
                0.35 * up,                # valley floor
                0.30 * d2 + 0.04 * n2,    # tucked behind the shared edge
                0.62 * d2 + 0.05 * n2,    # beyond face 2's rim
            ]
            if s2a > 1e-9:
                s = (0.62 - 0.30 * c2a) / s2a
                if 0.1 <= s <= 2.5:
                    pts.append(0.30 * d1 + s * n1)   # high and far over face 1
            if math.cos(a) > 1e-9 and 0.62 / math.cos(a) <= 2.5:
                pts.append((0.62 / math.cos(a)) * up)  # beyond both rims
        return [L * p + np.array([0.0, Y, 0.0]) for p in pts]

    def unambiguous(self, states):
        for st in states:
            if abs(st["side"]) < MARGIN and not st["shared"]:
                return False
            if st["rim"] or st["interior"]:
                # clear of the shared edge and of the rim transition
                if math.hypot(st["cp"][0], st["cp"][2]) < MARGIN:
                    return False
                rim_d = min(seg_dist(st["cp"], a, b)
                            for a, b in self.rims[0] + self.rims[1])
                if st["interior"] and rim_d < MARGIN:
                    return False
            if abs(st["dist"] - RQ) < MARGIN:
                return False
            assert abs(st["cp"][1]) < H - 1.0   # never near the A+/A- corners
        gap = float(np.linalg.norm(states[0]["cp"] - states[1]["cp"]))
        return gap <= 1e-8 or gap >= MARGIN

    def label(self, states):
        """Sub-case name per the enumeration, or None if out of catalogue."""
        s0, s1 = states
        coinc = np.linalg.norm(s0["cp"] - s1["cp"]) <= 1e-8
        ipos = [s["interior"] and s["side"] > 0 for s in states]
        ineg = [s["interior"] and s["side"] < 0 for s in states]
        shared = [s["shared"] for s in states]
        rim = [s["rim"] for s in states]
        if self.kind == "convex":
            if all(shared) and coinc:
                return "c"
            if (ipos[0] and ineg[1]) or (ipos[1] and ineg[0]):
                return "a"
            if (ipos[0] and shared[1]) or (ipos[1] and shared[0]):
                return "b"
            return None
        spos = [s["shared"] and s["side"] > 0 for s in states]
        if all(ipos):
            return "a"
        if (ipos[0] and spos[1]) or (ipos[1] and spos[0]):
            return "b"
        if (spos[0] and rim[1]) or (spos[1] and rim[0]):
            return "c"
        if (ipos[0] and rim[1]) or (ipos[1] and rim[0]):
            return "d"
        if all(rim):
            return "e"
        return None

    def expected_rows(self, p, states):
        """(tag, normal, point, triangle) rows the decision table mandates,
        deduplicated like the generator output."""
        rows = []
        for i, st in enumerate(states):
            other = states[1 - i]
            if st["dist"] > RQ:
                continue
            if st["interior"]:
                if st["side"] >= 0:
                    rows.append(("C1", self.normals[i], st["cp"], i))
            elif st["shared"]:
                coinc = np.linalg.norm(st["cp"] - other["cp"]) <= 1e-8
                if self.kind == "convex":
                    if coinc:
                        d = float(np.linalg.norm(p - st["cp"]))
                        rows.append(("C2", (p - st["cp"]) / d, st["cp"], i))
                elif st["side"] >= 0:
                    rows.append(("C3", self.normals[i], st["cp"], i))
            elif st["rim"] and st["side"] >= 0:
                rows.append(("Boundary", self.normals[i], st["cp"], i))
        out = []
        for row in rows:
            if not any(np.allclose(row[1], r[1], atol=1e-9)
                       and np.allclose(row[2], r[2], atol=1e-9) for r in out):
                out.append(row)
        return out


def assert_rows(cset, expected):
    got = cset.constraints
    assert len(got) == len(expected)
    for c, (tag, n, pt, tri) in zip(got, expected):
        assert c.condition.value == tag
        assert c.source_triangle == tri
        np.testing.assert_allclose(c.normal, n, atol=1e-9, rtol=0)
        np.testing.assert_allclose(c.point, pt, atol=1e-9, rtol=0)
        assert abs(np.linalg.norm(c.normal) - 1.0) <= 1e-9

"""Scripted scenarios driving the control loop against test meshes.

Five desired-tip generators cover the interesting failure modes: pushing
straight into the surface, sliding along it, orbiting the whole object
(wrapping convex edges), random walking near the surface, and waypoint
following. Runs are verified against the brute-force signed-distance
oracle and logged for the trajectory metrics.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .control import ControlLoop
from .errors import PenetrationDetected, StartInsideMeshError
from .oracle import (  # noqa: F401 (re-export)
    brute_closest_distance,
    inside_batch,
    signed_distance_batch,
    signed_distance_oracle,
)

GENERATORS = ("PushNormal", "SlideTangent", "OrbitEdge", "RandomWalk", "Waypoints")


@dataclass
class ScriptedScenario:
    mesh_id: str
    start: np.ndarray
    generator: str
    ticks: int
    step_bound: float
    seed: int = 0
    waypoints: list = field(default_factory=list)
    clearance: float = 0.0  # OrbitEdge only; 0 means 2 x step_bound


class TrajectoryLog:
    """Per-tick record of a run, stored as parallel arrays.

    Columns: time (s), desired tip, proxy, constrained position, active
    constraint count, solver status code (0 = Optimal, 1 = FallbackZero).
    """

    def __init__(self, t, desired, proxy, constrained, active_count, status,
                 tick_rate):
        self.t = t
        self.desired = desired
        self.proxy = proxy
        self.constrained = constrained
        self.active_count = active_count
        self.status = status
        self.tick_rate = tick_rate

    def __len__(self):
        return len(self.t)

    def to_jsonl(self, path):
        with open(path, "w") as f:
            for k in range(len(self.t)):
                f.write(json.dumps({
                    "t": float(self.t[k]),
                    "desired": [float(v) for v in self.desired[k]],
                    "proxy": [float(v) for v in self.proxy[k]],
                    "constrained": [float(v) for v in self.constrained[k]],
                    "activeCount": int(self.active_count[k]),
                    "solveStatus": "Optimal" if self.status[k] == 0 else "FallbackZero",
                }) + "\n")

    @classmethod
    def from_jsonl(cls, path):
        rows = []
        with open(path) as f:
            for line in f:
                line = line.strip()
                if line:
                    rows.append(json.loads(line))
        t = np.array([r["t"] for r in rows])
        rate = 1.0 / (t[1] - t[0]) if len(t) > 1 else 1.0
        return cls(
            t,
            np.array([r["desired"] for r in rows]),
            np.array([r["proxy"] for r in rows]),
            np.array([r["constrained"] for r in rows]),
            np.array([r["activeCount"] for r in rows], dtype=np.int32),
            np.array([0 if r["solveStatus"] == "Optimal" else 1 for r in rows],
                     dtype=np.int8),
            rate,
        )


def _orthonormal(u):
    """Unit vector perpendicular to u, horizontal whenever possible.

    Keeps tangential orbits in the bbox midplane (constant clearance around
    a solid of revolution) instead of sweeping over the poles.
    """
    v = np.cross(np.array([0.0, 0.0, 1.0]), u)
    n = np.linalg.norm(v)
    if n < 1e-9:
        return np.array([1.0, 0.0, 0.0])
    return v / n


def _orbit_contour(mesh, clearance):
    """Closed rounded-rectangle loop around the bbox cross-section at z-mid.

    Straight runs at ``clearance`` off each side, quarter-circle arcs of
    radius ``clearance`` around the vertical edges — so a cube is orbited at
    constant surface clearance through four convex-edge wraps.
    """
    lo, hi = mesh.bounds()
    zc = 0.5 * (lo[2] + hi[2])
    x0, x1, y0, y1 = lo[0], hi[0], lo[1], hi[1]
    c = clearance
    pts = []
    corners = [
        ((x1, y1), 0.0), ((x0, y1), 0.5 * np.pi),
        ((x0, y0), np.pi), ((x1, y0), 1.5 * np.pi),
    ]
    n_arc = 24
    for (cx, cy), a0 in corners:
        for k in range(n_arc + 1):
            a = a0 + 0.5 * np.pi * k / n_arc
            pts.append((cx + c * np.cos(a), cy + c * np.sin(a), zc))
    pts.append(pts[0])
    return np.asarray(pts)


def _polyline_walker(points, step, closed=True):
    """Yield positions advancing ``step`` of arc length per tick."""
    pts = np.asarray(points, dtype=np.float64)
    seg = np.diff(pts, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    total = float(seg_len.sum())
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])

    def at(s):
        if closed:
            s = s % total
        else:
            s = min(max(s, 0.0), total)
        i = int(np.searchsorted(cum, s, side="right") - 1)
        i = min(i, len(seg) - 1)
        f = (s - cum[i]) / seg_len[i] if seg_len[i] > 0 else 0.0
        return pts[i] + f * seg[i]

    k = 0
    while True:
        yield at(k * step)
        k += 1


def make_generator(scenario, mesh):
    """Desired-tip sequence for a scenario: a function tick -> 3D point."""
    start = np.asarray(scenario.start, dtype=np.float64)
    sb = scenario.step_bound
    lo, hi = mesh.bounds()
    center = 0.5 * (lo + hi)
    name = scenario.generator

    if name == "PushNormal":
        into = center - start
        n = np.linalg.norm(into)
        into = into / n if n > 0 else np.array([0.0, 0.0, -1.0])

        def gen(k):
            return start + min(k, scenario.ticks) * sb * into

    elif name == "SlideTangent":
        radial = start - center
        rho = float(np.linalg.norm(radial))
        u = radial / rho
        v = _orthonormal(u)

        def gen(k):
            theta = k * sb / rho
            return center + rho * (np.cos(theta) * u + np.sin(theta) * v)

    elif name == "OrbitEdge":
        clearance = scenario.clearance if scenario.clearance > 0 else 2.0 * sb
        walker = _polyline_walker(_orbit_contour(mesh, clearance), sb)
        cache = []

        def gen(k):
            while len(cache) <= k:
                cache.append(next(walker))
            return cache[k]

    elif name == "RandomWalk":
        rng = np.random.default_rng(scenario.seed)
        diag = float(np.linalg.norm(hi - lo))
        # precompute the whole walk so replay is trivially identical
        pos = start.copy()
        path = [pos.copy()]
        for _ in range(scenario.ticks):
            step = rng.normal(size=3)
            step /= np.linalg.norm(step)
            pull = center - pos
            pn = np.linalg.norm(pull)
            if pn > 0.9 * diag:  # keep the walk near the object
                step = 0.4 * step + 0.6 * pull / pn
                step /= np.linalg.norm(step)
            pos = pos + sb * step
            path.append(pos.copy())

        def gen(k):
            return path[min(k, len(path) - 1)]

    elif name == "Waypoints":
        wps = scenario.waypoints if len(scenario.waypoints) else [start, center]
        walker = _polyline_walker(np.asarray(wps), sb, closed=False)
        cache = []

        def gen(k):
            while len(cache) <= k:
                cache.append(next(walker))
            return cache[k]

    else:
        raise ValueError(f"unknown generator {name!r}")
    return gen


def run_scenario(mesh, tree, scenario, r, tick_rate=1000.0, verify=True):
    """Drive the control loop through a scenario; verify non-penetration.

    The oracle check runs on the whole trajectory after the loop (it is
    O(triangles) per sample and must not perturb the timing-sensitive code
    path). Only closed meshes have a defined inside, so ``verify`` is
    ignored for open ones.

    Raises
    ------
    StartInsideMeshError
        If the start position is inside the mesh.
    PenetrationDetected
        If any constrained sample is inside beyond tolerance.
    """
    start = np.asarray(scenario.start, dtype=np.float64)
    check = verify and mesh.is_closed()
    if check and signed_distance_oracle(mesh, start) < 0:
        raise StartInsideMeshError(f"scenario start {start.tolist()} is inside the mesh")

    if scenario.step_bound > r:
        raise ValueError("step_bound exceeds the motion-sphere radius")

    gen = make_generator(scenario, mesh)
    loop = ControlLoop(mesh, tree, start, r)

    n = scenario.ticks
    constrained = np.empty((n, 3))
    proxy = np.empty((n, 3))
    desired = np.empty((n, 3))
    active = np.empty(n, dtype=np.int32)
    status = np.empty(n, dtype=np.int8)
    for k in range(n):
        tip = gen(k)
        res = loop.step(tip)
        desired[k] = tip
        constrained[k] = res.constrained
        proxy[k] = res.proxy
        active[k] = len(res.constraint_set)
        status[k] = 0 if res.solution.status.value == "Optimal" else 1

    log = TrajectoryLog(np.arange(n) / tick_rate, desired, proxy, constrained,
                        active, status, tick_rate)

    if check:
        eps_pen = 1e-6 * mesh.bbox_diagonal()
        # parity first: outside samples have sd >= 0 and need no distance;
        # only offending samples get the full closest-point measurement
        inside = inside_batch(mesh, constrained)
        if np.any(inside):
            depths = brute_closest_distance(mesh, constrained[inside])
            worst = int(np.argmax(depths))
            if depths[worst] > eps_pen:
                tick = int(np.nonzero(inside)[0][worst])
                raise PenetrationDetected(tick, -float(depths[worst]))
    return log

"""Control-loop throughput versus mesh size.

Each tick is timed end-to-end (step clamp, tree query, constraint
generation, solve, integration) with the three dominant phases recorded
separately. The standardized trajectory is a tangential orbit hugging the
surface at 0.2 x tool radius — worst realistic case, since the query
returns intersected triangles on every tick.
"""

import csv
import platform
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .constraints import generate_constraints
from .control import clamp_step
from .meshio import load_mesh
from .pdtree import MotionSphere, PDTree
from .qp import ActiveSetSolver, MotionProblem
from .sim import ScriptedScenario, make_generator

CSV_FIELDS = ("triangleCount", "vertexCount", "meanLoopHz", "p99LoopHz",
              "queryNs", "genNs", "solveNs", "iterations", "hardwareTag")


@dataclass
class BenchRecord:
    """One mesh's timing summary. Phase times are mean nanoseconds per tick;
    their sum is at most the total loop time (remainder is loop overhead)."""

    triangle_count: int
    vertex_count: int
    mean_loop_hz: float
    p99_loop_hz: float
    query_ns: float
    gen_ns: float
    solve_ns: float
    iterations: float
    hardware_tag: str

    def row(self):
        return {
            "triangleCount": self.triangle_count,
            "vertexCount": self.vertex_count,
            "meanLoopHz": f"{self.mean_loop_hz:.3f}",
            "p99LoopHz": f"{self.p99_loop_hz:.3f}",
            "queryNs": f"{self.query_ns:.1f}",
            "genNs": f"{self.gen_ns:.1f}",
            "solveNs": f"{self.solve_ns:.1f}",
            "iterations": f"{self.iterations:.3f}",
            "hardwareTag": self.hardware_tag,
        }


def default_hardware_tag():
    cpu = platform.processor() or platform.machine() or "cpu"
    return f"{platform.system()}/{cpu}/{kernels.BACKEND}"


def surface_orbit(mesh, radius, ticks, step_bound=None):
    """Standard benchmark trajectory: circle in the bbox midplane, starting
    0.2 x radius off the +x extreme of the surface."""
    lo, hi = mesh.bounds()
    center = 0.5 * (lo + hi)
    start = np.array([hi[0] + 0.2 * radius, center[1], center[2]])
    return ScriptedScenario(
        mesh_id="bench", start=start, generator="SlideTangent",
        ticks=ticks, step_bound=step_bound if step_bound else 0.5 * radius)


def _time_mesh(mesh, scenario, radius, warmup, measured, tag):
    tree = PDTree(mesh)
    gen = make_generator(scenario, mesh)
    solver = ActiveSetSolver()
    x = np.asarray(scenario.start, dtype=np.float64).copy()

    total = np.empty(measured)
    q_ns = np.empty(measured)
    g_ns = np.empty(measured)
    s_ns = np.empty(measured)
    iters = np.empty(measured)
    clock = time.perf_counter_ns

    for k in range(warmup + measured):
        tip = gen(k)
        t0 = clock()
        dxd = clamp_step(tip - x, radius)
        t1 = clock()
        hits = tree.query_sphere(MotionSphere(x, radius))
        t2 = clock()
        cset = generate_constraints(mesh, tree, x, radius, tick=k, hits=hits)
        t3 = clock()
        keys = list(zip(cset.triangles.tolist(), cset.codes.tolist()))
        sol = solver.solve(MotionProblem(dxd, cset.rows()), keys=keys)
        t4 = clock()
        x = x + sol.cartesian_increment
        t5 = clock()
        if k >= warmup:
            j = k - warmup
            total[j] = t5 - t0
            q_ns[j] = t2 - t1
            g_ns[j] = t3 - t2
            s_ns[j] = t4 - t3
            iters[j] = sol.iterations

    return BenchRecord(
        triangle_count=mesh.n_triangles,
        vertex_count=mesh.n_vertices,
        mean_loop_hz=1e9 / float(total.mean()),
        p99_loop_hz=1e9 / float(np.percentile(total, 99)),
        query_ns=float(q_ns.mean()),
        gen_ns=float(g_ns.mean()),
        solve_ns=float(s_ns.mean()),
        iterations=float(iters.mean()),
        hardware_tag=tag,
    )


def run_benchmark(mesh_series, trajectory=None, warmup_ticks=200,
                  measured_ticks=1000, radius=None, backends=None,
                  csv_path=None, svg_path=None):
    """Time the full loop on each mesh of a resolution series.

    ``mesh_series`` holds file paths or loaded meshes of one shape at
    different resolutions. A single trajectory (default: ``surface_orbit``
    of the first mesh) is replayed on every level so records are
    comparable. ``backends`` optionally lists kernel backends to measure
    side by side; the active one is encoded in hardwareTag.
    """
    meshes = [m if hasattr(m, "triangles") else load_mesh(m) for m in mesh_series]
    if trajectory is None:
        r = radius if radius else 0.01 * meshes[0].bbox_diagonal()
        trajectory = surface_orbit(meshes[0], r, warmup_ticks + measured_ticks)
    if radius is None:
        radius = 2.0 * trajectory.step_bound
    if backends is None:
        backends = [kernels.BACKEND]

    records = []
    for backend in backends:
        with kernels.use_backend(backend):
            tag = default_hardware_tag()
            for mesh in meshes:
                records.append(_time_mesh(mesh, trajectory, radius,
                                          warmup_ticks, measured_ticks, tag))
    if csv_path:
        write_csv(records, csv_path)
    if svg_path:
        plot_records(records, svg_path)
    return records


def write_csv(records, path):
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        w.writeheader()
        for rec in records:
            w.writerow(rec.row())


def read_csv(path):
    out = []
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            out.append(BenchRecord(
                triangle_count=int(row["triangleCount"]),
                vertex_count=int(row["vertexCount"]),
                mean_loop_hz=float(row["meanLoopHz"]),
                p99_loop_hz=float(row["p99LoopHz"]),
                query_ns=float(row["queryNs"]),
                gen_ns=float(row["genNs"]),
                solve_ns=float(row["solveNs"]),
                iterations=float(row["iterations"]),
                hardware_tag=row["hardwareTag"],
            ))
    return out


def loglog_period_slope(records):
    """Least-squares slope of log loop period vs log triangle count.

    Below 1.0 means the tree keeps per-tick cost sublinear in mesh size.
    """
    n = np.log([r.triangle_count for r in records])
    p = np.log([1.0 / r.mean_loop_hz for r in records])
    if len(n) < 2:
        raise ValueError("need at least two records for a slope")
    return float(np.polyfit(n, p, 1)[0])


def plot_records(records, path):
    """Frequency-vs-size curve (log-x) as SVG; a no-op without matplotlib."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return False
    fig, ax = plt.subplots(figsize=(6, 4))
    by_tag = {}
    for r in records:
        by_tag.setdefault(r.hardware_tag, []).append(r)
    for tag, recs in by_tag.items():
        recs = sorted(recs, key=lambda r: r.triangle_count)
        ax.plot([r.triangle_count for r in recs],
                [r.mean_loop_hz / 1e3 for r in recs], "o-", label=tag)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("triangles")
    ax.set_ylabel("loop frequency (kHz)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return True

"""Command line front end.

Subcommands: ``assets`` (write the procedural mesh catalog), ``sim run`` /
``sim metrics``, ``series`` (resolution series of a base mesh),
``bench run``, and ``serve``.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np


def _vec(text):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected x,y,z")
    return np.array(parts)


def _cmd_assets(args):
    from . import shapes
    from .meshio import save_stl

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    catalog = {
        "cube": shapes.cube(20.0),
        "tetrahedron": shapes.tetrahedron(10.0),
        "icosphere": shapes.icosphere(10.0, 3),
        "blob": shapes.blob(10.0, 4),
        "cylinder": shapes.cylinder(8.0, 20.0),
        "torus": shapes.torus(12.0, 4.0),
        "gear": shapes.gear(),
        "house": shapes.house(),
        "sheet": shapes.plane_grid(10, 10, 20.0),
    }
    if args.hires:
        from .series import subdivide
        catalog["hires"] = subdivide(shapes.torus(12.0, 4.0, 128, 96))
    for name, mesh in catalog.items():
        save_stl(mesh, out / f"{name}.stl")
        print(f"{name}.stl: {mesh.n_triangles} triangles")
    return 0


def _cmd_sim_run(args):
    from .meshio import load_mesh
    from .pdtree import PDTree
    from .sim import ScriptedScenario, run_scenario

    mesh = load_mesh(args.mesh)
    lo, hi = mesh.bounds()
    start = args.start if args.start is not None else np.array(
        [hi[0] + 2.0 * args.radius, 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])])
    scenario = ScriptedScenario(
        mesh_id=Path(args.mesh).stem, start=start, generator=args.scenario,
        ticks=args.ticks, step_bound=args.step, seed=args.seed)
    log = run_scenario(mesh, PDTree(mesh), scenario, args.radius,
                       tick_rate=args.rate, verify=not args.no_verify)
    if args.out:
        log.to_jsonl(args.out)
    print(f"{args.ticks} ticks, max active constraints "
          f"{int(log.active_count.max()) if len(log) else 0}")
    return 0


def _cmd_sim_metrics(args):
    from .metrics import path_deviation, spectral_arc_length
    from .sim import TrajectoryLog

    log = TrajectoryLog.from_jsonl(args.log)
    out = {}
    if args.sal or not args.deviation:
        out["spectralArcLength"] = spectral_arc_length(log)
    if args.deviation:
        path = np.asarray(json.loads(Path(args.deviation).read_text()))
        out["pathDeviation"] = path_deviation(log, path)
    print(json.dumps(out, indent=2))
    return 0


def _cmd_series(args):
    from .meshio import load_mesh, save_stl
    from .series import generate_mesh_series

    base = load_mesh(args.base)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.base).stem
    for k, mesh in enumerate(generate_mesh_series(base, args.levels, args.mode)):
        path = out / f"{stem}_{mesh.n_triangles:08d}.stl"
        save_stl(mesh, path)
        print(f"{path.name}: {mesh.n_triangles} triangles")
    return 0


def _cmd_bench_run(args):
    from . import kernels
    from .bench import run_benchmark, write_csv
    from .meshio import load_mesh

    files = sorted(Path(args.series).glob("*.stl"))
    if not files:
        print(f"no STL files in {args.series}", file=sys.stderr)
        return 1
    meshes = sorted((load_mesh(f) for f in files), key=lambda m: m.n_triangles)
    backends = kernels.available_backends() if args.both_backends else None
    records = run_benchmark(
        meshes, warmup_ticks=args.warmup, measured_ticks=args.ticks,
        backends=backends, csv_path=args.out, svg_path=args.svg)
    for r in records:
        print(f"{r.triangle_count:>9} tris  {r.mean_loop_hz:>10.1f} Hz  "
              f"({r.hardware_tag})")
    return 0


def _cmd_serve(args):
    from .service import load_config, serve

    cfg = load_config(args.config, host=args.host, port=args.port,
                      mesh_dir=args.mesh_dir, default_radius=args.radius)
    serve(cfg)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="meshvf")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assets", help="write the procedural mesh catalog")
    p.add_argument("--out", default="assets")
    p.add_argument("--hires", action="store_true",
                   help="also write a ~100k-triangle torus for UI stress runs")
    p.set_defaults(func=_cmd_assets)

    sim = sub.add_parser("sim", help="scripted control-loop runs")
    simsub = sim.add_subparsers(dest="sim_command", required=True)

    p = simsub.add_parser("run")
    p.add_argument("--mesh", required=True)
    p.add_argument("--scenario", default="RandomWalk",
                   help="PushNormal|SlideTangent|OrbitEdge|RandomWalk|Waypoints")
    p.add_argument("--ticks", type=int, default=2000)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rate", type=float, default=1000.0)
    p.add_argument("--start", type=_vec, default=None, help="x,y,z")
    p.add_argument("--out", default=None, help="trajectory log (JSONL)")
    p.add_argument("--no-verify", action="store_true")
    p.set_defaults(func=_cmd_sim_run)

    p = simsub.add_parser("metrics")
    p.add_argument("--log", required=True)
    p.add_argument("--sal", action="store_true", help="spectral arc length")
    p.add_argument("--deviation", default=None,
                   help="JSON list of [x,y,z] planned waypoints")
    p.set_defaults(func=_cmd_sim_metrics)

    p = sub.add_parser("series", help="resolution series of a base mesh")
    p.add_argument("--base", required=True)
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--mode", choices=("subdivide", "decimate"), default="subdivide")
    p.add_argument("--out", default="series")
    p.set_defaults(func=_cmd_series)

    bench = sub.add_parser("bench", help="loop-frequency scaling")
    benchsub = bench.add_subparsers(dest="bench_command", required=True)

    p = benchsub.add_parser("run")
    p.add_argument("--series", required=True, help="directory of STL levels")
    p.add_argument("--ticks", type=int, default=1000)
    p.add_argument("--warmup", type=int, default=200)
    p.add_argument("--out", default="results.csv")
    p.add_argument("--svg", default=None)
    p.add_argument("--both-backends", action="store_true")
    p.set_defaults(func=_cmd_bench_run)

    p = sub.add_parser("serve", help="run the steering service")
    p.add_argument("--config", default=None)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--mesh-dir", default=None)
    p.add_argument("--radius", type=float, default=None)
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

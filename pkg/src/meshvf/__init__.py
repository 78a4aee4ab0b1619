"""meshvf: real-time mesh-based motion constraints.

Builds plane-constraint sets from a triangle mesh around a moving point,
solves the constrained motion projection each tick, and exposes the loop
through a simulation harness, benchmarks, and a WebSocket service.
"""

__version__ = "0.1.0"

from .constraints import ActiveConstraintSet, Condition, PlaneConstraint, generate_constraints
from .control import ControlLoop
from .kernels import BACKEND
from .mesh import TriangleMesh, ValidationReport, validate
from .meshio import load_mesh, load_stl, save_stl
from .pdtree import MotionSphere, PDTree
from .qp import MotionProblem, MotionSolution, solve_motion
from .trigeom import ClosestPointResult, Convexity, Region, closest_point_on_triangle, edge_convexity

__all__ = [
    "ActiveConstraintSet",
    "BACKEND",
    "ClosestPointResult",
    "Condition",
    "ControlLoop",
    "Convexity",
    "MotionProblem",
    "MotionSolution",
    "MotionSphere",
    "PDTree",
    "PlaneConstraint",
    "Region",
    "TriangleMesh",
    "ValidationReport",
    "closest_point_on_triangle",
    "edge_convexity",
    "generate_constraints",
    "load_mesh",
    "load_stl",
    "save_stl",
    "solve_motion",
    "validate",
]

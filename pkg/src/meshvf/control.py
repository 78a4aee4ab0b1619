"""The per-tick control loop shared by the simulator and the service.

Keeping this in one place is what makes record/replay equivalence testable:
driving the loop from a script or from WebSocket frames runs byte-identical
arithmetic.
"""

from dataclasses import dataclass

import numpy as np

from .constraints import generate_constraints
from .qp import ActiveSetSolver, MotionProblem


def clamp_step(delta, limit):
    """Scale ``delta`` down to Euclidean norm ``limit`` if it exceeds it."""
    d = np.asarray(delta, dtype=np.float64)
    n = float(np.linalg.norm(d))
    if n > limit > 0:
        return d * (limit / n)
    return d.copy()


@dataclass
class StepResult:
    tick: int
    constrained: np.ndarray
    proxy: np.ndarray
    feedback: np.ndarray
    constraint_set: object
    solution: object


class ControlLoop:
    """Constrained tool position plus free-running proxy for one session.

    Each step clamps the client-desired tip motion to the motion-sphere
    radius, regenerates plane constraints at the current position, projects
    the desired increment, and advances. The proxy integrates the same
    desired tips without constraints; the gap (proxy - constrained) is the
    force-feedback signal.
    """

    def __init__(self, mesh, tree, start, radius):
        self.mesh = mesh
        self.tree = tree
        self.radius = float(radius)
        self.solver = ActiveSetSolver()
        self.reset(start)

    def reset(self, start):
        self.x = np.asarray(start, dtype=np.float64).copy()
        self.proxy = self.x.copy()
        self.tick = 0
        self.solver.reset()

    def step(self, desired_tip):
        desired_tip = np.asarray(desired_tip, dtype=np.float64)
        dxd = clamp_step(desired_tip - self.x, self.radius)
        cset = generate_constraints(self.mesh, self.tree, self.x, self.radius,
                                    tick=self.tick)
        keys = list(zip(cset.triangles.tolist(), cset.codes.tolist()))
        sol = self.solver.solve(MotionProblem(dxd, cset.rows()), keys=keys)
        self.x = self.x + sol.cartesian_increment
        self.proxy = self.proxy + clamp_step(desired_tip - self.proxy, self.radius)
        self.tick += 1
        return StepResult(self.tick, self.x.copy(), self.proxy.copy(),
                          self.proxy - self.x, cset, sol)

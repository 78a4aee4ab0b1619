"""Per-tick constrained least-squares motion solve.

minimize ‖J Δq − Δx_d‖  subject to  A (J Δq) ≥ b

With the identity Jacobian this is the Euclidean projection of the desired
increment onto the constraint polyhedron. The problems are tiny (3 unknowns,
a few dozen rows) and arrive at kilohertz rates, so a dense primal
active-set method with warm starting beats any general-purpose QP library
here. For a wide Jacobian the Cartesian projection is computed first and the
minimum-norm joint increment is recovered through the pseudoinverse.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleError, MaxIterationsError

EPS_KKT = 1e-8
_REG = 1e-12


class SolveStatus(enum.Enum):
    OPTIMAL = "Optimal"
    FALLBACK_ZERO = "FallbackZero"


@dataclass
class MotionProblem:
    """One tick's solve: desired Cartesian increment plus constraint rows.

    ``rows`` may be a list of (a, b) pairs or a pre-packed (A, b) array
    tuple; ``jacobian`` of None means the identity (Cartesian control).
    """

    desired: np.ndarray
    rows: object = field(default_factory=list)
    jacobian: np.ndarray = None

    def packed_rows(self):
        if isinstance(self.rows, tuple):
            A, b = self.rows
            return (np.asarray(A, dtype=np.float64).reshape(-1, 3),
                    np.asarray(b, dtype=np.float64).ravel())
        if len(self.rows) == 0:
            return np.empty((0, 3)), np.empty(0)
        A = np.asarray([a for a, _ in self.rows], dtype=np.float64)
        b = np.asarray([v for _, v in self.rows], dtype=np.float64)
        return A, b


@dataclass
class MotionSolution:
    joint_increment: np.ndarray
    cartesian_increment: np.ndarray
    active_rows: list
    iterations: int
    status: SolveStatus
    kkt_residual: float = 0.0


def constraint_rows(cset):
    """Rows (a, b) from an ActiveConstraintSet: a = n, b = -n·(x - p)."""
    A, b = cset.rows()
    return [(A[i], float(b[i])) for i in range(len(b))]


def _eq_step(d0, A, b, work):
    """Minimizer of ‖d - d0‖ holding the working-set rows as equalities.

    Solved through the dual: (A_W A_Wᵀ) λ = b_W - A_W d0, d = d0 + A_Wᵀ λ.
    The Gram matrix is regularized so linearly dependent working sets (cases
    the caller is explicitly allowed to feed us) stay solvable.
    """
    Aw = A[work]
    g = Aw @ Aw.T
    g[np.diag_indices_from(g)] += _REG
    lam = np.linalg.solve(g, b[work] - Aw @ d0)
    return d0 + Aw.T @ lam, lam


def _phase1(A, b, cap):
    """Feasible point via cyclic projection onto violated half-spaces."""
    d = np.zeros(3)
    norms2 = np.einsum("ij,ij->i", A, A)
    for _ in range(cap):
        slack = A @ d - b
        i = int(np.argmin(slack))
        if slack[i] >= -0.5 * EPS_KKT:
            return d
        if norms2[i] <= 0:
            break  # zero row with positive b: unsatisfiable
        d = d + (-slack[i] / norms2[i]) * A[i]
    raise InfeasibleError("no point satisfies all constraint rows")


class ActiveSetSolver:
    """Primal active-set solver with cross-tick warm starting.

    One instance per control session: it remembers which planes were active
    last tick (by caller-provided keys) and seeds the working set with the
    matching rows, which usually converges in one or two iterations during
    sliding contact. Not safe for concurrent use.
    """

    def __init__(self):
        self._warm_keys = frozenset()

    def reset(self):
        self._warm_keys = frozenset()

    def solve(self, problem, keys=None):
        """Solve one MotionProblem.

        Parameters
        ----------
        problem : MotionProblem
        keys : optional sequence of hashables, parallel to the rows, used to
            match rows across ticks for warm starting (e.g. (triangle, cond)).

        Raises
        ------
        InfeasibleError
            No point satisfies the rows within tolerance.
        MaxIterationsError
            Iteration cap hit and zero motion is not certifiably safe.
        """
        d0 = np.asarray(problem.desired, dtype=np.float64)
        A, b = problem.packed_rows()
        m = len(b)

        if m == 0:
            return self._finish(problem, d0, [], 0, SolveStatus.OPTIMAL, 0.0, keys)

        cap = 10 * max(m, 1)
        if np.any(b > EPS_KKT):
            d = _phase1(A, b, 100 * m)
        else:
            d = np.zeros(3)

        work = []
        if keys is not None and self._warm_keys:
            seed = [i for i, k in enumerate(keys) if k in self._warm_keys][:3]
            if seed:
                d_try, lam = _eq_step(d0, A, b, seed)
                if np.all(A @ d_try >= b - EPS_KKT) and np.all(lam >= -EPS_KKT):
                    d, work = d_try, seed

        it = 0
        while it < cap:
            it += 1
            if work:
                d_new, lam = _eq_step(d0, A, b, work)
            else:
                d_new, lam = d0, np.empty(0)
            p = d_new - d

            if float(p @ p) <= 1e-24 * (1.0 + float(d0 @ d0)):
                if len(lam) == 0 or np.all(lam >= -EPS_KKT):
                    return self._finish(problem, d_new, work, it,
                                        SolveStatus.OPTIMAL,
                                        self._kkt(d_new, d0, A, b, work, lam), keys)
                work.pop(int(np.argmin(lam)))
                continue

            ap = A @ p
            slack = A @ d - b
            alpha = 1.0
            blocker = -1
            for i in range(m):
                if i in work or ap[i] >= -1e-15:
                    continue
                ratio = slack[i] / (-ap[i])
                if ratio < alpha:
                    alpha = ratio
                    blocker = i
            d = d + max(alpha, 0.0) * p
            if blocker >= 0:
                work.append(blocker)
            # alpha == 1 with no blocker: d == d_new; optimality or a drop is
            # decided on the next pass through the zero-step branch.

        if np.all(b <= EPS_KKT):
            return self._finish(problem, np.zeros(3), [], it,
                                SolveStatus.FALLBACK_ZERO, 0.0, None)
        raise MaxIterationsError(f"no convergence in {cap} iterations")

    def _kkt(self, d, d0, A, b, work, lam):
        """Max KKT violation: stationarity, primal, dual, complementarity."""
        grad = d - d0
        if work:
            grad = grad - A[work].T @ lam
        res = float(np.max(np.abs(grad)))
        if len(b):
            res = max(res, float(np.max(b - A @ d)))
        if len(lam):
            res = max(res, float(np.max(-lam)), float(
                np.max(np.abs(lam * (A[work] @ d - b[work])))))
        return res

    def _finish(self, problem, dx, work, it, status, kkt, keys):
        if keys is not None:
            self._warm_keys = frozenset(keys[i] for i in work)
        elif status is SolveStatus.FALLBACK_ZERO:
            self._warm_keys = frozenset()
        J = problem.jacobian
        if J is None:
            dq = dx.copy()
        else:
            J = np.asarray(J, dtype=np.float64)
            dq = np.linalg.lstsq(J, dx, rcond=None)[0]
        cart = dx if J is None else J @ dq
        return MotionSolution(dq, cart, sorted(int(i) for i in work), it, status, kkt)


def solve_motion(problem):
    """One-shot solve without warm-start state."""
    return ActiveSetSolver().solve(problem)

"""Exception types shared across the package."""


class MeshVFError(Exception):
    """Base class for all meshvf errors."""


class ParseError(MeshVFError):
    """Mesh file is malformed for the declared format."""


class DegenerateMeshError(MeshVFError):
    """No usable (non-degenerate) triangles remain after loading."""


class NonManifoldError(MeshVFError):
    """An edge is shared by three or more triangles.

    Carries the offending edge as a vertex-index pair and the incident
    triangle ids.
    """

    def __init__(self, edge, triangles):
        self.edge = tuple(edge)
        self.triangles = list(triangles)
        super().__init__(
            f"non-manifold edge {self.edge} shared by triangles {self.triangles}"
        )


class DegenerateTriangleError(MeshVFError):
    """Triangle area is below the degeneracy threshold."""


class NotAdjacentError(MeshVFError):
    """The two triangles do not share the given edge."""


class InfeasibleError(MeshVFError):
    """No point satisfies every constraint row within tolerance."""


class MaxIterationsError(MeshVFError):
    """Solver hit its iteration cap on a problem with no safe fallback."""


class PenetrationDetected(MeshVFError):
    """The constrained tool crossed the surface during a simulated run."""

    def __init__(self, tick, depth):
        self.tick = tick
        self.depth = depth
        super().__init__(f"penetration at tick {tick}: signed distance {depth:.3e}")


class OpenMeshSignUndefined(MeshVFError):
    """Signed distance was requested for a mesh with boundary edges."""


class ZeroVelocityError(MeshVFError):
    """Trajectory has zero mean speed; the smoothness spectrum is undefined."""


class DecimationFailure(MeshVFError):
    """Edge-collapse decimation could not reach the target triangle count."""


class StartInsideMeshError(MeshVFError):
    """Session start position is inside the forbidden region."""


class SessionNotFound(MeshVFError):
    """No open session for this connection."""


class MeshNotLoaded(MeshVFError):
    """Requested mesh id is not in the catalog."""

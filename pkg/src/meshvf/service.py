"""Interactive steering service: the control loop behind a wire protocol.

WebSocket JSON frames in, state frames out; HTTP serves the mesh catalog
for rendering. All protocol logic lives in :class:`ServiceCore`, which is
transport-free and synchronous — the WebSocket endpoint is a thin shell
around it, and the fuzz tests hit the core directly.

Client frames::

    {"type": "open", "mesh": "<id>", "start": [x,y,z], "radius": r}
    {"type": "step", "desired": [x,y,z]}
    {"type": "reset"}

Server frames::

    {"type": "state", "tick": n, "constrained": [...], "proxy": [...],
     "feedback": [...], "planes": [{"n": [...], "p": [...]}], "status": "Optimal"}
    {"type": "error", "error": "<code>", "message": "..."}

Responses contain no wall-clock or randomness, so replaying a recorded
frame sequence yields byte-identical payloads.
"""

import asyncio
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .control import ControlLoop
from .errors import MeshVFError, StartInsideMeshError
from .meshio import load_mesh, mesh_to_stl_bytes
from .oracle import signed_distance_oracle
from .pdtree import PDTree

MESH_SUFFIXES = (".stl", ".obj", ".ply")


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    mesh_dir: str = "assets"
    default_radius: float = 1.0


def load_config(path=None, **overrides):
    """Config from a key=value file plus keyword overrides (CLI flags).

    Recognized keys: host, port, mesh_dir, default_radius. Blank lines and
    ``#`` comments are ignored; overrides with value None are skipped.
    """
    casts = {"host": str, "port": int, "mesh_dir": str, "default_radius": float}
    cfg = ServiceConfig()
    if path:
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            key = key.strip()
            if not sep or key not in casts:
                raise ValueError(f"{path}:{lineno}: bad config line {line!r}")
            setattr(cfg, key, casts[key](val.strip()))
    for key, val in overrides.items():
        if key not in casts:
            raise ValueError(f"unknown config key {key!r}")
        if val is not None:
            setattr(cfg, key, casts[key](val))
    return cfg


class MeshCatalog:
    """Meshes served to clients, keyed by file stem.

    Mesh and tree are built once per id and shared read-only across
    sessions (both are immutable after construction).
    """

    def __init__(self, mesh_dir):
        self.mesh_dir = Path(mesh_dir)
        self._files = {}
        if self.mesh_dir.is_dir():
            for f in sorted(self.mesh_dir.iterdir()):
                if f.suffix.lower() in MESH_SUFFIXES:
                    self._files[f.stem] = f
        self._cache = {}

    def ids(self):
        return sorted(self._files)

    def __contains__(self, mesh_id):
        return mesh_id in self._files

    def get(self, mesh_id):
        """(mesh, tree) for an id; loads and caches on first use."""
        if mesh_id not in self._cache:
            mesh = load_mesh(self._files[mesh_id])
            self._cache[mesh_id] = (mesh, PDTree(mesh))
        return self._cache[mesh_id]

    def listing(self):
        out = []
        for mesh_id in self.ids():
            mesh, _ = self.get(mesh_id)
            lo, hi = mesh.bounds()
            out.append({
                "id": mesh_id,
                "triangles": mesh.n_triangles,
                "vertices": mesh.n_vertices,
                "closed": mesh.is_closed(),
                "bounds": {"lo": [float(v) for v in lo], "hi": [float(v) for v in hi]},
            })
        return out

    def stl_bytes(self, mesh_id):
        mesh, _ = self.get(mesh_id)
        return mesh_to_stl_bytes(mesh)


@dataclass
class Session:
    id: int
    mesh_id: str
    start: np.ndarray
    radius: float
    loop: ControlLoop = field(repr=False, default=None)


def _vec3(value):
    """Parse a finite 3-vector from JSON data, or None if malformed."""
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        return None
    try:
        v = np.array([float(c) for c in value])
    except (TypeError, ValueError):
        return None
    if not np.all(np.isfinite(v)):
        return None
    return v


def _error(code, message):
    return {"type": "error", "error": code, "message": message}


def encode_frame(frame):
    """Canonical wire encoding; fixed key order, no whitespace."""
    return json.dumps(frame, separators=(",", ":"))


def coalesce_frames(frames):
    """Collapse each run of consecutive step frames to its latest member.

    Teleoperation semantics under backpressure: stale intermediate targets
    are droppable, but open/reset frames are barriers and keep their order.
    """
    out = []
    for f in frames:
        is_step = isinstance(f, dict) and f.get("type") == "step"
        if out and is_step and isinstance(out[-1], dict) and out[-1].get("type") == "step":
            out[-1] = f
        else:
            out.append(f)
    return out


class ServiceCore:
    """Protocol state machine: (session, frame) -> (session, response)."""

    def __init__(self, catalog, default_radius=1.0):
        self.catalog = catalog
        self.default_radius = float(default_radius)
        self._next_id = 0

    def _state_frame(self, session, result=None):
        if result is None:
            x = session.loop.x
            return {
                "type": "state", "tick": session.loop.tick,
                "constrained": [float(v) for v in x],
                "proxy": [float(v) for v in x],
                "feedback": [0.0, 0.0, 0.0],
                "planes": [], "status": "Optimal",
            }
        cset = result.constraint_set
        return {
            "type": "state", "tick": result.tick,
            "constrained": [float(v) for v in result.constrained],
            "proxy": [float(v) for v in result.proxy],
            "feedback": [float(v) for v in result.feedback],
            "planes": [
                {"n": [float(v) for v in cset.normals[i]],
                 "p": [float(v) for v in cset.points[i]]}
                for i in range(len(cset))
            ],
            "status": result.solution.status.value,
        }

    def open(self, mesh_id, start, radius):
        if mesh_id not in self.catalog:
            raise KeyError(mesh_id)
        mesh, tree = self.catalog.get(mesh_id)
        if mesh.is_closed() and signed_distance_oracle(mesh, start) < 0:
            raise StartInsideMeshError(
                f"start {list(start)} is inside mesh {mesh_id!r}")
        self._next_id += 1
        return Session(id=self._next_id, mesh_id=mesh_id, start=start.copy(),
                       radius=radius, loop=ControlLoop(mesh, tree, start, radius))

    def handle(self, session, msg):
        """One frame in, (possibly new session, response frame) out.

        Never raises on client input: malformed frames come back as error
        frames and leave the session untouched.
        """
        if not isinstance(msg, dict):
            return session, _error("BadFrame", "frame must be a JSON object")
        ftype = msg.get("type")

        if ftype == "open":
            mesh_id = msg.get("mesh")
            if not isinstance(mesh_id, str):
                return session, _error("BadFrame", "open needs a mesh id")
            start = _vec3(msg.get("start"))
            if start is None:
                return session, _error("BadFrame", "open needs start: [x,y,z]")
            radius = msg.get("radius", self.default_radius)
            if not isinstance(radius, (int, float)) or not np.isfinite(radius) \
                    or radius <= 0:
                return session, _error("BadFrame", "radius must be a positive number")
            if mesh_id not in self.catalog:
                return session, _error("MeshNotLoaded", f"no mesh {mesh_id!r}")
            try:
                session = self.open(mesh_id, start, float(radius))
            except StartInsideMeshError as e:
                return session, _error("StartInsideMeshError", str(e))
            return session, self._state_frame(session)

        if ftype == "step":
            if session is None:
                return session, _error("SessionNotFound", "no open session")
            desired = _vec3(msg.get("desired"))
            if desired is None:
                return session, _error("BadFrame", "step needs desired: [x,y,z]")
            try:
                result = session.loop.step(desired)
            except MeshVFError as e:
                return session, _error(type(e).__name__, str(e))
            return session, self._state_frame(session, result)

        if ftype == "reset":
            if session is None:
                return session, _error("SessionNotFound", "no open session")
            session.loop.reset(session.start)
            return session, self._state_frame(session)

        return session, _error("BadFrame", f"unknown frame type {ftype!r}")


def create_app(config=None):
    """FastAPI application: catalog over HTTP, sessions over WebSocket."""
    from fastapi import FastAPI, WebSocket, WebSocketDisconnect
    from fastapi.responses import JSONResponse, Response

    config = config or ServiceConfig()
    catalog = MeshCatalog(config.mesh_dir)
    core = ServiceCore(catalog, config.default_radius)

    app = FastAPI(title="meshvf steering service")
    app.state.core = core
    app.state.config = config

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/meshes")
    def meshes():
        return catalog.listing()

    @app.get("/meshes/{mesh_id}")
    def mesh_stl(mesh_id: str):
        if mesh_id not in catalog:
            return JSONResponse({"error": f"no mesh {mesh_id!r}"}, status_code=404)
        return Response(content=catalog.stl_bytes(mesh_id), media_type="model/stl")

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket):
        await ws.accept()
        session = None
        inbox = []
        arrived = asyncio.Event()
        closed = False

        async def reader():
            nonlocal closed
            try:
                while True:
                    inbox.append(await ws.receive_text())
                    arrived.set()
            except (WebSocketDisconnect, RuntimeError):
                closed = True
                arrived.set()

        task = asyncio.create_task(reader())
        try:
            while True:
                await arrived.wait()
                arrived.clear()
                batch, inbox[:] = list(inbox), []
                frames = []
                for raw in batch:
                    try:
                        frames.append(json.loads(raw))
                    except json.JSONDecodeError:
                        frames.append(None)
                # steps queued while the loop was busy collapse to the latest
                for frame in coalesce_frames(frames):
                    if frame is None:
                        resp = _error("BadFrame", "invalid JSON")
                    else:
                        session, resp = core.handle(session, frame)
                    await ws.send_text(encode_frame(resp))
                if closed:
                    break
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            task.cancel()

    return app


def serve(config):
    """Blocking uvicorn runner used by the CLI."""
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port,
                log_level="warning")

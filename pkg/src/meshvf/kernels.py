"""Geometry kernel backend selection.

The hot loops (point-triangle closest point, tree sphere query) exist twice:
a compiled Cython extension (``_ckernels``) and a vectorized numpy fallback
(``_pykernels``). The extension is preferred when importable; set
``MESHVF_BACKEND=python`` or ``MESHVF_BACKEND=cython`` to force one.
"""

import os
from contextlib import contextmanager

from . import _pykernels

REGION_IN = _pykernels.REGION_IN
REGION_EDGE = _pykernels.REGION_EDGE
REGION_VERTEX = _pykernels.REGION_VERTEX

_requested = os.environ.get("MESHVF_BACKEND", "auto").lower()

if _requested == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        _impl = _pykernels
        BACKEND = "python"

closest_point_tri = _impl.closest_point_tri
closest_point_batch = _impl.closest_point_batch
sphere_query = _impl.sphere_query


def get_backend():
    """Name of the active kernel backend ('cython' or 'python')."""
    return BACKEND


def load_backend(name):
    """Return the kernel module for an explicit backend name.

    Used by the benchmark to time both implementations side by side.
    """
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    """Backend names importable in this installation, compiled one first."""
    names = []
    try:
        load_backend("cython")
        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names


@contextmanager
def use_backend(name):
    """Temporarily route all kernel calls through one backend."""
    global closest_point_tri, closest_point_batch, sphere_query, BACKEND
    mod = load_backend(name)
    saved = (closest_point_tri, closest_point_batch, sphere_query, BACKEND)
    closest_point_tri = mod.closest_point_tri
    closest_point_batch = mod.closest_point_batch
    sphere_query = mod.sphere_query
    BACKEND = name
    try:
        yield mod
    finally:
        closest_point_tri, closest_point_batch, sphere_query, BACKEND = saved

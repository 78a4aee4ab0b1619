"""Trajectory smoothness and path-tracking metrics.

Both operate on the constrained positions of a TrajectoryLog: spectral arc
length for smoothness (less negative = smoother) and binned perpendicular
deviation from a planned polyline.
"""

import numpy as np

from .errors import ZeroVelocityError

CUTOFF_HZ = 20.0
DEVIATION_BIN_MM = 1.0


def spectral_arc_length(log, cutoff_hz=CUTOFF_HZ):
    """Arc length of the normalized speed spectrum up to the cutoff, negated.

    SAL = -∫₀^ωc sqrt((1/ωc)² + (dV̂/dω)²) dω with V̂ = V(ω)/V(0), where V is
    the magnitude spectrum of the speed signal. A perfectly constant speed
    gives a flat V̂ and SAL = -1; any extra spectral content below the cutoff
    lengthens the curve and pushes SAL more negative.

    Discretization: speeds from finite differences at the tick rate; DFT
    zero-padded to the next power of two >= 8x the sample count. The finite
    window makes a naive padded DFT of a constant signal ring (Dirichlet
    lobes), so the mean is removed before the transform, the spectrum is
    normalized by the true DC value (the speed sum), and the spurious zero
    at the DC bin is replaced by its neighbor (even-symmetry extension).

    Raises
    ------
    ZeroVelocityError
        For a stationary trajectory (V(0) = 0).
    """
    x = np.asarray(log.constrained, dtype=np.float64)
    if len(x) < 2:
        raise ZeroVelocityError("need at least two samples")
    rate = float(log.tick_rate)
    speed = np.linalg.norm(np.diff(x, axis=0), axis=1) * rate
    dc = float(speed.sum())
    if dc <= 0.0:
        raise ZeroVelocityError("trajectory is stationary")

    n = 1
    while n < 8 * len(speed):
        n *= 2
    spec = np.abs(np.fft.rfft(speed - speed.mean(), n))
    spec[0] = spec[1]
    vhat = spec / dc
    freq = np.fft.rfftfreq(n, d=1.0 / rate)

    m = freq <= cutoff_hz
    f = freq[m]
    v = vhat[m]
    if len(f) < 2:
        raise ZeroVelocityError("cutoff below frequency resolution")
    return -float(np.sum(np.sqrt((np.diff(f) / cutoff_hz) ** 2 + np.diff(v) ** 2)))


def _project_to_polyline(points, path):
    """Per point: (distance to nearest segment, arc-length of the foot)."""
    p = np.asarray(points, dtype=np.float64)
    path = np.asarray(path, dtype=np.float64)
    seg = np.diff(path, axis=0)
    seg_len2 = np.einsum("ij,ij->i", seg, seg)
    cum = np.concatenate([[0.0], np.cumsum(np.sqrt(seg_len2))])

    w = p[:, None, :] - path[None, :-1, :]
    t = np.einsum("psj,sj->ps", w, seg) / np.where(seg_len2 > 0, seg_len2, 1.0)
    t = np.clip(t, 0.0, 1.0)
    foot = path[:-1] + t[..., None] * seg
    d = np.linalg.norm(p[:, None, :] - foot, axis=2)
    best = np.argmin(d, axis=1)
    rows = np.arange(len(p))
    arc = cum[best] + t[rows, best] * np.sqrt(seg_len2[best])
    return d[rows, best], arc


def path_deviation(log, path, bin_mm=DEVIATION_BIN_MM):
    """{mean, std, max} of the furthest deviation per 1 mm of planned path.

    Each constrained sample is assigned to the planned-path arc-length bin
    of its closest-point projection; within a bin the maximum perpendicular
    distance counts (the "furthest point"), and the statistics run over the
    occupied bins.
    """
    path = np.asarray(path, dtype=np.float64)
    if len(path) < 2 or np.allclose(path.max(axis=0), path.min(axis=0)):
        raise ValueError("planned path is degenerate")
    dist, arc = _project_to_polyline(log.constrained, path)
    bins = np.floor(arc / bin_mm).astype(np.int64)
    worst = {}
    for b, d in zip(bins, dist):
        if d > worst.get(b, -1.0):
            worst[b] = d
    vals = np.asarray(list(worst.values()), dtype=np.float64)
    return {
        "mean": float(vals.mean()),
        "std": float(vals.std()),
        "max": float(vals.max()),
    }

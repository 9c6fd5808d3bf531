"""Point clouds in real/imaginary/normalized-frequency space and
nearest-point queries against them."""

from __future__ import annotations

import math
import warnings
from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .touchstone import NetworkData, PassivityWarning

PASSIVITY_TOL = 0.1


@dataclass(frozen=True, eq=False)
class RifPointCloud:
    """Ordered 3D points (Re s, Im s, f / f_norm) of one matrix element.

    ``points`` has shape (K, 3). :func:`to_rif` yields strictly increasing
    z; the nearest-point sweeps only need z sorted.
    """

    element_index: tuple[int, int]
    points: np.ndarray
    f_norm: float
    source_freqs_hz: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64).reshape(-1, 3)
        freqs = np.array(self.source_freqs_hz, dtype=np.float64).reshape(-1)
        if freqs.size != pts.shape[0]:
            raise ValueError("source_freqs_hz must have one entry per point")
        if not self.f_norm > 0:
            raise ValueError(f"f_norm must be positive, got {self.f_norm}")
        if np.any(np.diff(pts[:, 2]) < 0):
            raise ValueError("points must be sorted by z")
        pts.flags.writeable = False
        freqs.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "source_freqs_hz", freqs)

    @classmethod
    def from_points(cls, points, f_norm: float = 1.0, element_index=(1, 1)) -> "RifPointCloud":
        pts = np.array(points, dtype=np.float64).reshape(-1, 3)
        return cls(element_index, pts, f_norm, pts[:, 2] * f_norm)

    def __len__(self) -> int:
        return self.points.shape[0]

    @cached_property
    def _columns(self) -> tuple[list[float], list[float], list[float]]:
        x, y, z = self.points.T
        return x.tolist(), y.tolist(), z.tolist()


def to_rif(
    net: NetworkData,
    element: tuple[int, int],
    f_norm: float,
    band: tuple[float, float] | None = None,
) -> RifPointCloud:
    """Map the sweep of element ``(i, j)`` (1-based) to RIF points.

    ``band`` restricts the samples to the closed interval [f_lo, f_hi] in Hz.
    """
    if not f_norm > 0:
        raise ValueError(f"f_norm must be positive, got {f_norm}")
    i, j = element
    values = net.element(i, j)
    freqs = net.frequencies
    if band is not None:
        lo, hi = band
        if lo > hi:
            raise ValueError(f"empty band: f_lo={lo} > f_hi={hi}")
        mask = (freqs >= lo) & (freqs <= hi)
        freqs, values = freqs[mask], values[mask]
    if freqs.size == 0:
        raise ValueError(f"no samples of S{i}{j} within band {band}")
    if np.any(np.abs(values) > 1.0 + PASSIVITY_TOL):
        warnings.warn(
            f"S{i}{j} of {net.source_label or 'network'} leaves the unit cylinder "
            f"by more than {PASSIVITY_TOL}",
            PassivityWarning,
            stacklevel=2,
        )
    pts = np.column_stack([values.real, values.imag, freqs / f_norm])
    return RifPointCloud((i, j), pts, float(f_norm), freqs)


def _check_nonempty(cloud: RifPointCloud):
    if len(cloud) == 0:
        raise ValueError("empty point cloud")


def nearest_distance_brute(p, cloud: RifPointCloud) -> tuple[float, int]:
    """Exhaustive nearest point; ties go to the lowest index."""
    _check_nonempty(cloud)
    pts = cloud.points
    dx = pts[:, 0] - p[0]
    dy = pts[:, 1] - p[1]
    dz = pts[:, 2] - p[2]
    d = np.sqrt(dx * dx + dy * dy + dz * dz)
    k = int(np.argmin(d))
    return float(d[k]), k


def nearest_distance_fast(p, cloud: RifPointCloud) -> tuple[float, int]:
    """Nearest point by a sweep outward from the z-nearest sample.

    Returns exactly what :func:`nearest_distance_brute` returns. A candidate's
    |dz| bounds its 3D distance from below, so a direction is abandoned once
    |dz| exceeds the best distance found. The bound is taken as sqrt(dz*dz)
    so it still holds when squares underflow.
    """
    _check_nonempty(cloud)
    xs, ys, zs = cloud._columns
    px, py, pz = float(p[0]), float(p[1]), float(p[2])
    m = len(zs)
    best, best_k = math.inf, -1
    hi = bisect_left(zs, pz)
    lo = hi - 1
    while lo >= 0 or hi < m:
        if lo >= 0:
            dz = pz - zs[lo]
            if math.sqrt(dz * dz) > best:
                lo = -1
            else:
                dx, dy = px - xs[lo], py - ys[lo]
                d = math.sqrt(dx * dx + dy * dy + dz * dz)
                if d < best or (d == best and lo < best_k):
                    best, best_k = d, lo
                lo -= 1
        if hi < m:
            dz = pz - zs[hi]
            if math.sqrt(dz * dz) > best:
                hi = m
            else:
                dx, dy = px - xs[hi], py - ys[hi]
                d = math.sqrt(dx * dx + dy * dy + dz * dz)
                if d < best or (d == best and hi < best_k):
                    best, best_k = d, hi
                hi += 1
    return best, best_k


def nearest_distances(queries, cloud: RifPointCloud) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized form of :func:`nearest_distance_fast` for many queries.

    All queries advance one step per side per iteration, so the loop count is
    the widest search window rather than the number of queries.
    """
    _check_nonempty(cloud)
    q = np.asarray(queries, dtype=np.float64).reshape(-1, 3)
    cx, cy, cz = cloud.points.T
    qx, qy, qz = q.T
    m = cz.size
    best = np.full(q.shape[0], np.inf)
    best_k = np.full(q.shape[0], -1, dtype=np.intp)
    hi = np.searchsorted(cz, qz, side="left")
    lo = hi - 1
    live_lo = lo >= 0
    live_hi = hi < m

    def step(cursor, live, delta):
        idx = np.flatnonzero(live)
        if idx.size == 0:
            return
        k = cursor[idx]
        dz = qz[idx] - cz[k]
        stop = np.sqrt(dz * dz) > best[idx]
        dx = qx[idx] - cx[k]
        dy = qy[idx] - cy[k]
        d = np.sqrt(dx * dx + dy * dy + dz * dz)
        cur = best[idx]
        better = ~stop & ((d < cur) | ((d == cur) & (k < best_k[idx])))
        best[idx[better]] = d[better]
        best_k[idx[better]] = k[better]
        cursor[idx] = k + delta
        live[idx] = ~stop & (cursor[idx] >= 0) & (cursor[idx] < m)

    while live_lo.any() or live_hi.any():
        step(lo, live_lo, -1)
        step(hi, live_hi, 1)
    return best, best_k


def _segment_distances(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    ap = p - a
    denom = np.einsum("ij,ij->i", ab, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(denom > 0, np.einsum("ij,ij->i", ap, ab) / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    diff = ap - t[:, None] * ab
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def nearest_distance_polyline(p, cloud: RifPointCloud) -> float:
    """Distance from ``p`` to the polyline through consecutive cloud points.

    Never larger than the point-set distance: segments are only searched
    inside the z-window that could beat the nearest vertex.
    """
    if len(cloud) < 2:
        raise ValueError("polyline distance needs at least 2 points")
    p = np.asarray(p, dtype=np.float64)
    bound, _ = nearest_distance_fast(p, cloud)
    zs = cloud.points[:, 2]
    lo = max(int(np.searchsorted(zs, p[2] - bound, side="left")) - 1, 0)
    hi = min(int(np.searchsorted(zs, p[2] + bound, side="right")), len(cloud) - 1)
    if hi <= lo:
        return bound
    pts = cloud.points
    d = _segment_distances(p, pts[lo:hi], pts[lo + 1:hi + 1])
    return min(float(d.min()), bound)


def nearest_distances_polyline(queries, cloud: RifPointCloud) -> np.ndarray:
    q = np.asarray(queries, dtype=np.float64).reshape(-1, 3)
    return np.array([nearest_distance_polyline(p, cloud) for p in q])

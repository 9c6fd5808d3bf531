"""S-parameter distances, SPS similarity scores and tier classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import (
    RifPointCloud,
    nearest_distances,
    nearest_distances_polyline,
    to_rif,
)
from .touchstone import NetworkData

GRID_RTOL = 1e-6


class ComparisonError(ValueError):
    pass


class GridMismatchError(ComparisonError):
    pass


class EmptyBandError(ComparisonError):
    pass


class Direction(str, enum.Enum):
    AtoB = "atob"
    BtoA = "btoa"
    Symmetric = "sym"


class NNMode(str, enum.Enum):
    PointSet = "points"
    Polyline = "polyline"


class Tier(str, enum.Enum):
    Good = "Good"
    Acceptable = "Acceptable"
    Inconclusive = "Inconclusive"
    Bad = "Bad"


@dataclass(frozen=True)
class TierThresholds:
    """Lower SPS bounds (inclusive) of the Good, Acceptable and
    Inconclusive tiers; anything below ``inconclusive`` is Bad."""

    good: float = 99.0
    acceptable: float = 90.0
    inconclusive: float = 80.0

    def __post_init__(self):
        if not self.good > self.acceptable > self.inconclusive:
            raise ValueError("tier thresholds must be strictly decreasing")


@dataclass(frozen=True)
class ComparisonConfig:
    f_norm: float = 1e9
    band_max: float | None = None
    band_min: float = 0.0
    direction: Direction = Direction.AtoB
    nn_mode: NNMode = NNMode.PointSet
    tiers: TierThresholds = field(default_factory=TierThresholds)

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        object.__setattr__(self, "nn_mode", NNMode(self.nn_mode))
        if not self.f_norm > 0:
            raise ValueError(f"f_norm must be positive, got {self.f_norm}")
        if self.band_max is not None and not self.band_min < self.band_max:
            raise ValueError(f"band_min ({self.band_min}) must be below band_max ({self.band_max})")


@dataclass(frozen=True, eq=False)
class ElementReport:
    element: tuple[int, int]
    d_mh: float
    sps: float
    tier: Tier
    trace: np.ndarray  # (K, 2): source frequency in Hz, d_rif
    effective_band: tuple[float, float]


@dataclass(frozen=True, eq=False)
class SimilarityReport:
    per_element: tuple[tuple[ElementReport, ...], ...]
    d_mh_matrix: float
    sps_matrix: float
    tier: Tier
    config_echo: ComparisonConfig
    labels: tuple[str, str]
    effective_band: tuple[float, float]

    def elements(self):
        for row in self.per_element:
            yield from row

    def worst_element(self) -> ElementReport:
        return min(self.elements(), key=lambda e: e.sps)


class Sweep(NamedTuple):
    """One matrix element sampled on a frequency grid."""

    freqs: np.ndarray
    values: np.ndarray


def element_sweep(net: NetworkData, element: tuple[int, int], band=None) -> Sweep:
    freqs = net.frequencies
    values = net.element(*element)
    if band is not None:
        mask = (freqs >= band[0]) & (freqs <= band[1])
        freqs, values = freqs[mask], values[mask]
    return Sweep(freqs, values)


def _collocated_gaps(sa: Sweep, sb: Sweep) -> np.ndarray:
    fa = np.asarray(sa.freqs, dtype=np.float64)
    fb = np.asarray(sb.freqs, dtype=np.float64)
    if fa.shape != fb.shape:
        raise GridMismatchError(f"grids differ in length: {fa.size} vs {fb.size}")
    if fa.size == 0:
        raise GridMismatchError("empty sweeps")
    scale = np.maximum(np.abs(fa), np.abs(fb))
    if np.any(np.abs(fa - fb) > GRID_RTOL * scale):
        raise GridMismatchError("frequency grids are not collocated")
    diff = np.asarray(sa.values, dtype=np.complex128) - np.asarray(sb.values, dtype=np.complex128)
    dx, dy = diff.real, diff.imag
    # same arithmetic as the 3D distance with dz = 0
    return np.sqrt(dx * dx + dy * dy)


def d_abs(sa: Sweep, sb: Sweep) -> float:
    """Mean complex-plane distance between two sweeps on the same grid."""
    return float(np.mean(_collocated_gaps(sa, sb)))


def d_rms(sa: Sweep, sb: Sweep) -> float:
    """Root-mean-square complex-plane distance between two sweeps on the
    same grid."""
    g = _collocated_gaps(sa, sb)
    return float(np.sqrt(np.mean(g * g)))


def d_mh_directed(
    sa_cloud: RifPointCloud, sb_cloud: RifPointCloud, nn_mode: NNMode = NNMode.PointSet
) -> tuple[float, np.ndarray]:
    """Directed modified Hausdorff distance from ``sa_cloud`` to ``sb_cloud``.

    Returns the mean nearest distance and the per-point trace as a (K, 2)
    array of (source frequency in Hz, nearest distance).
    """
    if len(sa_cloud) == 0 or len(sb_cloud) == 0:
        raise ComparisonError("empty point cloud")
    if sa_cloud.f_norm != sb_cloud.f_norm:
        raise ComparisonError(
            f"f_norm mismatch: {sa_cloud.f_norm} vs {sb_cloud.f_norm}"
        )
    if NNMode(nn_mode) is NNMode.Polyline:
        d = nearest_distances_polyline(sa_cloud.points, sb_cloud)
    else:
        d, _ = nearest_distances(sa_cloud.points, sb_cloud)
    trace = np.column_stack([sa_cloud.source_freqs_hz, d])
    return float(np.mean(d)), trace


def d_mh(
    sa_cloud: RifPointCloud,
    sb_cloud: RifPointCloud,
    direction: Direction = Direction.AtoB,
    nn_mode: NNMode = NNMode.PointSet,
) -> float:
    return _d_mh_with_trace(sa_cloud, sb_cloud, Direction(direction), nn_mode)[0]


def _d_mh_with_trace(sa_cloud, sb_cloud, direction, nn_mode):
    # Symmetric keeps the A->B trace so traces always follow the model grid.
    if direction is Direction.BtoA:
        return d_mh_directed(sb_cloud, sa_cloud, nn_mode)
    d_ab, trace = d_mh_directed(sa_cloud, sb_cloud, nn_mode)
    if direction is Direction.Symmetric:
        d_ba, _ = d_mh_directed(sb_cloud, sa_cloud, nn_mode)
        return max(d_ab, d_ba), trace
    return d_ab, trace


def sps_from_distance(d: float) -> float:
    return 100.0 * max(1.0 - d, 0.0)


def classify_tier(sps: float, thresholds: TierThresholds | None = None) -> Tier:
    t = thresholds or TierThresholds()
    if sps >= t.good:
        return Tier.Good
    if sps >= t.acceptable:
        return Tier.Acceptable
    if sps >= t.inconclusive:
        return Tier.Inconclusive
    return Tier.Bad


def effective_band(a: NetworkData, b: NetworkData, cfg: ComparisonConfig) -> tuple[float, float]:
    """Frequency interval shared by both networks and the configured caps."""
    fa, fb = a.frequencies, b.frequencies
    lo = max(fa[0], fb[0], cfg.band_min)
    hi = min(fa[-1], fb[-1]) if cfg.band_max is None else min(fa[-1], fb[-1], cfg.band_max)
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise EmptyBandError(f"no common frequency band ({lo:g} Hz > {hi:g} Hz)")
    need = 2 if cfg.nn_mode is NNMode.Polyline else 1
    for net in (a, b):
        count = int(np.count_nonzero((net.frequencies >= lo) & (net.frequencies <= hi)))
        if count < need:
            raise EmptyBandError(
                f"{net.source_label or 'network'} has {count} samples in "
                f"[{lo:g}, {hi:g}] Hz, need {need}"
            )
    return lo, hi


def compare(a: NetworkData, b: NetworkData, cfg: ComparisonConfig | None = None) -> SimilarityReport:
    """Compare network ``a`` (model) with ``b`` (measurement) element by element.

    Each element is scored with the modified Hausdorff distance over the
    common band; the matrix distance is the worst element distance and the
    matrix SPS the lowest element SPS.
    """
    cfg = cfg or ComparisonConfig()
    if a.n_ports != b.n_ports:
        raise ComparisonError(f"port count mismatch: {a.n_ports} vs {b.n_ports}")
    for net in (a, b):
        if net.parameter != "S":
            raise ComparisonError(
                f"{net.source_label or 'network'} holds {net.parameter}-parameters; "
                "only S-parameters can be compared"
            )
    band = effective_band(a, b, cfg)
    n = a.n_ports
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            ca = to_rif(a, (i, j), cfg.f_norm, band)
            cb = to_rif(b, (i, j), cfg.f_norm, band)
            d, trace = _d_mh_with_trace(ca, cb, cfg.direction, cfg.nn_mode)
            sps = sps_from_distance(d)
            row.append(ElementReport((i, j), d, sps, classify_tier(sps, cfg.tiers), trace, band))
        rows.append(tuple(row))
    flat = [e for row in rows for e in row]
    d_matrix = max(e.d_mh for e in flat)
    sps_matrix = min(e.sps for e in flat)
    return SimilarityReport(
        per_element=tuple(rows),
        d_mh_matrix=d_matrix,
        sps_matrix=sps_matrix,
        tier=classify_tier(sps_matrix, cfg.tiers),
        config_echo=cfg,
        labels=(a.source_label, b.source_label),
        effective_band=band,
    )

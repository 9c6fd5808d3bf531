"""Analytic 2-port fixtures with known ground truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .touchstone import NetworkData


def frequency_grid(f_start: float, f_stop: float, step: float) -> np.ndarray:
    """Equidistant grid ``f_start + k*step`` up to and including ``f_stop``
    (within a relative slack of 1e-9 steps)."""
    if not (0 < f_start < f_stop and step > 0):
        raise ValueError(f"invalid grid ({f_start}, {f_stop}, {step})")
    n = int(np.floor((f_stop - f_start) / step + 1e-9)) + 1
    return f_start + step * np.arange(n)


@dataclass(frozen=True)
class LineSpec:
    length: float  # m
    delay_per_m: float  # s/m
    loss_db_per_m_at_f0: float
    f0: float  # Hz
    grid: tuple[float, float, float]  # (f_start, f_stop, step) in Hz

    def __post_init__(self):
        if self.length < 0 or self.delay_per_m < 0 or self.loss_db_per_m_at_f0 < 0:
            raise ValueError("length, delay and loss must be non-negative")
        if not self.f0 > 0:
            raise ValueError("f0 must be positive")
        frequency_grid(*self.grid)


def ideal_line(spec: LineSpec, label: str = "ideal_line") -> NetworkData:
    """Matched transmission line with sqrt(f) loss.

    S11 = S22 = 0 and S21 = S12 = A(f) exp(-j 2 pi f tau) where
    tau = length * delay_per_m and A(f) = 10^(-loss * length * sqrt(f/f0) / 20).
    """
    f = frequency_grid(*spec.grid)
    tau = spec.length * spec.delay_per_m
    amp = 10.0 ** (-spec.loss_db_per_m_at_f0 * spec.length * np.sqrt(f / spec.f0) / 20.0)
    s21 = amp * np.exp(-2j * np.pi * f * tau)
    mats = np.zeros((f.size, 2, 2), dtype=np.complex128)
    mats[:, 1, 0] = s21
    mats[:, 0, 1] = s21
    return NetworkData(2, f, mats, source_label=label)


def series_rlc_shunt(f: np.ndarray, f_res: float, q: float, r_over_z0: float) -> np.ndarray:
    """S-matrices of a series RLC branch shunted across a matched line.

    The branch impedance is R (1 + jQ (f/f_res - f_res/f)); at resonance it
    drops to R and S21 dips to 2R / (2R + Z0).
    """
    z = r_over_z0 * (1.0 + 1j * q * (f / f_res - f_res / f))
    den = 2.0 * z + 1.0
    s21 = 2.0 * z / den
    s11 = -1.0 / den
    mats = np.empty((f.size, 2, 2), dtype=np.complex128)
    mats[:, 0, 0] = s11
    mats[:, 1, 1] = s11
    mats[:, 0, 1] = s21
    mats[:, 1, 0] = s21
    return mats


def shifted_resonator_pair(
    f_res: float,
    shift: float,
    q: float,
    grid: tuple[float, float, float],
    r_over_z0: float = 0.05,
) -> tuple[NetworkData, NetworkData]:
    """Two notch responses that differ only in resonance frequency
    (``f_res`` and ``f_res + shift``)."""
    f = frequency_grid(*grid)
    if not f[0] <= f_res <= f[-1]:
        raise ValueError(f"f_res={f_res} outside the grid [{f[0]}, {f[-1]}]")
    if not q > 0 or r_over_z0 < 0:
        raise ValueError("q must be positive and r_over_z0 non-negative")
    a = NetworkData(2, f, series_rlc_shunt(f, f_res, q, r_over_z0), source_label="resonator_a")
    b = NetworkData(
        2, f, series_rlc_shunt(f, f_res + shift, q, r_over_z0), source_label="resonator_b"
    )
    return a, b

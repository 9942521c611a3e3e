"""Lattice norms: L^p Riemann sums and coefficient-sum (Wiener type) norms.

Coefficient norms use the per-mode Euclidean modulus of the coefficient
vector.  The zero mode is kept in the Wiener and weighted-Wiener norms and
excluded from the homogeneous ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .field import Field, SpectralField, mode_magnitude


@dataclass(frozen=True)
class NormValue:
    value: float
    norm_id: str
    units: object = None

    def __post_init__(self):
        if math.isnan(self.value) or self.value < 0:
            raise ValueError(f"invalid norm value {self.value}")

    def __float__(self):
        return self.value


def pointwise_magnitude(f: Field) -> np.ndarray:
    if f.rank == 0:
        return np.abs(f.data)
    axes = tuple(range(f.rank))
    return np.sqrt(np.sum(f.data ** 2, axis=axes))


def lp_norm(f: Field, p: float) -> NormValue:
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    mag = pointwise_magnitude(f)
    if math.isinf(p):
        return NormValue(float(mag.max()), "Linf")
    val = (np.sum(mag ** p) * f.grid.cell_volume) ** (1.0 / p)
    return NormValue(float(val), f"L{p:g}")


def japanese_bracket(k_abs: np.ndarray) -> np.ndarray:
    """Weight (2 + |k|^2)^(1/2)."""
    return np.sqrt(2.0 + k_abs ** 2)


def wiener_norm(f: Field | SpectralField) -> NormValue:
    return NormValue(float(np.sum(mode_magnitude(f))), "W")


def vsw_norm(f: Field | SpectralField, s: float) -> NormValue:
    w = japanese_bracket(f.grid.wavenumber) ** s
    return NormValue(float(np.sum(w * mode_magnitude(f))), f"V^{s:g}")


def hdot_norm(f: Field | SpectralField, s: float) -> NormValue:
    """(L^3 sum_{k != 0} |k|^(2s) |c_k|^2)^(1/2)."""
    k = f.grid.wavenumber
    nz = k > 0
    val = f.grid.volume * np.sum(k[nz] ** (2 * s) * mode_magnitude(f)[nz] ** 2)
    return NormValue(float(np.sqrt(val)), f"Hdot^{s:g}")


def weighted_wiener(f: Field | SpectralField, kappa: float) -> NormValue:
    """sum_{k != 0} |k|^kappa |c_k|."""
    k = f.grid.wavenumber
    nz = k > 0
    return NormValue(float(np.sum(k[nz] ** kappa * mode_magnitude(f)[nz])), f"K^{kappa:g}")


def superlevel_measure(f: Field, t: float) -> float:
    """Measure of {|f| > t} by node counting.

    Nodes lying on the level itself (within rounding) count with weight 1/2,
    the midpoint rule for a crossing that sits exactly on a node.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    mag = pointwise_magnitude(f)
    tie = 64 * np.finfo(float).eps * max(float(mag.max(initial=0.0)), t)
    if t >= float(mag.max(initial=0.0)) - tie:
        return 0.0  # the level touches only maxima: no crossing
    on_level = np.abs(mag - t) <= tie
    count = np.count_nonzero((mag > t) & ~on_level) + 0.5 * np.count_nonzero(on_level & (t > 0))
    return float(count * f.grid.cell_volume)


def norm_table_rows(field_id: str, f: Field, ps=(2, 6, math.inf), ss=(0, 1, 2)) -> list[tuple]:
    """Rows (field_id, norm_id, s_or_p, value) for a CSV norm table."""
    rows = [(field_id, "L", p, lp_norm(f, p).value) for p in ps]
    rows += [(field_id, "V", s, vsw_norm(f, s).value) for s in ss]
    rows += [(field_id, "Hdot", s, hdot_norm(f, s).value) for s in ss if s > 0]
    rows.append((field_id, "W", 0, wiener_norm(f).value))
    return rows

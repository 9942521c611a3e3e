"""Radial cutoffs, low/high frequency splitting and the commutator [beta(sD), w].

Transitions use the odd-order polynomial smoothstep
``S(t) = t^(m+1) sum_j C(m+j, j) (1-t)^j`` (order 2m+1); order 7 is C^3.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb
from typing import Literal, NamedTuple

import numpy as np

from .field import (Field, GridMismatchError, GridSpec, coefficients,
                    from_coefficients, multiply)
from .operators import MultiplierSpec, apply_multiplier
from .report import CheckReport

Kind = Literal["low-pass", "high-pass", "bump"]


class KernelDecayError(ValueError):
    pass


def smoothstep(t: np.ndarray, order: int = 7) -> np.ndarray:
    if order < 5 or order % 2 == 0:
        raise ValueError("smoothstep order must be odd and >= 5")
    m = (order - 1) // 2
    t = np.clip(t, 0.0, 1.0)
    return t ** (m + 1) * sum(comb(m + j, j) * (1 - t) ** j for j in range(m + 1))


@dataclass(frozen=True)
class CutoffProfile:
    """Radial profile: low-pass/bump equal 1 inside ``inner_radius`` and 0 past ``outer_radius``;
    high-pass is the complement."""

    kind: Kind
    inner_radius: float
    outer_radius: float
    order: int = 7

    def __post_init__(self):
        if not 0 < self.inner_radius < self.outer_radius:
            raise ValueError("need 0 < inner_radius < outer_radius")
        if self.kind not in ("low-pass", "high-pass", "bump"):
            raise ValueError(f"unknown cutoff kind {self.kind!r}")

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        t = (r - self.inner_radius) / (self.outer_radius - self.inner_radius)
        s = smoothstep(t, self.order)
        return s if self.kind == "high-pass" else 1.0 - s

    def derivative(self, r) -> np.ndarray:
        """d/dr of the profile, analytic."""
        r = np.asarray(r, dtype=float)
        width = self.outer_radius - self.inner_radius
        t = np.clip((r - self.inner_radius) / width, 0.0, 1.0)
        m = (self.order - 1) // 2
        # S'(t) = (2m+1) C(2m, m) t^m (1-t)^m
        ds = (2 * m + 1) * comb(2 * m, m) * t ** m * (1 - t) ** m / width
        return ds if self.kind == "high-pass" else -ds

    def complement(self) -> "CutoffProfile":
        kind = "low-pass" if self.kind == "high-pass" else "high-pass"
        return CutoffProfile(kind, self.inner_radius, self.outer_radius, self.order)

    def multiplier(self, scale: float = 1.0) -> MultiplierSpec:
        """The operator profile(scale |D|)."""
        return MultiplierSpec(lambda k: self(scale * np.sqrt(np.sum(k * k, axis=0))),
                              float(self(0.0)), "real-even-symmetric",
                              f"{self.kind}({scale:g}D)")


def build_cutoff(kind: Kind, inner_radius: float, outer_radius: float,
                 order: int = 7) -> CutoffProfile:
    return CutoffProfile(kind, inner_radius, outer_radius, order)


def plateau_identity_check(chi: CutoffProfile, eps: float, grid: GridSpec,
                           tol: float = 1e-15) -> CheckReport:
    """(1-chi)(k/eps) (1-chi)(k) = (1-chi)(k) on every lattice point, for eps <= 1/2."""
    tilde = chi.complement() if chi.kind != "high-pass" else chi
    r = grid.wavenumber
    lhs = tilde(r / eps) * tilde(r)
    rhs = tilde(r)
    return CheckReport.compare("plateau-identity", "(1-chi)(k/eps)(1-chi)(k) = (1-chi)(k)",
                               residual=np.max(np.abs(lhs - rhs)), tol=tol, grid=grid,
                               extra={"eps": eps})


def band_disjointness_check(alpha0: CutoffProfile, grid: GridSpec, mu: float = 6.0,
                            tol: float = 0.0) -> CheckReport:
    """beta1(2mu/(mu-2) k) alpha0(mu k) = 0 on the lattice (mu = 6 gives beta1(3k) alpha0(6k))."""
    beta1 = alpha0.complement()
    r = grid.wavenumber
    prod = beta1(2 * mu / (mu - 2) * r) * alpha0(mu * r)
    return CheckReport.compare("band-disjointness", "beta1(3D) alpha0(6D) = 0",
                               residual=np.max(np.abs(prod)), tol=tol, grid=grid,
                               extra={"mu": mu})


class BandSplit(NamedTuple):
    low: Field
    high: Field


def split_bands(v: Field, alpha0: CutoffProfile) -> BandSplit:
    if alpha0.kind != "low-pass":
        raise ValueError("split_bands needs a low-pass profile")
    c = coefficients(v)
    a = alpha0(v.grid.wavenumber)
    low = from_coefficients(v.grid, a * c, divergence_free=v.divergence_free, units=v.units)
    high = from_coefficients(v.grid, (1 - a) * c, divergence_free=v.divergence_free,
                             units=v.units)
    return BandSplit(low, high)


# -- commutator ----------------------------------------------------------------

def commutator_direct(beta: CutoffProfile, scale: float, w: Field, u: Field) -> Field:
    """beta(scale D)(w u) - w beta(scale D) u with dealiased products."""
    if w.grid != u.grid:
        raise GridMismatchError("grid mismatch")
    if w.rank != 0:
        raise ValueError("w must be a scalar field")
    m = beta.multiplier(scale)
    return apply_multiplier(m, multiply(w, u)) - multiply(w, apply_multiplier(m, u))


def _kernel(beta: CutoffProfile, scale: float, grid: GridSpec) -> np.ndarray:
    """Periodic convolution kernel K with beta(sD) g = sum_y K(x - y) g(y) h^3."""
    sym = beta(scale * grid.wavenumber) * ~grid.nyquist_mask
    return np.fft.ifftn(sym).real / grid.cell_volume


def kernel_decay_ratio(beta: CutoffProfile, scale: float, grid: GridSpec) -> float:
    """Largest kernel magnitude on the half-period faces over its peak.

    For a high-pass profile the identity's delta is removed first, i.e. the
    smooth kernel of the complementary low-pass is measured.
    """
    prof = beta.complement() if beta.kind == "high-pass" else beta
    k = np.abs(_kernel(prof, scale, grid))
    h = grid.n // 2
    face = max(k[h].max(), k[:, h].max(), k[:, :, h].max())
    peak = k.max()
    return float(face / peak) if peak > 0 else 0.0


def _wrapped_offsets(grid: GridSpec) -> np.ndarray:
    i = np.arange(grid.n)
    i = np.where(i >= grid.n // 2, i - grid.n, i)
    return i


def commutator_kernel(beta: CutoffProfile, scale: float, w: Field, u: Field,
                      quadrature_order: int, *, decay_tol: float = 1e-6,
                      strict: bool = False, block: int = 512) -> Field:
    """Evaluate [beta(sD), w] u from its kernel form.

    result(x) = int_0^1 sum_z G(z) . grad w(x + theta z) u(x + z) h^3 dtheta,
    with G(z) = K(z) z, z the minimal-image displacement, the theta integral by
    Gauss-Legendre of the given order and the z sum by the periodic
    trapezoidal rule.  Cost is O(n^6) per theta node; meant for n <= 16.

    With ``strict`` the call refuses when the kernel does not decay below
    ``decay_tol`` at half period.
    """
    grid = w.grid
    if u.grid != grid:
        raise GridMismatchError("grid mismatch")
    if w.rank != 0:
        raise ValueError("w must be a scalar field")
    ratio = kernel_decay_ratio(beta, scale, grid)
    if ratio >= decay_tol:
        msg = (f"kernel magnitude at half period is {ratio:.2e} of its peak "
               f"(needs < {decay_tol:g}); the periodic kernel identity stays exact "
               f"but no longer models the whole-space integral")
        if strict:
            raise KernelDecayError(msg)
        warnings.warn(msg, stacklevel=2)

    n, h = grid.n, grid.spacing
    K = _kernel(beta, scale, grid)
    off = _wrapped_offsets(grid)
    zi = np.array(np.meshgrid(off, off, off, indexing="ij")).reshape(3, -1)
    Z = zi * h
    G = (K.reshape(-1) * Z)
    G[:, np.all(zi == 0, axis=0)] = 0.0

    kvec = grid.wavevectors
    gw = 1j * kvec * coefficients(w)[None] * ~grid.nyquist_mask
    udat = u.data.reshape((-1,) + grid.shape)
    keep = np.any(G != 0, axis=0)
    zi, Z, G = zi[:, keep], Z[:, keep], G[:, keep]

    nodes, weights = np.polynomial.legendre.leggauss(quadrature_order)
    nodes, weights = 0.5 * (nodes + 1), 0.5 * weights
    ax = np.arange(n)
    out = np.zeros_like(udat)
    for theta, wt in zip(nodes, weights):
        for b in range(0, Z.shape[1], block):
            zb, gb, ib = Z[:, b:b + block], G[:, b:b + block], zi[:, b:b + block]
            phase = np.exp(1j * theta * np.einsum("ib,i...->b...", zb, kvec))
            shifted = np.fft.ifftn(phase[:, None] * gw[None], axes=(-3, -2, -1)).real * n ** 3
            proj = np.einsum("ib,bi...->b...", gb, shifted)
            # u(x + z) for every offset in the block
            i0 = (ax[None, :] + ib[0][:, None]) % n
            i1 = (ax[None, :] + ib[1][:, None]) % n
            i2 = (ax[None, :] + ib[2][:, None]) % n
            us = udat[:, i0[:, :, None, None], i1[:, None, :, None], i2[:, None, None, :]]
            out += wt * h ** 3 * np.einsum("b...,cb...->c...", proj, us)
    return Field(grid, out.reshape(u.data.shape))


def commutator_kernel_check(beta: CutoffProfile, scale: float, w: Field, u: Field,
                            quadrature_order: int, tol: float = 1e-3, **kw) -> CheckReport:
    direct = commutator_direct(beta, scale, w, u)
    kern = commutator_kernel(beta, scale, w, u, quadrature_order, **kw)
    err = np.max(np.abs(kern.data - direct.data))
    return CheckReport.compare(
        "commutator-kernel", "[beta(3D), w] u as Taylor-kernel integral",
        residual=err, scale=np.max(np.abs(direct.data)), tol=tol, grid=w.grid,
        lhs=np.max(np.abs(kern.data)), rhs=np.max(np.abs(direct.data)),
        extra={"quadrature_order": quadrature_order,
               "kernel_decay_ratio": kernel_decay_ratio(beta, scale, w.grid)})

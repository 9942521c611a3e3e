"""Fourier-multiplier operators on periodic fields.

Zero-mode conventions: the Leray projector keeps constants (P(0) = I), its
complement removes them, and |k|^-2 type symbols send the mean to zero.
Modes on the Nyquist planes (some |m_i| = n/2) have no conjugate partner and
are dropped by every multiplier.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .field import (Field, GridMismatchError, SpectralField, coefficients, cross, dealiased,
                    from_coefficients, memo, square_norm)

Parity = Literal["real-even-symmetric", "imaginary-odd-antisymmetric", "other"]

EYE = np.eye(3)


@dataclass(frozen=True)
class MultiplierSpec:
    """Symbol ``m(k)`` acting on coefficients.

    ``symbol`` maps a wavevector array of shape (3, ...) to either a scalar
    array (...) or a matrix array (a, b, ...).  It is never evaluated at
    k = 0; ``zero_mode`` supplies that value instead.
    """

    symbol: Callable[[np.ndarray], np.ndarray]
    zero_mode: np.ndarray | float
    parity: Parity = "other"
    name: str = ""

    def evaluate(self, k: np.ndarray) -> np.ndarray:
        zero = np.all(k == 0, axis=0)
        safe = np.where(zero, 1.0, k)
        with np.errstate(divide="ignore", invalid="ignore"):
            m = np.asarray(self.symbol(safe), dtype=complex)
        m = np.broadcast_to(m, m.shape[:-3] + k.shape[1:]).copy()
        z0 = np.asarray(self.zero_mode, dtype=complex)
        m[..., zero] = z0.reshape(z0.shape + (1,)) if z0.ndim else z0
        return m

    def sup_norm(self, k: np.ndarray) -> float:
        """Largest operator norm of the symbol over the given wavevectors."""
        m = self.evaluate(k)
        if m.ndim == k.ndim - 1:
            return float(np.max(np.abs(m)))
        mats = np.moveaxis(m.reshape(m.shape[:2] + (-1,)), -1, 0)
        return float(np.max(np.linalg.norm(mats, ord=2, axis=(1, 2))))


def apply_multiplier(m: MultiplierSpec, v: Field) -> Field | SpectralField:
    """Coefficientwise ``m(k) c_k``; matrix symbols contract on the first tensor index.

    Symbols in one of the two reality-preserving parity classes return a real
    Field; any other symbol returns complex coefficients flagged non-real.
    """
    grid = v.grid
    sym = m.evaluate(grid.wavevectors)
    c = coefficients(v)
    if sym.ndim == 3:
        out = sym * c
    elif sym.ndim == 5:
        if v.rank < 1 or c.shape[0] != sym.shape[1]:
            raise ValueError(f"matrix multiplier {m.name!r} needs a vector input")
        out = np.einsum("ab...,b...->a...", sym, c)
    else:
        raise ValueError("symbol must be scalar- or matrix-valued")
    out = out * ~grid.nyquist_mask
    if m.parity == "other":
        return SpectralField(grid, out, real=False, units=v.units)
    return from_coefficients(grid, out, units=v.units)


def _check(v: Field, rank: int, what: str):
    if v.rank != rank:
        raise ValueError(f"{what} expects a rank-{rank} field, got rank {v.rank}")


# -- symbols -------------------------------------------------------------------

def curl_symbol(k: np.ndarray) -> np.ndarray:
    """i [k]_x : the curl matrix, purely imaginary and antisymmetric (Hermitian)."""
    k1, k2, k3 = k
    z = np.zeros_like(k1)
    return 1j * np.array([[z, -k3, k2], [k3, z, -k1], [-k2, k1, z]])


def leray_symbol(k: np.ndarray) -> np.ndarray:
    k2 = np.sum(k * k, axis=0)
    return EYE.reshape(3, 3, *([1] * (k.ndim - 1))) - k[:, None] * k[None, :] / k2


CURL = MultiplierSpec(curl_symbol, np.zeros((3, 3)), "imaginary-odd-antisymmetric", "curl")
LERAY = MultiplierSpec(leray_symbol, EYE, "real-even-symmetric", "leray")
LERAY_COMPLEMENT = MultiplierSpec(
    lambda k: k[:, None] * k[None, :] / np.sum(k * k, axis=0),
    np.zeros((3, 3)), "real-even-symmetric", "leray-complement")
NEG_LAPLACIAN = MultiplierSpec(lambda k: np.sum(k * k, axis=0), 0.0,
                               "real-even-symmetric", "-laplacian")
INV_NEG_LAPLACIAN = MultiplierSpec(lambda k: 1.0 / np.sum(k * k, axis=0), 0.0,
                                   "real-even-symmetric", "inverse -laplacian")
IDENTITY = MultiplierSpec(lambda k: np.ones(k.shape[1:]), 1.0, "real-even-symmetric",
                          "identity")


def partial_symbol(axis: int) -> MultiplierSpec:
    return MultiplierSpec(lambda k: 1j * k[axis], 0.0, "imaginary-odd-antisymmetric",
                          f"d/dx{axis + 1}")


# -- differential operators ----------------------------------------------------

def curl(v: Field) -> Field:
    _check(v, 1, "curl")
    return memo(v, "curl", _curl)


def _curl(v: Field) -> Field:
    out = apply_multiplier(CURL, v)
    return out.replace(out.data, divergence_free=True)


def curl2(v: Field) -> Field:
    return curl(curl(v))


def grad(s: Field) -> Field:
    """Gradient; for tensor input the derivative index is appended last: G[..., j] = d_j s[...]."""
    c = coefficients(s)
    out = 1j * np.expand_dims(c, -4) * s.grid.wavevectors
    out = out * ~s.grid.nyquist_mask
    return from_coefficients(s.grid, out, units=s.units)


def div(v: Field) -> Field:
    """Divergence contracting the first tensor index: (div T)_... = sum_j d_j T[j, ...]."""
    if v.rank < 1 or v.tensor_shape[0] != 3:
        raise ValueError("div expects a vector or matrix field")
    c = coefficients(v)
    k = v.grid.wavevectors.reshape((3,) + (1,) * (v.rank - 1) + v.grid.shape)
    out = np.sum(1j * k * c, axis=0) * ~v.grid.nyquist_mask
    return from_coefficients(v.grid, out, units=v.units)


def laplacian(f: Field) -> Field:
    return -apply_multiplier(NEG_LAPLACIAN, f)


def inv_neg_laplacian(f: Field) -> Field:
    return apply_multiplier(INV_NEG_LAPLACIAN, f)


def leray_project(v: Field) -> Field:
    _check(v, 1, "leray_project")
    out = apply_multiplier(LERAY, v)
    return out.replace(out.data, divergence_free=True)


def leray_complement(v: Field) -> Field:
    _check(v, 1, "leray_complement")
    return apply_multiplier(LERAY_COMPLEMENT, v)


def leray_via_curl(v: Field) -> Field:
    """P v computed as |D|^-2 C^2 v; agrees with leray_project off the zero mode."""
    return inv_neg_laplacian(curl2(v))


def riesz_r0(T: Field) -> Field:
    """sum_j |D|^-2 div d_j (T[j]) for a matrix field with T[j, i] = (v_j v)_i."""
    _check(T, 2, "riesz_r0")
    c = coefficients(T)
    k = T.grid.wavevectors
    with np.errstate(divide="ignore", invalid="ignore"):
        k2 = np.where(T.grid.wavenumber == 0, 1.0, T.grid.wavenumber ** 2)
    out = -np.einsum("j...,i...,ji...->...", k, k, c) / k2
    out[0, 0, 0] = 0.0
    out = out * ~T.grid.nyquist_mask
    return from_coefficients(T.grid, out)


def s0_map(v: Field) -> Field:
    """Columns u_l = P(v_l v - |v|^2 e_l / 2), stacked as U[l, i]; mean set to zero."""
    _check(v, 1, "s0_map")

    def expr(x):
        t = x[:, None] * x[None, :]
        t -= 0.5 * np.sum(x * x, axis=0) * np.eye(3).reshape(3, 3, 1, 1, 1)
        return t
    T = dealiased(expr, v)
    c = coefficients(T)
    sym = LERAY.evaluate(v.grid.wavevectors)
    out = np.einsum("ab...,lb...->la...", sym, c)
    out[..., 0, 0, 0] = 0.0
    out = out * ~v.grid.nyquist_mask
    return from_coefficients(v.grid, out)


def div_s0(U: Field) -> Field:
    """sum_l d_l u_l for U[l, i] = (u_l)_i."""
    return div(U)


def lamb_vector(v: Field) -> Field:
    """Dealiased (curl v) x v."""
    return memo(v, "lamb", lambda u: cross(curl(u), u))


def is_divergence_free(v: Field, tol: float = 1e-10) -> bool:
    c = coefficients(v)
    k = v.grid.wavevectors
    kc = np.abs(np.sum(k * c, axis=0))
    ref = np.max(v.grid.wavenumber * np.sqrt(np.sum(np.abs(c) ** 2, axis=0)))
    return bool(np.max(kc) <= tol * ref) if ref > 0 else True


def require_same_grid(*fields: Field):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise GridMismatchError("grid mismatch")


__all__ = [
    "MultiplierSpec", "apply_multiplier", "curl", "curl2", "grad", "div", "laplacian",
    "inv_neg_laplacian", "leray_project", "leray_complement", "leray_via_curl", "riesz_r0",
    "s0_map", "div_s0", "lamb_vector", "is_divergence_free", "CURL", "LERAY",
    "LERAY_COMPLEMENT", "IDENTITY", "NEG_LAPLACIAN", "INV_NEG_LAPLACIAN", "square_norm",
]

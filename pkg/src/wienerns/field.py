"""Periodic-box fields and their Fourier-series coefficients.

A field on the box [0, L)^3 sampled at n^3 uniform nodes is stored as a real
array of shape ``(*tensor_shape, n, n, n)``.  Its coefficients ``c_k`` follow
the series convention ``v(x) = sum_k c_k exp(i k.x)``, so ``c = fftn(v) / n^3``
and the wavevectors are ``k = (2 pi / L) m`` with integer ``m``.

Products are dealiased: both factors are interpolated onto a 2n grid, the
pointwise product is taken there, and the result is truncated back to modes
with every ``|m_i| <= dealias_limit``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.fft as sp_fft

from .report import CheckReport

SPATIAL_AXES = (-3, -2, -1)


class InvalidFieldError(ValueError):
    pass


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    n_per_axis: int = 32
    box_length: float = 2 * np.pi
    dealias_limit: int = 10

    def __post_init__(self):
        n = self.n_per_axis
        if n < 4 or n % 2:
            raise ValueError(f"n_per_axis must be even and >= 4, got {n}")
        if not self.box_length > 0:
            raise ValueError("box_length must be positive")
        if not 1 <= self.dealias_limit <= n // 2 - 1:
            raise ValueError(
                f"dealias_limit must lie in [1, {n // 2 - 1}], got {self.dealias_limit}")

    @property
    def n(self) -> int:
        return self.n_per_axis

    @property
    def spacing(self) -> float:
        return self.box_length / self.n_per_axis

    @property
    def cell_volume(self) -> float:
        return self.spacing ** 3

    @property
    def volume(self) -> float:
        return self.box_length ** 3

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n,) * 3

    @cached_property
    def mode_indices(self) -> np.ndarray:
        """Integer lattice indices m, shape (3, n, n, n), components in (-n/2, n/2]."""
        m = np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)
        m[self.n // 2] = self.n // 2
        return np.array(np.meshgrid(m, m, m, indexing="ij"))

    @cached_property
    def wavevectors(self) -> np.ndarray:
        return (2 * np.pi / self.box_length) * self.mode_indices

    @cached_property
    def wavenumber(self) -> np.ndarray:
        return np.sqrt(np.sum(self.wavevectors ** 2, axis=0))

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True on modes with some |m_i| = n/2 (they have no conjugate partner)."""
        return np.any(np.abs(self.mode_indices) == self.n // 2, axis=0)

    @cached_property
    def band_mask(self) -> np.ndarray:
        return np.all(np.abs(self.mode_indices) <= self.dealias_limit, axis=0)

    @cached_property
    def coordinates(self) -> np.ndarray:
        x = np.arange(self.n) * self.spacing
        return np.array(np.meshgrid(x, x, x, indexing="ij"))

    def as_dict(self) -> dict:
        return {"n_per_axis": self.n_per_axis, "box_length": self.box_length,
                "dealias_limit": self.dealias_limit}


@dataclass(frozen=True, eq=False)
class Field:
    """Real samples of a scalar (rank 0), vector (rank 1) or matrix (rank 2) field."""

    grid: GridSpec
    data: np.ndarray
    divergence_free: bool = False
    units: object = None
    name: str = ""
    _cache: dict = dc_field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.shape[-3:] != self.grid.shape:
            raise GridMismatchError(
                f"sample shape {data.shape[-3:]} does not match grid {self.grid.shape}")
        data.setflags(write=False)  # samples are immutable, so derived caches stay valid
        object.__setattr__(self, "data", data)

    @property
    def rank(self) -> int:
        return self.data.ndim - 3

    @property
    def tensor_shape(self) -> tuple[int, ...]:
        return self.data.shape[:-3]

    def replace(self, data, **kw) -> "Field":
        kw.setdefault("divergence_free", False)
        return Field(self.grid, data, units=kw.pop("units", self.units), **kw)

    def __add__(self, other):
        _same_grid(self, other)
        return self.replace(self.data + other.data)

    def __sub__(self, other):
        _same_grid(self, other)
        return self.replace(self.data - other.data)

    def __neg__(self):
        return self.replace(-self.data, divergence_free=self.divergence_free)

    def __mul__(self, scalar):
        if isinstance(scalar, Field):
            raise TypeError("use multiply() for dealiased field products")
        return self.replace(scalar * self.data, divergence_free=self.divergence_free)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: GridSpec
    coefficients: np.ndarray
    real: bool = True
    divergence_free: bool = False
    units: object = dc_field(default=None)

    @property
    def rank(self) -> int:
        return self.coefficients.ndim - 3


def _same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")


def zeros(grid: GridSpec, tensor_shape=()) -> Field:
    return Field(grid, np.zeros(tuple(tensor_shape) + grid.shape))


def from_function(grid: GridSpec, fn: Callable, **kw) -> Field:
    """Sample ``fn(x1, x2, x3)`` on the grid nodes."""
    x1, x2, x3 = grid.coordinates
    data = np.asarray(fn(x1, x2, x3), dtype=float)
    data = np.broadcast_to(data, data.shape[:-3] + grid.shape).copy()
    return Field(grid, data, **kw)


def forward_transform(f: Field) -> SpectralField:
    if not np.all(np.isfinite(f.data)):
        raise InvalidFieldError("field samples must be finite")
    c = sp_fft.fftn(f.data, axes=SPATIAL_AXES) / f.grid.n ** 3
    return SpectralField(f.grid, c, real=True, divergence_free=f.divergence_free,
                         units=f.units)


def inverse_transform(s: SpectralField, tol: float = 1e-12) -> Field:
    data = np.fft.ifftn(s.coefficients, axes=SPATIAL_AXES) * s.grid.n ** 3
    if s.real:
        scale = np.max(np.abs(data.real)) if data.size else 0.0
        residue = np.max(np.abs(data.imag)) if data.size else 0.0
        if residue > tol * max(scale, 1.0):
            raise InvalidFieldError(
                f"imaginary residue {residue:.3e} exceeds {tol:g} of field magnitude")
    return Field(s.grid, data.real.copy(), divergence_free=s.divergence_free, units=s.units)


def coefficients(f: Field | SpectralField) -> np.ndarray:
    if isinstance(f, SpectralField):
        return f.coefficients
    return sp_fft.fftn(f.data, axes=SPATIAL_AXES) / f.grid.n ** 3


def from_coefficients(grid: GridSpec, c: np.ndarray, **kw) -> Field:
    """Physical field from series coefficients; the imaginary part is dropped."""
    data = sp_fft.ifftn(c, axes=SPATIAL_AXES).real * grid.n ** 3
    return Field(grid, data, **kw)


def negated_index(c: np.ndarray) -> np.ndarray:
    """Array whose entry at k is the input's entry at -k (mod n)."""
    out = np.flip(c, axis=SPATIAL_AXES)
    return np.roll(out, 1, axis=SPATIAL_AXES)


def check_reality(w: SpectralField, tol: float = 1e-12) -> CheckReport:
    c = w.coefficients
    mismatch = np.max(np.abs(c - np.conj(negated_index(c)))) if c.size else 0.0
    scale = np.max(np.abs(c)) if c.size else 0.0
    return CheckReport.compare(
        "reality", "c_{-k} = conj(c_k)", residual=float(mismatch),
        scale=float(scale), tol=tol, grid=w.grid)


def spectrum_support(w: SpectralField | Field, threshold: float = 0.0) -> set[tuple]:
    """Wavevectors (as float 3-tuples) where the coefficient magnitude exceeds threshold.

    Magnitudes below the transform's rounding floor (64 eps times the largest
    coefficient) count as zero, so threshold 0 gives the exact support.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    c = coefficients(w)
    mag = _mode_magnitude(c)
    floor = 64 * np.finfo(float).eps * (mag.max() if mag.size else 0.0)
    hits = np.argwhere(mag > max(threshold, floor))
    k = w.grid.wavevectors
    return {tuple(float(k[a][tuple(h)]) for a in range(3)) for h in hits}


def _mode_magnitude(c: np.ndarray) -> np.ndarray:
    lead = tuple(range(c.ndim - 3))
    return np.sqrt(np.sum(np.abs(c) ** 2, axis=lead)) if lead else np.abs(c)


def mode_magnitude(f: Field | SpectralField) -> np.ndarray:
    """Per-wavevector Euclidean (Frobenius for matrices) modulus of the coefficients."""
    return _mode_magnitude(coefficients(f))


def band_limit(f: Field) -> Field:
    """Zero all modes outside the retained band."""
    c = coefficients(f) * f.grid.band_mask
    return from_coefficients(f.grid, c, divergence_free=f.divergence_free, units=f.units)


def _half_index(n: int) -> tuple:
    """Positions of the n-grid modes (Nyquist planes excluded) inside a 2n real-FFT array."""
    m = np.fft.fftfreq(n, 1.0 / n).astype(int)
    full = np.where(np.abs(m) < n // 2)[0]
    return full, m[full] % (2 * n), np.arange(n // 2)


def fine_samples(f: Field) -> np.ndarray:
    """Samples of ``f`` on the doubled grid, by exact trigonometric interpolation.

    Modes on the Nyquist planes are dropped, as in every multiplier.  The
    result is cached on the (immutable) field and returned read-only.
    """
    if "fine" in f._cache:
        return f._cache["fine"]
    n = f.grid.n
    c = sp_fft.rfftn(f.data, axes=SPATIAL_AXES) / n ** 3
    full, big_idx, last = _half_index(n)
    big = np.zeros(c.shape[:-3] + (2 * n, 2 * n, n + 1), dtype=complex)
    big[(Ellipsis,) + np.ix_(big_idx, big_idx, last)] = c[(Ellipsis,) + np.ix_(full, full, last)]
    out = sp_fft.irfftn(big, s=(2 * n,) * 3, axes=SPATIAL_AXES) * (2 * n) ** 3
    out.setflags(write=False)
    f._cache["fine"] = out
    return out


def memo(f: Field, key: str, compute: Callable[[Field], Field]) -> Field:
    """``compute(f)``, stored on the immutable field ``f`` under ``key``."""
    if key not in f._cache:
        f._cache[key] = compute(f)
    return f._cache[key]


def from_fine_samples(grid: GridSpec, samples: np.ndarray, **kw) -> Field:
    """Truncate doubled-grid samples to the retained band of ``grid``."""
    n, d = grid.n, grid.dealias_limit
    big = sp_fft.rfftn(samples, axes=SPATIAL_AXES) / (2 * n) ** 3
    m = np.arange(-d, d + 1)
    half = np.zeros(big.shape[:-3] + (n, n, n // 2 + 1), dtype=complex)
    half[(Ellipsis,) + np.ix_(m % n, m % n, m[d:])] = \
        big[(Ellipsis,) + np.ix_(m % (2 * n), m % (2 * n), m[d:])]
    data = sp_fft.irfftn(half, s=grid.shape, axes=SPATIAL_AXES) * n ** 3
    return Field(grid, data, **kw)


def dealiased(fn: Callable[..., np.ndarray], *fields: Field, **kw) -> Field:
    """Evaluate a pointwise expression of fields with dealiasing.

    ``fn`` receives doubled-grid sample arrays (tensor axes first) and must
    return an array with spatial axes last.
    """
    grid = fields[0].grid
    for other in fields[1:]:
        _same_grid(fields[0], other)
    out = fn(*(fine_samples(f) for f in fields))
    return from_fine_samples(grid, out, **kw)


def multiply(a: Field, b: Field) -> Field:
    """Dealiased product; scalar*scalar, scalar*tensor or tensor*scalar."""
    if a.rank and b.rank:
        raise ValueError("multiply() needs at least one scalar factor; use dot/cross/outer")
    return dealiased(lambda x, y: x * y, a, b)


def dot(a: Field, b: Field) -> Field:
    return dealiased(lambda x, y: np.sum(x * y, axis=0), a, b)


def cross(a: Field, b: Field) -> Field:
    return dealiased(lambda x, y: np.cross(x, y, axis=0), a, b)


def outer(a: Field, b: Field) -> Field:
    """Matrix field T with T[j, i] = a_j b_i."""
    return dealiased(lambda x, y: x[:, None] * y[None, :], a, b)


def square_norm(a: Field) -> Field:
    return dealiased(lambda x: np.sum(x * x, axis=0) if x.ndim == 4 else x * x, a)


def integrate(data: np.ndarray | Field, grid: GridSpec | None = None) -> float:
    """Riemann (trapezoidal, periodic) integral over the box of a scalar node array."""
    if isinstance(data, Field):
        grid, data = data.grid, data.data
    return float(np.sum(data) * grid.cell_volume)


def inner(a: Field, b: Field) -> float:
    """L2 inner product over the box, summing over tensor components."""
    _same_grid(a, b)
    return float(np.sum(a.data * b.data) * a.grid.cell_volume)


def resample(f: Field, grid: GridSpec) -> Field:
    """Evaluate a band-limited field on another grid with the same box length."""
    if grid.box_length != f.grid.box_length:
        raise GridMismatchError("resampling requires the same box length")
    c = coefficients(f) * f.grid.band_mask
    out = np.zeros(c.shape[:-3] + grid.shape, dtype=complex)
    d = min(f.grid.dealias_limit, grid.dealias_limit)
    m = np.arange(-d, d + 1)
    src = np.ix_(m % f.grid.n, m % f.grid.n, m % f.grid.n)
    dst = np.ix_(m % grid.n, m % grid.n, m % grid.n)
    out[(Ellipsis,) + dst] = c[(Ellipsis,) + src]
    return from_coefficients(grid, out, divergence_free=f.divergence_free, units=f.units,
                             name=f.name)


# -- dumps -------------------------------------------------------------------

def write_spectral_csv(f: Field | SpectralField, path: str | Path) -> None:
    """One row per wavevector: integer lattice indices, then re/im of each component."""
    c = coefficients(f)
    lead = c.shape[:-3]
    flat = c.reshape((-1,) + c.shape[-3:])
    m = f.grid.mode_indices
    order = np.lexsort((m[2].ravel(), m[1].ravel(), m[0].ravel()))
    labels = ["/".join(str(i) for i in np.unravel_index(j, lead)) if lead else ""
              for j in range(flat.shape[0])]
    head = ["k1", "k2", "k3"]
    for lab in labels:
        head += [f"re{lab}", f"im{lab}"]
    mk = [m[a].ravel()[order] for a in range(3)]
    vals = [flat[j].ravel()[order] for j in range(flat.shape[0])]
    lines = [",".join(head)]
    for i in range(order.size):
        row = [str(mk[0][i]), str(mk[1][i]), str(mk[2][i])]
        for col in vals:
            row += [repr(float(col[i].real) + 0.0), repr(float(col[i].imag) + 0.0)]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_raw(f: Field, path: str | Path) -> Path:
    """Little-endian float64 samples, x1 fastest, components outermost, plus a JSON header."""
    path = Path(path)
    arr = np.asarray(f.data, dtype="<f8")
    flat = arr.reshape((-1,) + f.grid.shape)
    with open(path, "wb") as fh:
        for comp in flat:
            fh.write(comp.tobytes(order="F"))
    header = {"grid": f.grid.as_dict(), "tensor_shape": list(f.tensor_shape),
              "dtype": "<f8", "order": "x1-fastest", "name": f.name}
    hpath = path.with_suffix(path.suffix + ".json")
    hpath.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
    return hpath


def read_raw(path: str | Path) -> Field:
    path = Path(path)
    header = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    grid = GridSpec(**header["grid"])
    tshape = tuple(header["tensor_shape"])
    raw = np.frombuffer(path.read_bytes(), dtype="<f8")
    ncomp = int(np.prod(tshape)) if tshape else 1
    comps = raw.reshape(ncomp, -1)
    data = np.stack([c.reshape(grid.shape, order="F") for c in comps])
    return Field(grid, data.reshape(tshape + grid.shape), name=header.get("name", ""))

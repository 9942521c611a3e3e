"""Inequality certifiers on samples and on the Fourier lattice.

Lattice certificates (Cauchy-Schwarz splits, Chebyshev tail, l1-convolution
submultiplicativity) hold exactly; the tolerance only absorbs rounding.
Continuum constants are reported alongside for comparison and never asserted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft as sp_fft
from scipy.optimize import minimize_scalar

from .bands import CutoffProfile
from .field import Field, GridSpec, from_coefficients, mode_magnitude, multiply
from .norms import lp_norm, pointwise_magnitude, vsw_norm
from .report import CheckReport

ROUNDING_TOL = 1e-12


# -- Peetre-type weight inequality ---------------------------------------------

def peetre_gap(tau: float, a, b, c=None):
    """(tau + a^2)(tau + b^2) - tau - c^2 with c = |xi1 + xi2| (default a + b)."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    c = a + b if c is None else np.asarray(c, float)
    return (tau + a * a) * (tau + b * b) - tau - c * c


def _diagonal_minimum(tau: float) -> tuple[float, float]:
    """Minimum over t = |xi|^2 >= 0 of the gap on xi1 = xi2 (numerical)."""
    res = minimize_scalar(lambda t: (tau + t) ** 2 - tau - 4 * t, bounds=(0.0, 4.0),
                          method="bounded", options={"xatol": 1e-12})
    return float(res.fun), float(res.x)


@dataclass
class PeetreSearchResult:
    bracket_low: float
    bracket_high: float
    witness: tuple[np.ndarray, np.ndarray]
    witness_gap: float
    tau2_violations: int
    samples: int
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def width(self) -> float:
        return self.bracket_high - self.bracket_low

    def report(self, target: float = 4 / 3, tol: float = 1e-6) -> CheckReport:
        inside = self.bracket_low <= target <= self.bracket_high and self.width <= tol
        miss = 0.0 if inside else min(abs(target - self.bracket_low),
                                      abs(target - self.bracket_high), 1.0) + self.width
        return CheckReport("peetre-threshold", "min tau with tau+|a+b|^2 <= (tau+|a|^2)(tau+|b|^2)",
                           self.bracket_low, self.bracket_high, miss, tol, inside,
                           extra={"seed": self.seed, "witness_gap": self.witness_gap,
                                  "tau2_violations": self.tau2_violations})


def _sample_pairs(rng, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Radii a, b >= 0: log-uniform random plus a structured grid including a = b."""
    k = n // 2
    a = 10 ** rng.uniform(-4, 3, k)
    b = 10 ** rng.uniform(-4, 3, k)
    m = int(math.isqrt(n - k))
    g = np.concatenate([[0.0], np.geomspace(1e-4, 1e3, m - 1)])
    ga, gb = np.meshgrid(g, g)
    a = np.concatenate([a, ga.ravel()])
    b = np.concatenate([b, gb.ravel()])
    return a, b


def peetre_certify(seed: int = 0, samples: int = 100_000, width: float = 1e-6,
                   upper: float = 2.0) -> PeetreSearchResult:
    """Bisect for the least tau making the weight inequality hold.

    A tau is rejected when the diagonal family xi1 = xi2 (minimized
    numerically) or any sampled colinear pair gives a negative gap.  The
    colinear case is the worst one since |xi1 + xi2| <= |xi1| + |xi2|.
    """
    rng = np.random.default_rng(seed)
    a, b = _sample_pairs(rng, samples)

    def admissible(tau):
        gmin, _ = _diagonal_minimum(tau)
        return gmin >= 0 and not np.any(peetre_gap(tau, a, b) < 0)

    lo, hi = 0.0, upper
    if not admissible(hi):
        raise RuntimeError("upper end of the search interval is not admissible")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    gap, t = _diagonal_minimum(lo)
    xi = math.sqrt(t) * np.array([1.0, 0.0, 0.0])

    # tau = 2 on genuine 3-vectors and on colinear radii
    x1 = rng.standard_normal((3, samples)) * 10 ** rng.uniform(-3, 2, samples)
    x2 = rng.standard_normal((3, samples)) * 10 ** rng.uniform(-3, 2, samples)
    n1, n2 = np.linalg.norm(x1, axis=0), np.linalg.norm(x2, axis=0)
    n12 = np.linalg.norm(x1 + x2, axis=0)
    ratio = (2 + n12 ** 2) / ((2 + n1 ** 2) * (2 + n2 ** 2))
    ratio_c = (2 + (a + b) ** 2) / ((2 + a ** 2) * (2 + b ** 2))
    viol = int(np.sum(ratio > 1 + ROUNDING_TOL) + np.sum(ratio_c > 1 + ROUNDING_TOL))
    return PeetreSearchResult(lo, hi, (xi, xi.copy()), gap, viol, samples, seed,
                              extra={"max_ratio_tau2": float(max(ratio.max(), ratio_c.max()))})


# -- cross products ---------------------------------------------------------------

def hadamard_cross_certify(samples: int = 10_000, seed: int = 0) -> CheckReport:
    """|a x b| <= |a||b| on random vector pairs."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((3, samples)) * 10 ** rng.uniform(-3, 3, samples)
    b = rng.standard_normal((3, samples)) * 10 ** rng.uniform(-3, 3, samples)
    lhs = np.linalg.norm(np.cross(a, b, axis=0), axis=0)
    rhs = np.linalg.norm(a, axis=0) * np.linalg.norm(b, axis=0)
    excess = np.max(np.maximum(lhs - rhs, 0) / rhs)
    return CheckReport.compare("hadamard-cross", "|a x b| <= |a| |b|", residual=excess,
                               tol=ROUNDING_TOL, lhs=float(np.max(lhs / rhs)), rhs=1.0,
                               extra={"samples": samples, "seed": seed})


def holder_cross_certify(a: Field, b: Field, p: float, q: float,
                         field_id: str = "") -> CheckReport:
    """||a x b||_r <= ||a||_p ||b||_q with 1/r = 1/p + 1/q (node products)."""
    r = 1.0 / (1.0 / p + 1.0 / q)
    if r < 1:
        raise ValueError("need 1/p + 1/q <= 1")
    prod = Field(a.grid, np.cross(a.data, b.data, axis=0))
    lhs = lp_norm(prod, r).value
    rhs = lp_norm(a, p).value * lp_norm(b, q).value
    return CheckReport.inequality("holder-cross", "||a x b||_r <= ||a||_p ||b||_q", lhs=lhs,
                                  rhs=rhs, tol=ROUNDING_TOL, grid=a.grid, field_id=field_id,
                                  extra={"p": p, "q": q, "r": r})


def star_convolution(a: Field, b: Field) -> Field:
    """(a * b)(x) = sum_y a(x - y) x b(y) h^3 on the periodic grid."""
    g = a.grid
    A = sp_fft.fftn(a.data, axes=(-3, -2, -1))
    B = sp_fft.fftn(b.data, axes=(-3, -2, -1))
    C = np.cross(A, B, axis=0)
    return Field(g, sp_fft.ifftn(C, axes=(-3, -2, -1)).real * g.cell_volume)


def young_star_certify(a: Field, b: Field, p: float, q: float,
                       field_id: str = "") -> CheckReport:
    """||a * b||_r <= ||a||_p ||b||_q with 1 + 1/r = 1/p + 1/q.

    The grid measure h^3 is translation invariant, so the constant is 1; the
    continuum normalization (2 pi)^(-3/2) is not applied.
    """
    inv_r = 1.0 / p + 1.0 / q - 1.0
    if not 0 <= inv_r <= 1:
        raise ValueError("exponents out of range for Young's inequality")
    r = math.inf if inv_r == 0 else 1.0 / inv_r
    lhs = lp_norm(star_convolution(a, b), r).value
    rhs = lp_norm(a, p).value * lp_norm(b, q).value
    return CheckReport.inequality("young-star", "||a * b||_r <= ||a||_p ||b||_q", lhs=lhs,
                                  rhs=rhs, tol=ROUNDING_TOL, grid=a.grid, field_id=field_id,
                                  extra={"p": p, "q": q, "r": r})


# -- scalar power inequality ---------------------------------------------------

def power_inequality_certify(exponents: Sequence[float] = (1, 1.5, 2, 3, 5, 10),
                             points: int = 1000, seed: int = 0) -> CheckReport:
    """(1 + a)^s <= 2^(s-1) (1 + a^s) for s >= 1, a >= 0; equality at a = 1."""
    rng = np.random.default_rng(seed)
    a = np.concatenate([np.geomspace(1e-6, 1e6, points), 10 ** rng.uniform(-6, 6, points),
                        [0.0, 1.0]])
    worst, eq_gap, count = 0.0, 0.0, 0
    for s in exponents:
        if s < 1:
            raise ValueError("exponent must be >= 1")
        lhs = (1 + a) ** s
        rhs = 2 ** (s - 1) * (1 + a ** s)
        worst = max(worst, float(np.max(np.maximum(lhs - rhs, 0) / rhs)))
        eq_gap = max(eq_gap, abs(2 ** s - 2 ** (s - 1) * 2) / 2 ** s)
        count += a.size
    return CheckReport.compare("power-inequality", "(1+a)^s <= 2^(s-1)(1+a^s)",
                               residual=worst, tol=ROUNDING_TOL,
                               extra={"instances": count, "equality_gap_at_1": eq_gap})


# -- lattice splits -------------------------------------------------------------

def _lattice(v: Field):
    r = v.grid.wavenumber
    mag = mode_magnitude(v)
    nz = r > 0
    return r[nz], mag[nz]


def kappa_split_certify(v: Field, kappa: float, field_id: str = "") -> CheckReport:
    """sum_{k!=0} |k|^kappa |c| <= A S2 + B S4 by Cauchy-Schwarz on |k| <= 1 and |k| > 1.

    A = (sum_{0<|k|<=1} |k|^(2 kappa - 2))^(1/2), B = (sum_{|k|>1} |k|^(2 kappa - 4))^(1/2),
    S2 = (sum |k|^2 |c|^2)^(1/2), S4 = (sum |k|^4 |c|^2)^(1/2), all over the grid lattice.
    """
    if not -0.5 < kappa < 0.5:
        raise ValueError("kappa must lie in (-1/2, 1/2)")
    r, c = _lattice(v)
    lo, hi = r <= 1, r > 1
    lhs = float(np.sum(r ** kappa * c))
    A = math.sqrt(float(np.sum(r[lo] ** (2 * kappa - 2))))
    B = math.sqrt(float(np.sum(r[hi] ** (2 * kappa - 4))))
    s2 = math.sqrt(float(np.sum(r ** 2 * c ** 2)))
    s4 = math.sqrt(float(np.sum(r ** 4 * c ** 2)))
    rhs = A * s2 + B * s4
    cont = 2 * math.sqrt(math.pi)
    return CheckReport.inequality(
        "kappa-split", "sum|k|^kappa|c| <= A_kappa S2 + B_kappa S4", lhs=lhs, rhs=rhs,
        tol=ROUNDING_TOL, grid=v.grid, field_id=field_id,
        extra={"kappa": kappa, "A_lattice": A, "B_lattice": B,
               "A_continuum": cont / math.sqrt(1 + 2 * kappa),
               "B_continuum": cont / math.sqrt(1 - 2 * kappa)})


def wiener_split_certify(v: Field, field_id: str = "",
                         tail_radii: Sequence[float] = (1, 2, 4)) -> list[CheckReport]:
    """Best radius split of sum_{k!=0} |c| and the Chebyshev tail bounds."""
    r, c = _lattice(v)
    if not np.any(c > 0):
        raise ValueError("field has no nonzero non-constant mode")
    lhs = float(np.sum(c))
    s2 = math.sqrt(float(np.sum(r ** 2 * c ** 2)))
    s4 = math.sqrt(float(np.sum(r ** 4 * c ** 2)))
    best, best_rho = math.inf, None
    for rho in np.unique(r):
        A = math.sqrt(float(np.sum(r[r <= rho] ** -2.0)))
        B = math.sqrt(float(np.sum(r[r > rho] ** -4.0)))
        bound = A * s2 + B * s4
        if bound < best:
            best, best_rho = bound, float(rho)
    out = [CheckReport.inequality(
        "wiener-split", "sum|c| <= min_rho (A(rho) S2 + B(rho) S4)", lhs=lhs, rhs=best,
        tol=ROUNDING_TOL, grid=v.grid, field_id=field_id,
        extra={"rho": best_rho, "continuum_constant": 4 * math.sqrt(math.pi)})]
    for rho in tail_radii:
        tail = float(np.sum(c[r >= rho] ** 2))
        bound = float(rho) ** -4 * float(np.sum(r ** 4 * c ** 2))
        out.append(CheckReport.inequality(
            "chebyshev-tail", "sum_{|k|>=rho}|c|^2 <= rho^-4 sum|k|^4|c|^2", lhs=tail,
            rhs=bound, tol=ROUNDING_TOL, grid=v.grid, field_id=field_id, extra={"rho": rho}))
    return out


# -- algebra property -----------------------------------------------------------

def random_band_field(grid: GridSpec, rng, tensor: tuple = (), decay: float = 1.5) -> Field:
    """Random real field on the retained band with |k|^-decay envelope."""
    shape = tensor + grid.shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    env = (1 + grid.wavenumber) ** -decay * grid.band_mask * ~grid.nyquist_mask
    return from_coefficients(grid, c * env)


def submultiplicativity_certify(s: float, pairs: int = 1000, seed: int = 0,
                                grid: GridSpec | None = None) -> CheckReport:
    """vsw_norm(f g, s) <= vsw_norm(f, s) vsw_norm(g, s) on random pairs.

    Scalar-times-vector products exercise the vector-magnitude convention.
    A small grid suffices: the statement is the l1 convolution bound with
    weights obeying <k + l> <= <k><l>.
    """
    grid = grid or GridSpec(8, 2 * np.pi, 3)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(pairs):
        f = random_band_field(grid, rng)
        g = random_band_field(grid, rng, (3,) if i % 2 else ())
        lhs = vsw_norm(multiply(f, g), s).value
        rhs = vsw_norm(f, s).value * vsw_norm(g, s).value
        worst = max(worst, max(lhs - rhs, 0.0) / rhs)
    return CheckReport.compare("submultiplicativity", "||fg||_{V^s} <= ||f||_{V^s} ||g||_{V^s}",
                               residual=worst, tol=ROUNDING_TOL, grid=grid,
                               extra={"s": s, "pairs": pairs, "seed": seed})


def sup_wiener_check(v: Field, field_id: str = "") -> CheckReport:
    """||v||_Linf <= sum |c_k|."""
    lhs = float(np.max(pointwise_magnitude(v)))
    rhs = float(np.sum(mode_magnitude(v)))
    return CheckReport.inequality("sup-below-wiener", "||v||_inf <= ||v||_W", lhs=lhs, rhs=rhs,
                                  tol=ROUNDING_TOL, grid=v.grid, field_id=field_id)


# -- isoperimetric diagnostic ---------------------------------------------------

GN_CONSTANT = 3 * (4 * math.pi / 3) ** (1 / 3)


@dataclass(frozen=True)
class BumpShape:
    """Radial bump supported in the ball of ``radius`` (as a fraction of L) at the box centre.

    kinds: ``poly`` (1 - s^2)^order, ``exp`` exp(1 - 1/(1 - s^2)),
    ``plateau`` the smoothstep low-pass with inner radius radius/2.
    """

    kind: str = "poly"
    radius: float = 0.25
    order: int = 3
    amplitude: float = 1.0

    def profile(self, r: np.ndarray, R: float) -> tuple[np.ndarray, np.ndarray]:
        """Values and radial derivatives."""
        s = np.minimum(r / R, 1.0)
        inside = r < R
        if self.kind == "poly":
            m = self.order
            val = (1 - s * s) ** m
            der = -2 * m * s * (1 - s * s) ** (m - 1) / R
        elif self.kind == "exp":
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                w = 1 - s * s
                val = np.where(inside, np.exp(1 - 1 / w), 0.0)
                der = np.where(inside, val * (-2 * s / w ** 2) / R, 0.0)
        elif self.kind == "plateau":
            prof = CutoffProfile("low-pass", R / 2, R, max(self.order, 5) | 1)
            val, der = prof(r), prof.derivative(r)
        else:
            raise ValueError(f"unknown bump kind {self.kind!r}")
        val = np.where(inside, val, 0.0)
        der = np.where(inside, der, 0.0)
        return self.amplitude * val, self.amplitude * der


def _gn_ratio(shape: BumpShape, grid: GridSpec) -> tuple[float, float, float]:
    L = grid.box_length
    x = grid.coordinates - L / 2
    r = np.sqrt(np.sum(x * x, axis=0))
    val, der = shape.profile(r, shape.radius * L)
    h3 = grid.cell_volume
    grad_l1 = float(np.sum(np.abs(der)) * h3)
    f32 = float(np.sum(np.abs(val) ** 1.5) * h3) ** (2 / 3)
    return grad_l1, f32, grad_l1 / (GN_CONSTANT * f32) if f32 > 0 else math.nan


def gn_isoperimetric_diagnostic(shape: BumpShape, grid: GridSpec | None = None,
                                field_id: str = "") -> CheckReport:
    """||grad f||_1 / (3 |B|^(1/3) ||f||_{3/2}) >= 1 - delta.

    |grad f| is evaluated from the analytic radial derivative.  delta is the
    change of the ratio between the grid and its half-resolution version.
    """
    grid = grid or GridSpec(64)
    if not 0 < shape.radius < 0.5:
        raise ValueError("bump must lie strictly inside the box")
    if shape.amplitude == 0:
        return CheckReport("gn-isoperimetric", "||grad f||_1 >= 3|B|^(1/3) ||f||_3/2", 0.0,
                           0.0, 0.0, 0.0, True, diagnostic=True, grid=grid.as_dict(),
                           field_id=field_id, extra={"skipped": "zero field"})
    coarse = GridSpec(grid.n // 2, grid.box_length, min(grid.dealias_limit, grid.n // 4 - 1))
    g1, f1, ratio = _gn_ratio(shape, grid)
    _, _, ratio_c = _gn_ratio(shape, coarse)
    delta = abs(ratio - ratio_c)
    rep = CheckReport.inequality("gn-isoperimetric", "||grad f||_1 >= 3|B|^(1/3) ||f||_3/2",
                                 lhs=1.0 - delta, rhs=ratio, tol=0.0, grid=grid,
                                 field_id=field_id,
                                 extra={"ratio": ratio, "delta": delta, "grad_L1": g1,
                                        "f_L3/2": f1, "kind": shape.kind})
    rep.diagnostic = True
    return rep

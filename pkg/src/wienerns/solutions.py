"""Test states: shear flows, random manufactured states, harmonic gradients, rescaling.

Manufactured states must be band-limited to ``dealias_limit / 2`` so that
every quadratic product is represented exactly after truncation; the
conditional identities then hold to rounding.

Harmonic-gradient solutions ``v = grad psi`` are not periodic; they are
evaluated pointwise from symbolic derivatives and never touch a grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from .field import Field, GridSpec, cross, from_coefficients, inner
from .nse import NseState, pressure_from_v
from .operators import curl, curl2, leray_project
from .report import CheckReport

X = sp.symbols("x1 x2 x3", real=True)


# -- grid states ------------------------------------------------------------

def make_shear(sine: Sequence[float] = (1.0,), cosine: Sequence[float] = (),
               mean: float = 0.0, axes: tuple[int, int] = (0, 1), nu: float = 1.0,
               grid: GridSpec | None = None, field_id: str = "shear") -> NseState:
    """v_a = g(x_b) with g(y) = mean + sum_j sine[j] sin((j+1) k0 y) + cosine[j] cos(...).

    ``k0 = 2 pi / L``.  Then p = 0, Q = g^2 / 2 and the manufactured forcing
    is -nu Delta v.
    """
    grid = grid or GridSpec()
    a, b = axes
    if a == b or not {a, b} <= {0, 1, 2}:
        raise ValueError("axes must be two distinct indices in 0..2")
    modes = max(len(sine), len(cosine))
    if modes > grid.dealias_limit // 2:
        raise ValueError("shear profile exceeds dealias_limit / 2")
    k0 = 2 * np.pi / grid.box_length
    y = grid.coordinates[b]
    g = np.full(grid.shape, float(mean))
    for j, c in enumerate(sine):
        g += c * np.sin((j + 1) * k0 * y)
    for j, c in enumerate(cosine):
        g += c * np.cos((j + 1) * k0 * y)
    data = np.zeros((3,) + grid.shape)
    data[a] = g
    v = Field(grid, data, divergence_free=True, name=field_id)
    return NseState.manufacture(v, nu, field_id)


def make_random_divfree(seed: int, band: tuple[float, float] = (2, 5), amplitude: float = 1.0,
                        nu: float = 1.0, grid: GridSpec | None = None,
                        field_id: str | None = None) -> NseState:
    """Leray projection of a random field with integer-lattice radii in ``band``.

    The field is rescaled so its largest nodal magnitude equals ``amplitude``.
    """
    grid = grid or GridSpec()
    lo, hi = band
    if not 0 <= lo <= hi:
        raise ValueError("band must satisfy 0 <= low <= high")
    if hi > grid.dealias_limit / 2:
        raise ValueError(f"band upper radius {hi} exceeds dealias_limit / 2 "
                         f"= {grid.dealias_limit / 2}")
    rng = np.random.default_rng(seed)
    r = np.sqrt(np.sum(grid.mode_indices ** 2, axis=0))
    shell = (r >= lo) & (r <= hi) & (r > 0)
    c = (rng.standard_normal((3,) + grid.shape) + 1j * rng.standard_normal((3,) + grid.shape))
    c = c * shell / np.maximum(r, 1.0) ** 2
    w = from_coefficients(grid, c)
    v = leray_project(w)
    peak = float(np.max(np.sqrt(np.sum(v.data ** 2, axis=0))))
    data = v.data * (amplitude / peak) if peak > 0 else v.data
    fid = field_id if field_id is not None else f"random-{seed}"
    v = Field(grid, data, divergence_free=True, name=fid)
    return NseState.manufacture(v, nu, fid)


# -- scaling ------------------------------------------------------------------

def rescale(state: NseState, lam: float) -> NseState:
    """w(x) = lam v(lam x), q = lam^2 p(lam x), f_w = lam^3 f(lam x).

    The box shrinks to L / lam with the same node count, so node j of the new
    grid is the image of node j of the old one and lam need not be an integer.
    """
    if not lam > 0:
        raise ValueError("scaling factor must be positive")
    g = state.grid
    new = GridSpec(g.n_per_axis, g.box_length / lam, g.dealias_limit)
    v = Field(new, lam * state.v.data, divergence_free=True, name=state.v.name)
    f = Field(new, lam ** 3 * state.f.data)
    p = Field(new, lam ** 2 * state.p.data)
    return NseState(v, state.nu, f, f"{state.field_id}@x{lam:g}", state.manufactured, p=p)


def _operator(v: Field, nu: float) -> Field:
    return nu * curl2(v) + leray_project(cross(curl(v), v))


def scaling_covariance_check(state: NseState, lam: float,
                             tol: float = 1e-10) -> list[CheckReport]:
    """Compare the rescaled state against the scaling laws node by node."""
    from .nse import residual_leray
    w = rescale(state, lam)
    g, fid = state.grid, state.field_id
    out = []
    rv, rw = residual_leray(state), residual_leray(w)
    nv, nw = _operator(state.v, state.nu), _operator(w.v, w.nu)
    sc = lam ** 3 * max(float(np.max(np.abs(nv.data))), float(np.max(np.abs(state.f.data))))
    out.append(CheckReport.compare(
        "scaling-residual", "residual(w)(x) = lam^3 residual(v)(lam x)",
        residual=np.max(np.abs(rw.data - lam ** 3 * rv.data)), scale=sc, tol=tol,
        lhs=np.max(np.abs(rw.data)), rhs=lam ** 3 * np.max(np.abs(rv.data)), grid=g,
        field_id=fid, extra={"lambda": lam}))
    out.append(CheckReport.compare(
        "scaling-operator", "N(w)(x) = lam^3 N(v)(lam x)",
        residual=np.max(np.abs(nw.data - lam ** 3 * nv.data)), scale=sc, tol=tol,
        lhs=np.max(np.abs(nw.data)), rhs=lam ** 3 * np.max(np.abs(nv.data)), grid=g,
        field_id=fid, extra={"lambda": lam}))
    cv, cw = curl(state.v), curl(w.v)
    ev, ew = inner(cv, cv), inner(cw, cw)
    out.append(CheckReport.compare(
        "scaling-enstrophy", "||C w||^2 = lam ||C v||^2", residual=abs(ew - lam * ev),
        scale=max(abs(ew), abs(lam * ev)), tol=tol, lhs=ew, rhs=lam * ev, grid=g, field_id=fid,
        extra={"lambda": lam}))
    pw = pressure_from_v(w.v)
    out.append(CheckReport.compare(
        "scaling-pressure", "q(x) = lam^2 p(lam x)", residual=np.max(np.abs(pw.data - w.p.data)),
        scale=max(float(np.max(np.abs(w.p.data))), lam ** 2 * float(np.max(state.v.data ** 2))),
        tol=tol, grid=g, field_id=fid, extra={"lambda": lam}))
    return out


# -- harmonic gradients ---------------------------------------------------------

@dataclass(frozen=True)
class AnalyticField:
    """Closures evaluating a vector field and its derivatives at points of shape (3, N)."""

    value: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    second_derivatives: Callable[[np.ndarray], np.ndarray]
    source: str


@dataclass(frozen=True)
class HarmonicGradient:
    """v = grad psi for harmonic psi, with p = -|v|^2 / 2 and Q = 0."""

    psi: sp.Expr
    velocity: AnalyticField
    pressure: Callable[[np.ndarray], np.ndarray]
    pressure_gradient: Callable[[np.ndarray], np.ndarray]

    def bernoulli_q(self, pts: np.ndarray) -> np.ndarray:
        v = self.velocity.value(pts)
        return self.pressure(pts) + 0.5 * np.sum(v * v, axis=0)


def _vectorize(exprs, shape) -> Callable[[np.ndarray], np.ndarray]:
    flat = list(np.asarray(exprs, dtype=object).ravel())
    fn = sp.lambdify(X, flat, "numpy")

    def call(pts):
        pts = np.asarray(pts, dtype=float)
        vals = fn(*pts)
        return np.array([np.broadcast_to(np.asarray(a, dtype=float), pts.shape[1:])
                         for a in vals]).reshape(shape + pts.shape[1:])
    return call


def make_harmonic_gradient(psi: sp.Expr | str, fd_points: int = 100, seed: int = 0,
                           fd_tol: float = 1e-6) -> HarmonicGradient:
    """Symbolic construction; rejects psi whose Laplacian does not vanish."""
    if isinstance(psi, str):
        psi = sp.sympify(psi, locals=dict(zip(("x1", "x2", "x3"), X)))
    lap = sp.simplify(sum(sp.diff(psi, x, 2) for x in X))
    if lap != 0:
        raise ValueError(f"psi is not harmonic: Laplacian = {lap}")
    v = [sp.diff(psi, x) for x in X]
    J = [[sp.diff(vi, x) for x in X] for vi in v]
    H = [[[sp.diff(Jij, x) for x in X] for Jij in row] for row in J]
    w = [J[2][1] - J[1][2], J[0][2] - J[2][0], J[1][0] - J[0][1]]
    if any(sp.simplify(c) != 0 for c in w):
        raise AssertionError("gradient field with nonzero curl")
    p = -sp.Rational(1, 2) * sum(c ** 2 for c in v)
    field = AnalyticField(_vectorize(v, (3,)), _vectorize(J, (3, 3)),
                          _vectorize(H, (3, 3, 3)), f"grad({psi})")
    pfun = _vectorize([p], (1,))
    out = HarmonicGradient(psi, field, lambda pts: pfun(pts)[0],
                           _vectorize([sp.diff(p, x) for x in X], (3,)))
    _jacobian_gate(field, fd_points, seed, fd_tol)
    return out


def _jacobian_gate(field: AnalyticField, npts: int, seed: int, tol: float):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (3, npts))
    h = 1e-5
    J = field.jacobian(pts)
    for j in range(3):
        e = np.zeros((3, 1))
        e[j] = h
        fd = (field.value(pts + e) - field.value(pts - e)) / (2 * h)
        err = np.max(np.abs(fd - J[:, j]) / np.maximum(1.0, np.abs(J[:, j])))
        if err > tol:
            raise AssertionError(f"jacobian disagrees with finite differences ({err:.2e})")


HARMONIC_LIBRARY = {
    "saddle": "x1**2 - x2**2",
    "uniform": "x1",
    "triple": "x1*x2*x3",
    "cubic": "x1**3 - 3*x1*x2**2",
    "mixed": "2*x3**2 - x1**2 - x2**2 + x1*x2 + 3*x2*x3 - x1",
}


def _curl_from_jacobian(J: np.ndarray) -> np.ndarray:
    return np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])


def analytic_identity_suite(hg: HarmonicGradient, npts: int = 1000, seed: int = 0,
                            nu: float = 1.0, tol: float = 1e-10,
                            field_id: str = "") -> list[CheckReport]:
    """Pointwise identities at random points from exact derivatives (no grid).

    Every term is assembled from v, its Jacobian J[i, j] = d_j v_i and
    H[i, j, l] = d_l d_j v_i by the product rule, independently of the
    identity being checked.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-2, 2, (3, npts))
    v = hg.velocity.value(pts)
    J = hg.velocity.jacobian(pts)
    H = hg.velocity.second_derivatives(pts)
    w = _curl_from_jacobian(J)
    dw = np.array([_curl_from_jacobian(H[:, :, l]) for l in range(3)])  # dw[l, i] = d_l w_i
    c2 = _curl_from_jacobian(np.swapaxes(dw, 0, 1))  # curl of w
    lap = np.einsum("ijj...->i...", H)
    scale = max(float(np.max(np.abs(v))) * float(np.max(np.abs(J))), float(np.max(np.abs(H))))
    scale = max(scale, 1e-300)
    lamb = np.cross(w, v, axis=0)
    adv = np.einsum("ij...,j...->i...", J, v)
    half_grad = np.einsum("ji...,j...->i...", J, v)
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1
    div_lamb = (np.einsum("ijk,ij...,k...->...", eps, dw, v)
                + np.einsum("ijk,j...,ki...->...", eps, w, J))
    gp = hg.pressure_gradient(pts)
    q = hg.bernoulli_q(pts)

    def rep(cid, anchor, resid):
        return CheckReport.compare(cid, anchor, residual=float(np.max(np.abs(resid))),
                                   scale=scale, tol=tol, lhs=0.0, rhs=0.0,
                                   field_id=field_id, extra={"points": npts})
    return [
        rep("analytic-identity-cross", "(Cv) x v = (v.grad)v - grad|v|^2/2",
            lamb - (adv - half_grad)),
        rep("analytic-identity-div-cross", "div(Cv x v) = <C^2 v, v> - |Cv|^2",
            div_lamb - (np.sum(c2 * v, axis=0) - np.sum(w * w, axis=0))),
        rep("analytic-bernoulli-zero", "Q = p + |v|^2/2 = 0", q),
        rep("analytic-residual-bernoulli", "nu C^2 v + Cv x v + grad Q = 0",
            nu * c2 + lamb),
        rep("analytic-stationary-system", "-nu Delta v + (v.grad)v + grad p = 0",
            -nu * lap + adv + gp),
        rep("analytic-pointwise-cancellation", "<Cv x v, v> = 0", np.sum(lamb * v, axis=0)),
    ]

"""Stationary Navier-Stokes states, Bernoulli head and the identity audits.

The stationary system with forcing is written as
``nu C^2 v + (C v) x v + grad Q = f`` where ``C`` is the curl and
``Q = p + |v|^2 / 2``.  Conditional identities carry the explicit forcing
correction, so ``f = 0`` gives the unforced statements.

Audits return :class:`CheckReport` objects (or lists of them when one
audit compares several quantities).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .field import (Field, GridSpec, InvalidFieldError, coefficients, dealiased, dot,
                    from_coefficients, inner, memo, integrate, outer, resample, square_norm, zeros)
from .norms import lp_norm, pointwise_magnitude
from .operators import (LERAY, apply_multiplier, curl, curl2, div, grad, is_divergence_free,
                        lamb_vector, laplacian, leray_complement, leray_project, riesz_r0,
                        s0_map)
from .report import CheckReport

IDENTITY_TOL = 1e-10
CONDITIONAL_TOL = 1e-9


# -- pressure and state ------------------------------------------------------

def _require_divfree(v: Field):
    if v.rank != 1:
        raise ValueError("velocity must be a vector field")
    if not is_divergence_free(v):
        raise InvalidFieldError("velocity is not divergence-free")


def pressure_from_v(v: Field) -> Field:
    """Mean-zero pressure |D|^-2 sum_ij d_i d_j (v_i v_j)."""
    _require_divfree(v)
    return memo(v, "pressure", lambda u: riesz_r0(outer(u, u)))


def bernoulli_q(v: Field, p: Field | None = None) -> Field:
    """Q = p + |v|^2 / 2."""
    if p is None:
        p = pressure_from_v(v)
    return p + 0.5 * square_norm(v)


def manufactured_forcing(v: Field, nu: float) -> Field:
    """Forcing that makes v an exact stationary solution: nu C^2 v + P((C v) x v)."""
    return nu * curl2(v) + leray_project(lamb_vector(v))


@dataclass(frozen=True, eq=False)
class NseState:
    """Velocity, viscosity and forcing; pressure and Bernoulli head are derived.

    ``p`` may be supplied (e.g. by a rescaling) instead of being recomputed.
    """

    v: Field
    nu: float
    f: Field
    field_id: str = ""
    manufactured: bool = False
    p: Field | None = None
    Q: Field | None = None

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("viscosity must be positive")
        _require_divfree(self.v)
        if self.f.grid != self.v.grid:
            raise ValueError("forcing lives on a different grid")
        if self.p is None:
            object.__setattr__(self, "p", pressure_from_v(self.v))
        if self.Q is None:
            object.__setattr__(self, "Q", bernoulli_q(self.v, self.p))

    @property
    def grid(self) -> GridSpec:
        return self.v.grid

    @classmethod
    def manufacture(cls, v: Field, nu: float, field_id: str = "") -> "NseState":
        return cls(v, nu, manufactured_forcing(v, nu), field_id, manufactured=True)


def residual_leray(state: NseState) -> Field:
    v = state.v
    return state.nu * curl2(v) + leray_project(lamb_vector(v)) - state.f


def residual_bernoulli(state: NseState) -> Field:
    v = state.v
    return state.nu * curl2(v) + lamb_vector(v) + grad(state.Q) - state.f


def _scale(*arrays) -> float:
    return max((float(np.max(np.abs(a))) if np.size(a) else 0.0) for a in arrays)


def _compare(check_id, anchor, lhs: np.ndarray, rhs: np.ndarray, scale: float, tol: float,
             grid, field_id="", **kw) -> CheckReport:
    return CheckReport.compare(check_id, anchor, residual=np.max(np.abs(lhs - rhs)),
                               scale=scale, tol=tol, lhs=np.max(np.abs(lhs)),
                               rhs=np.max(np.abs(rhs)), grid=grid, field_id=field_id, **kw)


def residual_check(state: NseState, tol: float = IDENTITY_TOL) -> list[CheckReport]:
    """Both residual forms vanish and differ by a pure gradient."""
    v, nu = state.v, state.nu
    terms = [nu * curl2(v), lamb_vector(v), state.f]
    sc = _scale(*(t.data for t in terms))
    rl, rb = residual_leray(state), residual_bernoulli(state)
    z = np.zeros_like(rl.data)
    diff = leray_project(rb - rl)
    return [
        _compare("residual-leray", "nu C^2 v + P(Cv x v) = f", rl.data, z, sc, tol,
                 state.grid, state.field_id),
        _compare("residual-bernoulli", "nu C^2 v + Cv x v + grad Q = f", rb.data, z, sc, tol,
                 state.grid, state.field_id),
        _compare("residual-difference-gradient", "P(residual_B - residual_L) = 0", diff.data,
                 z, sc, tol, state.grid, state.field_id),
    ]


# -- unconditional identities ---------------------------------------------------

def advection(v: Field) -> Field:
    """Dealiased (v . grad) v."""
    return dealiased(lambda x, g: np.einsum("j...,ij...->i...", x, g), v, grad(v))


def identity_cross(v: Field, tol: float = IDENTITY_TOL, field_id: str = "") -> CheckReport:
    """(curl v) x v = (v . grad) v - grad |v|^2 / 2."""
    lhs = lamb_vector(v)
    adv = advection(v)
    half_grad = 0.5 * grad(square_norm(v))
    rhs = adv - half_grad
    return _compare("identity-cross", "(Cv) x v = (v.grad)v - grad|v|^2/2", lhs.data,
                    rhs.data, _scale(lhs.data, adv.data, half_grad.data), tol, v.grid, field_id)


def identity_div_cross(v: Field, tol: float = IDENTITY_TOL, field_id: str = "") -> CheckReport:
    """div((curl v) x v) = <curl^2 v, v> - |curl v|^2."""
    w = curl(v)
    lhs = div(lamb_vector(v))
    a, b = dot(curl2(v), v), square_norm(w)
    return _compare("identity-div-cross", "div(Cv x v) = <C^2 v, v> - |Cv|^2", lhs.data,
                    (a - b).data, _scale(lhs.data, a.data, b.data), tol, v.grid, field_id)


def identity_grad_q(v: Field, tol: float = IDENTITY_TOL, field_id: str = "") -> CheckReport:
    """grad Q = -(I - P)((curl v) x v) for divergence-free v."""
    lamb = lamb_vector(v)
    lhs = grad(bernoulli_q(v))
    rhs = -leray_complement(lamb)
    return _compare("identity-grad-q", "grad Q = -(I-P)(Cv x v)", lhs.data, rhs.data,
                    _scale(lhs.data, lamb.data), tol, v.grid, field_id)


def identity_lamb_divergence(v: Field, tol: float = IDENTITY_TOL,
                             field_id: str = "") -> CheckReport:
    """P((curl v) x v) = sum_l d_l u_l with u_l the columns of s0_map(v)."""
    lamb = lamb_vector(v)
    lhs = leray_project(lamb)
    rhs = div(s0_map(v))
    return _compare("identity-lamb-divergence", "P(Cv x v) = sum_l d_l u_l", lhs.data,
                    rhs.data, _scale(lamb.data, rhs.data), tol, v.grid, field_id)


def identity_leray_gradient(v: Field, tol: float = 1e-12, field_id: str = "") -> CheckReport:
    """P(grad |v|^2) = 0."""
    g = grad(square_norm(v))
    out = leray_project(g)
    return _compare("identity-leray-gradient", "P(grad|v|^2) = 0", out.data,
                    np.zeros_like(out.data), _scale(g.data), tol, v.grid, field_id)


def pointwise_cancellation(v: Field, tol: float = 1e-12, field_id: str = "") -> CheckReport:
    """<(curl v)(x) x v(x), v(x)> = 0 at every node (repeated-column determinant)."""
    w = curl(v).data
    val = np.sum(np.cross(w, v.data, axis=0) * v.data, axis=0)
    sc = float(np.max(pointwise_magnitude(Field(v.grid, w)))) * float(
        np.max(pointwise_magnitude(v))) ** 2
    return CheckReport.compare("pointwise-cancellation", "<Cv x v, v> = det(Cv, v, v) = 0",
                               residual=np.max(np.abs(val)), scale=sc, tol=tol, lhs=0.0,
                               rhs=0.0, grid=v.grid, field_id=field_id)


# -- Laplacian of the Bernoulli head -----------------------------------------

def identity_deltaq(state: NseState, form: str = "conditional",
                    tol: float | None = None) -> CheckReport:
    """Laplacian of Q.

    ``unconditional``: dQ = |Cv|^2 - <C^2 v, v>, for any divergence-free v.
    ``conditional``: dQ = |Cv|^2 + <grad Q, v>/nu - <f, v>/nu, which needs the
    state to solve the forced system.
    """
    v, nu = state.v, state.nu
    dq = laplacian(state.Q)
    w2 = square_norm(curl(v))
    if form == "unconditional":
        other = dot(curl2(v), v)
        rhs = w2 - other
        tol = IDENTITY_TOL if tol is None else tol
        anchor = "Delta Q = |Cv|^2 - <C^2 v, v>"
    elif form == "conditional":
        a = (1.0 / nu) * dot(grad(state.Q), v)
        b = (1.0 / nu) * dot(state.f, v)
        rhs = w2 + a - b
        other = a - b
        tol = CONDITIONAL_TOL if tol is None else tol
        anchor = "Delta Q = |Cv|^2 + <grad Q, v>/nu - <f, v>/nu"
    else:
        raise ValueError(f"unknown form {form!r}")
    return _compare(f"deltaq-{form}", anchor, dq.data, rhs.data,
                    _scale(dq.data, w2.data, other.data), tol, state.grid, state.field_id)


def energy_balance(state: NseState, tol: float = CONDITIONAL_TOL) -> list[CheckReport]:
    """nu ||Cv||^2 = <f, v>, int Delta Q = 0 and int (Delta Q)_+ = int (Delta Q)_-."""
    v, g, fid = state.v, state.grid, state.field_id
    w = curl(v)
    lhs = state.nu * inner(w, w)
    rhs = inner(state.f, v)
    dq = laplacian(state.Q).data
    pos = integrate(np.maximum(dq, 0), g)
    neg = integrate(np.maximum(-dq, 0), g)
    total = integrate(dq, g)
    return [
        CheckReport.compare("energy-balance", "nu ||Cv||^2 = <f, v>", residual=abs(lhs - rhs),
                            scale=max(abs(lhs), abs(rhs)), tol=tol, lhs=lhs, rhs=rhs, grid=g,
                            field_id=fid),
        CheckReport.compare("deltaq-mean-zero", "int Delta Q = 0", residual=abs(total),
                            scale=pos + neg, tol=tol, lhs=total, rhs=0.0, grid=g, field_id=fid),
        CheckReport.compare("deltaq-sign-balance", "int (Delta Q)_+ = int (Delta Q)_-",
                            residual=abs(pos - neg), scale=max(pos, neg), tol=tol, lhs=pos,
                            rhs=neg, grid=g, field_id=fid),
    ]


def sublevel_energy_audit(state: NseState, eps: float) -> CheckReport:
    """Masked-quadrature comparison on the sublevel set {Q < -eps}.

    lhs = int |Cv|^2 and rhs = int (Delta Q + <f, v>/nu) over the set.  The
    exact identity also carries int <grad Q, v>/nu, a boundary flux of
    (Q + eps) v which vanishes in the continuum; on the grid it is the
    discrepancy reported, with an O(h) tolerance.  Node products are used on
    purpose: the pointwise identity then holds exactly at every node.

    The level is flagged non-regular when some node within one grid spacing
    of the level set (distance estimated as |Q + eps| / |grad Q|) has
    |grad Q| below 5% of its maximum.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    v, g, nu = state.v, state.grid, state.nu
    mask = state.Q.data < -eps
    h = g.spacing
    tol = h / g.box_length
    if not mask.any():
        return CheckReport.compare("sublevel-energy", "int_{Q<-eps} |Cv|^2 = int_{Q<-eps} Delta Q",
                                   residual=0.0, tol=tol, lhs=0.0, rhs=0.0, grid=g,
                                   field_id=state.field_id, extra={"eps": eps, "empty": True})
    w = curl(v).data
    gq = grad(state.Q).data
    dq = laplacian(state.Q).data
    fv = np.sum(state.f.data * v.data, axis=0)
    lhs = np.sum(np.sum(w * w, axis=0)[mask]) * g.cell_volume
    rhs = np.sum((dq + fv / nu)[mask]) * g.cell_volume
    gmag = np.sqrt(np.sum(gq * gq, axis=0))
    near = np.abs(state.Q.data + eps) <= h * gmag
    regular = bool(near.any() and gmag[near].min() >= 0.05 * gmag.max())
    return CheckReport.compare(
        "sublevel-energy", "int_{Q<-eps} |Cv|^2 = int_{Q<-eps} Delta Q", residual=abs(lhs - rhs),
        scale=abs(lhs), tol=tol, lhs=lhs, rhs=rhs, grid=g, field_id=state.field_id,
        extra={"eps": eps, "empty": False, "regular_level": regular,
               "q_min": float(state.Q.data.min()), "q_max": float(state.Q.data.max())})


def sublevel_resolution_sweep(state: NseState, grids: Sequence[GridSpec],
                              level_fractions: Sequence[float] = tuple(np.linspace(0.1, 0.9, 9))
                              ) -> tuple[list[dict], list[float]]:
    """Run the sublevel audit for the same band-limited state on several grids.

    Levels are eps = q |min Q| for each fraction q, fixed from the first grid.
    Returns per-(grid, level) rows and the RMS discrepancy per grid; a single
    level is noisy under sharp masking, the RMS over levels is not.
    """
    qmin = float(state.Q.data.min())
    if qmin >= 0:
        raise ValueError("Q must take negative values for a sublevel sweep")
    rows, rms = [], []
    for g in grids:
        v = resample(state.v, g)
        st = NseState.manufacture(Field(g, v.data, divergence_free=True), state.nu,
                                  state.field_id)
        res = []
        for q in level_fractions:
            rep = sublevel_energy_audit(st, -q * qmin)
            res.append(rep.residual)
            rows.append({"n": g.n, "eps": -q * qmin, "lhs": rep.lhs, "rhs": rep.rhs,
                         "residual": rep.residual,
                         "regular_level": rep.extra.get("regular_level")})
        rms.append(float(np.sqrt(np.mean(np.square(res)))))
    return rows, rms


# -- spectral bootstrap -------------------------------------------------------

def bootstrap_spectral_audit(state: NseState, kappa: float,
                             tol: float = IDENTITY_TOL) -> list[CheckReport]:
    """Per-mode stationary equation and the weighted cascade inequality.

    Per mode: nu |k|^2 W + P(k) i k_j (W_j * W) - F = 0 with * the dealiased
    convolution.  Since P(k) i k_l (v_l v) = i k_l u_l, summing
    |k|^(kappa-1) times the per-mode bound over k != 0 gives
        nu sum |k|^(1+kappa) |W| <= sum_l sum |k|^kappa |U_l| + sum |k|^(kappa-1) |F|,
    asserted here.  The variant with |k|^kappa |F| follows when every nonzero
    |k| >= 1 and is asserted only then.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    v, g, nu, fid = state.v, state.grid, state.nu, state.field_id
    W = coefficients(v)
    F = coefficients(state.f)
    T = coefficients(outer(v, v))
    k = g.wavevectors
    k2 = g.wavenumber ** 2
    conv = 1j * np.einsum("j...,ji...->i...", k, T)
    P = LERAY.evaluate(k).real
    lhs_mode = nu * k2 * W + np.einsum("ab...,b...->a...", P, conv) - F
    lhs_mode = lhs_mode * g.band_mask
    sc = float(np.max(np.abs(nu * k2 * W)))
    per_mode = CheckReport.compare(
        "bootstrap-spectral-equation", "nu|k|^2 W + i P(k) k_j (W_j * W) = F",
        residual=np.max(np.abs(lhs_mode)), scale=sc, tol=tol, grid=g, field_id=fid,
        extra={"kappa": kappa})

    r = g.wavenumber
    nz = r > 0
    U = coefficients(s0_map(v))
    umag = np.sqrt(np.sum(np.abs(U) ** 2, axis=1))  # |U_l(k)| per column l
    wmag = np.sqrt(np.sum(np.abs(W) ** 2, axis=0))
    fmag = np.sqrt(np.sum(np.abs(F) ** 2, axis=0))
    lhs = nu * np.sum(r[nz] ** (1 + kappa) * wmag[nz])
    u_term = np.sum(r[nz] ** kappa * umag[:, nz])
    rhs_tight = u_term + np.sum(r[nz] ** (kappa - 1) * fmag[nz])
    rhs_stated = u_term + np.sum(r[nz] ** kappa * fmag[nz])
    kmin = float(r[nz].min())
    reports = [per_mode,
               CheckReport.inequality(
                   "bootstrap-cascade", "nu sum|k|^(1+kappa)|W| <= sum|k|^kappa|U| + sum|k|^(kappa-1)|F|",
                   lhs=lhs, rhs=rhs_tight, tol=1e-12, grid=g, field_id=fid,
                   extra={"kappa": kappa})]
    stated = CheckReport.inequality(
        "bootstrap-cascade-unit-lattice", "nu sum|k|^(1+kappa)|W| <= sum|k|^kappa(|U| + |F|)",
        lhs=lhs, rhs=rhs_stated, tol=1e-12, grid=g, field_id=fid,
        extra={"kappa": kappa, "min_wavenumber": kmin})
    stated.diagnostic = kmin < 1
    reports.append(stated)
    return reports


# -- band audits ------------------------------------------------------------

def s0_bilinear(a: Field, b: Field) -> Field:
    """Columns P(a_l b - <a, b> e_l / 2), mean removed; s0_bilinear(v, v) = s0_map(v)."""
    def expr(x, y):
        t = x[:, None] * y[None, :]
        t -= 0.5 * np.sum(x * y, axis=0) * np.eye(3).reshape(3, 3, 1, 1, 1)
        return t
    T = dealiased(expr, a, b)
    c = coefficients(T)
    sym = LERAY.evaluate(a.grid.wavevectors)
    out = np.einsum("ab...,lb...->la...", sym, c)
    out[..., 0, 0, 0] = 0.0
    out = out * ~a.grid.nyquist_mask
    return from_coefficients(a.grid, out)


def _contract(U: Field, w: Field) -> Field:
    """Vector with components sum_i U[l, i] w_i, dealiased."""
    return dealiased(lambda a, b: np.einsum("li...,i...->l...", a, b), U, w)


def galdi_band_audit(state: NseState, alpha0, tol: float = IDENTITY_TOL) -> list[CheckReport]:
    """Band norms and the four-term split of v_[0] . S0(v x v).

    Norms are diagnostics; the reassembly of the four terms is asserted.
    """
    from .bands import split_bands
    v, g, fid = state.v, state.grid, state.field_id
    low, high = split_bands(v, alpha0)
    parts = {"00": (low, low), "01": (low, high), "10": (high, low), "11": (high, high)}
    terms = {key: _contract(s0_bilinear(a, b), low) for key, (a, b) in parts.items()}
    direct = _contract(s0_map(v), low)
    total = sum((t.data for t in terms.values()), np.zeros_like(direct.data))
    norms = {f"term_{key}_L3/2": lp_norm(t, 1.5).value for key, t in terms.items()}
    norms["low_L9/2"] = lp_norm(low, 4.5).value
    norms["high_L2"] = lp_norm(high, 2).value
    diag = CheckReport.compare("galdi-band-norms", "v_[0] in L^9/2, v_[1] in L^2", residual=0.0,
                               tol=0.0, lhs=norms["low_L9/2"], rhs=norms["high_L2"], grid=g,
                               field_id=fid, diagnostic=True, extra=norms)
    re = _compare("galdi-band-reassembly", "v_[0] S0(v x v) = sum of band terms", total,
                  direct.data, _scale(direct.data, *(t.data for t in terms.values())), tol, g,
                  fid)
    return [diag, re]


def chae_band_audit(state: NseState, alpha0, tol: float = IDENTITY_TOL) -> list[CheckReport]:
    """Band split of C^2 v . v; norms are diagnostics, the reassembly is asserted."""
    from .bands import split_bands
    v, g, fid = state.v, state.grid, state.field_id
    low, high = split_bands(v, alpha0)
    c2, c2_low, c2_high = curl2(v), curl2(low), curl2(high)
    t1, t2, t3 = dot(c2, high), dot(c2_high, low), dot(c2_low, low)
    direct = dot(c2, v)
    norms = {"C2v.v1_L1": lp_norm(t1, 1).value, "C2v1.v0_L1": lp_norm(t2, 1).value,
             "C2v0.v0_L1": lp_norm(t3, 1).value,
             "alpha0_C2v_L6/5": lp_norm(apply_multiplier(alpha0.multiplier(), c2), 1.2).value}
    diag = CheckReport.compare("chae-band-norms", "band norms of C^2 v . v", residual=0.0,
                               tol=0.0, lhs=None, rhs=None, grid=g, field_id=fid,
                               diagnostic=True, extra=norms)
    total = t1.data + t2.data + t3.data
    re = _compare("chae-band-reassembly", "C^2 v.v = C^2 v.v_[1] + C^2 v_[1].v_[0] + C^2 v_[0].v_[0]",
                  total, direct.data, _scale(direct.data, t1.data, t2.data, t3.data), tol, g, fid)
    return [diag, re]


def q_range_diagnostic(state: NseState) -> CheckReport:
    """min/max of Q; a sign statement is not assertable for forced states."""
    q = state.Q.data
    return CheckReport.compare("q-range", "range of Q", residual=0.0, tol=0.0,
                               lhs=float(q.min()), rhs=float(q.max()), grid=state.grid,
                               field_id=state.field_id, diagnostic=True)


# -- linear model -----------------------------------------------------------

def linear_liouville_audit(f: Field, X: Field, nu: float,
                           tol: float = CONDITIONAL_TOL, field_id: str = "") -> CheckReport:
    """nu ||grad f||^2 = <g, f> + <div X, f^2>/2 with g = -nu Delta f + X . grad f."""
    if f.rank != 0 or X.rank != 1:
        raise ValueError("need a scalar f and a vector X")
    g = -nu * laplacian(f) + dot(X, grad(f))
    gf = grad(f)
    lhs = nu * inner(gf, gf)
    dx = div(X)
    f2 = dealiased(lambda a: a * a, f)
    rhs = inner(g, f) + 0.5 * inner(dx, f2)
    pos = lp_norm(Field(f.grid, np.maximum(dx.data, 0)), 1.5).value
    return CheckReport.compare("linear-liouville", "nu||grad f||^2 = <g, f> + <div X, f^2>/2",
                               residual=abs(lhs - rhs), scale=max(abs(lhs), abs(rhs)), tol=tol,
                               lhs=lhs, rhs=rhs, grid=f.grid, field_id=field_id,
                               extra={"div_x_plus_L3/2": pos})


def unconditional_suite(v: Field, field_id: str = "") -> list[CheckReport]:
    st = NseState(v, 1.0, zeros(v.grid, (3,)), field_id)
    return [identity_cross(v, field_id=field_id), identity_div_cross(v, field_id=field_id),
            identity_deltaq(st, "unconditional"), identity_grad_q(v, field_id=field_id),
            identity_lamb_divergence(v, field_id=field_id),
            identity_leray_gradient(v, field_id=field_id),
            pointwise_cancellation(v, field_id=field_id)]


def conditional_suite(state: NseState) -> list[CheckReport]:
    return (residual_check(state) + [identity_deltaq(state, "conditional")]
            + energy_balance(state))

"""Acceptance criteria: one test per criterion, each printing a PASS/FAIL line."""
import time
import warnings

import numpy as np
import pytest

from wienerns.bands import build_cutoff, commutator_kernel_check
from wienerns.certify import (BumpShape, gn_isoperimetric_diagnostic, hadamard_cross_certify,
                              holder_cross_certify, kappa_split_certify, peetre_certify,
                              power_inequality_certify, random_band_field,
                              submultiplicativity_certify, wiener_split_certify)
from wienerns.cli import commutator_inputs
from wienerns.field import GridSpec
from wienerns.nse import (bootstrap_spectral_audit, conditional_suite, sublevel_resolution_sweep,
                          unconditional_suite)
from wienerns.solutions import (HARMONIC_LIBRARY, analytic_identity_suite,
                                make_harmonic_gradient, make_random_divfree, make_shear,
                                rescale, scaling_covariance_check)
from wienerns.units import units_suite

RESULTS: list[str] = []


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title} ({detail})"
    RESULTS.append(line)
    print(line)


def shear_family():
    return [make_shear(field_id="shear-sin"),
            make_shear(sine=(1.0, 0.0, 0.5), nu=0.5, field_id="shear-two-mode"),
            make_shear(sine=(0.3,), cosine=(0.0, 1.0), mean=0.7, axes=(2, 0),
                       field_id="shear-mixed"),
            make_shear(sine=(), mean=1.5, axes=(1, 2), field_id="shear-constant")]


@pytest.fixture(scope="module")
def corpus():
    t0 = time.perf_counter()
    random = [make_random_divfree(s) for s in range(20)]
    harmonic = {name: make_harmonic_gradient(psi) for name, psi in HARMONIC_LIBRARY.items()}
    return random + shear_family(), harmonic, time.perf_counter() - t0


def test_criterion_01_unconditional_identities(corpus):
    states, harmonic, build_time = corpus
    t0 = time.perf_counter()
    reps = []
    for st in states:
        reps += unconditional_suite(st.v, st.field_id)
    for name, hg in harmonic.items():
        reps += [r for r in analytic_identity_suite(hg, npts=1000, field_id=name)
                 if r.check_id in ("analytic-identity-cross", "analytic-identity-div-cross",
                                   "analytic-pointwise-cancellation")]
    elapsed = build_time + time.perf_counter() - t0
    worst = max(r.residual for r in reps)
    ok = all(r.passed and r.tol <= 1e-10 for r in reps) and elapsed < 30
    record(1, "unconditional identity suite", ok,
           f"{len(reps)} checks on {len(states)} grid states + {len(harmonic)} analytic, "
           f"worst {worst:.1e}, {elapsed:.1f} s")
    assert ok


def test_criterion_02_conditional_identities(corpus):
    states, harmonic, _ = corpus
    reps = []
    for st in states:
        reps += conditional_suite(st)
    for name, hg in harmonic.items():
        reps += [r for r in analytic_identity_suite(hg, npts=1000, field_id=name)
                 if r.check_id in ("analytic-residual-bernoulli", "analytic-stationary-system",
                                   "analytic-bernoulli-zero")]
    ids = {r.check_id for r in reps}
    assert {"residual-leray", "deltaq-conditional", "energy-balance",
            "deltaq-sign-balance"} <= ids
    worst = max(r.residual for r in reps)
    ok = all(r.passed and r.tol <= 1e-9 for r in reps)
    record(2, "conditional identities with manufactured forcing", ok,
           f"{len(reps)} checks, worst {worst:.1e}")
    assert ok


def test_criterion_03_peetre_threshold():
    t0 = time.perf_counter()
    results = [peetre_certify(seed=s, samples=100_000) for s in range(10)]
    elapsed = time.perf_counter() - t0
    contains = all(r.bracket_low <= 4 / 3 <= r.bracket_high and
                   r.bracket_high - r.bracket_low <= 1e-6 for r in results)
    violations = sum(r.tau2_violations for r in results)
    ok = contains and violations == 0 and elapsed < 5 * len(results)
    record(3, "Peetre threshold bracket", ok,
           f"brackets [{results[0].bracket_low:.8f}, {results[0].bracket_high:.8f}] x10 seeds, "
           f"tau=2 violations {violations}, {elapsed / len(results):.2f} s per seed")
    assert ok and elapsed / len(results) < 5


def test_criterion_04_lattice_certificates():
    g = GridSpec(8, 2 * np.pi, 3)
    rng = np.random.default_rng(2024)
    reps = [submultiplicativity_certify(s, 1000, seed=4) for s in (0.0, 0.5, 1.0, 2.5)]
    reps.append(hadamard_cross_certify(samples=10_000, seed=4))
    reps.append(power_inequality_certify(points=1000, seed=4))
    pq = [(2, 6), (3, 3), (1.5, 3), (4, 4)]
    for i in range(1000):
        a, b = random_band_field(g, rng, (3,)), random_band_field(g, rng, (3,))
        reps.append(holder_cross_certify(a, b, *pq[i % len(pq)]))
        for kappa in (-0.4, 0.0, 0.4):
            reps.append(kappa_split_certify(a, kappa))
        reps += wiener_split_certify(b)
    counts = {}
    for r in reps:
        n = r.extra.get("pairs") or r.extra.get("samples") or r.extra.get("instances") or 1
        counts[r.check_id] = counts.get(r.check_id, 0) + n
    failures = [r for r in reps if not r.passed or r.tol > 1e-12]
    ok = not failures and min(counts.values()) >= 1000
    record(4, "lattice-exact certificates", ok,
           ", ".join(f"{k} {v} instances" for k, v in sorted(counts.items()))
           + f", violations {len(failures)}")
    assert ok


def test_criterion_05_bootstrap_audit(corpus):
    states = corpus[0][:5] + corpus[0][20:22]
    reps = []
    for st in states:
        for kappa in (0.0, 0.4, 1.0):
            reps += bootstrap_spectral_audit(st, kappa)
    spectral = [r for r in reps if r.check_id == "bootstrap-spectral-equation"]
    cascade = [r for r in reps if r.check_id.startswith("bootstrap-cascade")]
    ok = (all(r.passed and r.residual <= 1e-10 for r in spectral)
          and all(r.passed for r in cascade) and not any(r.diagnostic for r in cascade))
    record(5, "bootstrap spectral audit", ok,
           f"worst per-mode residual {max(r.residual for r in spectral):.1e}, "
           f"{len(cascade)} cascade inequalities")
    assert ok


def test_criterion_06_commutator_kernel():
    _, w, u = commutator_inputs(16)
    beta = build_cutoff("high-pass", 1, 2)
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        reps = [commutator_kernel_check(beta, 3.0, w, u, q) for q in (2, 4, 8)]
    elapsed = time.perf_counter() - t0
    errs = [r.residual for r in reps]
    ok = errs[-1] <= 1e-3 and errs[0] > errs[1] > errs[2] and elapsed < 120
    record(6, "commutator kernel vs direct on 16^3", ok,
           "errors " + ", ".join(f"{e:.1e}" for e in errs) + f", {elapsed:.0f} s")
    assert ok


def test_criterion_07_scaling_covariance(corpus):
    states = corpus[0][:3] + corpus[0][20:22]
    reps = []
    for st in states:
        reps += [r for r in scaling_covariance_check(st, 2.0)
                 if r.check_id in ("scaling-residual", "scaling-enstrophy")]
        w = rescale(st, 2.0)
        assert w.grid.n == st.grid.n
    ok = all(r.passed and r.tol <= 1e-10 for r in reps) and len(reps) == 10
    record(7, "scaling covariance with lambda = 2", ok,
           f"{len(states)} states, worst {max(r.residual for r in reps):.1e}")
    assert ok


def test_criterion_08_units():
    reps = {r.check_id: r for r in units_suite()}
    wanted = ["units-viscous-term", "units-convective-term", "units-viscous-vs-convective",
              "units-curl-l2", "units-curl-cubed", "units-curl2-l2", "units-curl2-bound",
              "units-fourier-velocity"]
    ok = all(reps[k].passed and reps[k].residual == 0 for k in wanted)
    ok = ok and reps["units-fourier-velocity"].extra["lhs_units"] == "L^4 T^-1"
    record(8, "units of the bracketed computations", ok,
           f"{len(wanted)} exact rational comparisons, {len(reps)} fixtures in total")
    assert ok


def test_criterion_09_sublevel_first_order():
    st = make_random_divfree(0)
    qmin, qmax = float(st.Q.data.min()), float(st.Q.data.max())
    grids = [GridSpec(n, st.grid.box_length, st.grid.dealias_limit) for n in (32, 64)]
    _, rms = sublevel_resolution_sweep(st, grids)
    ratio = rms[0] / rms[1]
    ok = qmin < 0 < qmax and ratio >= 2.0
    record(9, "sublevel energy discrepancy under refinement", ok,
           f"RMS discrepancy {rms[0]:.2e} -> {rms[1]:.2e}, ratio {ratio:.2f} (first order: 2)")
    assert ok


def test_criterion_10_gn_isoperimetric():
    shapes = [BumpShape("poly", 0.25, 2), BumpShape("poly", 0.25, 3), BumpShape("poly", 0.2, 4),
              BumpShape("exp", 0.25), BumpShape("plateau", 0.25, 7)]
    reps = [gn_isoperimetric_diagnostic(s, GridSpec(64)) for s in shapes]
    ratios = [r.extra["ratio"] for r in reps]
    ok = all(x >= 1 for x in ratios)
    record(10, "isoperimetric ratio of five bumps at n = 64", ok,
           "ratios " + ", ".join(f"{x:.3f}" for x in ratios) + " (diagnostic)")
    if not ok:
        warnings.warn("isoperimetric diagnostic below 1")
    assert all(r.diagnostic for r in reps)
    assert ok

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import scalar, vector
from wienerns.certify import (BumpShape, gn_isoperimetric_diagnostic, hadamard_cross_certify,
                              holder_cross_certify, kappa_split_certify, peetre_certify,
                              peetre_gap, power_inequality_certify, random_band_field,
                              star_convolution, submultiplicativity_certify, sup_wiener_check,
                              wiener_split_certify, young_star_certify)
from wienerns.field import GridSpec, coefficients

G8 = GridSpec(8, 2 * np.pi, 3)


def test_peetre_brackets_four_thirds():
    res = peetre_certify(seed=0)
    assert res.bracket_low <= 4 / 3 <= res.bracket_high
    assert res.bracket_high - res.bracket_low <= 1e-6
    assert res.tau2_violations == 0 and res.samples == 100_000
    assert res.report().passed


def test_tau_one_counterexample():
    t = math.sqrt(2 / 3)
    # 1 + |2 xi|^2 = 11/3 exceeds (1 + 2/3)^2 = 25/9
    assert peetre_gap(1.0, t, t) == pytest.approx(25 / 9 - 11 / 3)
    assert peetre_gap(1.0, t, t) < 0 and peetre_gap(2.0, t, t) > 0


@given(st.floats(0, 50), st.floats(0, 50))
def test_peetre_four_thirds_admissible(a, b):
    assert peetre_gap(4 / 3, a, b) >= -1e-9 * (1 + a * a) * (1 + b * b)


def test_hadamard_equality_and_parallel():
    a, b = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    assert np.linalg.norm(np.cross(a, b)) == 1.0 == np.linalg.norm(a) * np.linalg.norm(b)
    assert np.linalg.norm(np.cross(a, 3 * a)) == 0.0
    assert hadamard_cross_certify(samples=1000).passed


def test_holder_and_young_random():
    rng = np.random.default_rng(3)
    a, b = random_band_field(G8, rng, (3,)), random_band_field(G8, rng, (3,))
    rep = holder_cross_certify(a, b, 2, 6)
    assert rep.passed and rep.extra["r"] == pytest.approx(1.5)
    assert young_star_certify(a, b, 1, 2).passed


def test_star_convolution_of_constants():
    e1 = vector(G8, lambda x, y, z: 0 * x + 1.0, lambda x, y, z: 0 * x, lambda x, y, z: 0 * x)
    e2 = vector(G8, lambda x, y, z: 0 * x, lambda x, y, z: 0 * x + 1.0, lambda x, y, z: 0 * x)
    out = star_convolution(e1, e2).data
    assert np.allclose(out[2], G8.volume) and np.allclose(out[:2], 0)


def test_power_inequality():
    rep = power_inequality_certify(points=1000)
    assert rep.passed and rep.extra["instances"] >= 1000


def test_kappa_split_sin(grid):
    v = scalar(grid, lambda x, y, z: np.sin(x))
    for kappa in (-0.4, 0.0, 0.4):
        rep = kappa_split_certify(v, kappa)
        assert rep.lhs == pytest.approx(1.0) and rep.lhs < rep.rhs and rep.passed


def test_kappa_zero_is_unit_radius_wiener_split(random_states):
    v = random_states[0].v
    rep = kappa_split_certify(v, 0.0)
    c = coefficients(v)
    mag = np.sqrt(np.sum(np.abs(c) ** 2, axis=0))
    assert rep.lhs == pytest.approx(mag[v.grid.wavenumber > 0].sum(), rel=1e-12)
    with pytest.raises(ValueError):
        kappa_split_certify(v, 0.5)


@given(st.integers(0, 2**32 - 1), st.sampled_from([-0.4, 0.0, 0.4]))
def test_lattice_cauchy_schwarz_property(seed, kappa):
    v = random_band_field(G8, np.random.default_rng(seed), (3,))
    assert kappa_split_certify(v, kappa).passed
    assert all(r.passed for r in wiener_split_certify(v))
    assert sup_wiener_check(v).passed


def test_submultiplicativity_small():
    assert submultiplicativity_certify(1.0, pairs=50).passed


def test_gn_bump_ratio_above_one():
    rep = gn_isoperimetric_diagnostic(BumpShape("poly", 0.25, 3), GridSpec(64))
    assert rep.diagnostic and rep.extra["ratio"] > 1


def test_gn_scale_invariance():
    small = gn_isoperimetric_diagnostic(BumpShape("poly", 0.2, 3), GridSpec(64))
    big = gn_isoperimetric_diagnostic(BumpShape("poly", 0.4, 3), GridSpec(64))
    assert big.extra["ratio"] == pytest.approx(small.extra["ratio"], rel=2e-3)
    other_box = gn_isoperimetric_diagnostic(BumpShape("poly", 0.2, 3), GridSpec(64, 5.0))
    assert other_box.extra["ratio"] == pytest.approx(small.extra["ratio"], rel=1e-12)


def test_gn_zero_field_skipped():
    rep = gn_isoperimetric_diagnostic(BumpShape("poly", 0.25, 3, amplitude=0.0), GridSpec(16, 2 * np.pi, 7))
    assert rep.diagnostic and rep.extra["skipped"] == "zero field"

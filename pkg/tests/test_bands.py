import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import scalar, vector
from wienerns.bands import (KernelDecayError, build_cutoff, band_disjointness_check,
                            commutator_direct, commutator_kernel, commutator_kernel_check,
                            kernel_decay_ratio, plateau_identity_check, smoothstep, split_bands)
from wienerns.field import GridSpec, from_function, spectrum_support

G8 = GridSpec(8, 4 * np.pi, 3)


@pytest.fixture(scope="module")
def smooth_pair():
    w = from_function(G8, lambda x, y, z: np.sin(x / 2) + 0.5 * np.cos(y / 2 + z / 2))
    u = from_function(G8, lambda x, y, z: np.cos(x / 2 + 0.3) + 0.4 * np.sin(z / 2))
    return w, u


def test_alpha0_plateau_and_support():
    a0 = build_cutoff("low-pass", 1, 2)
    assert a0(0.0) == 1.0 and a0(1.0) == 1.0
    assert np.all(a0(np.linspace(2, 10, 50)) == 0.0)
    b1 = a0.complement()
    assert b1(0.0) == 0.0 and np.all(b1(np.linspace(2, 10, 50)) == 1.0)


@given(st.floats(0, 5), st.sampled_from([5, 7, 9]))
def test_profile_range_and_partition(r, order):
    a0 = build_cutoff("low-pass", 1, 2, order)
    assert 0.0 <= a0(r) <= 1.0
    assert a0(r) + a0.complement()(r) == pytest.approx(1.0, abs=1e-15)


def test_smoothstep_derivative_matches_finite_difference():
    a0 = build_cutoff("low-pass", 1, 2)
    r = np.linspace(0.5, 2.5, 41)
    h = 1e-6
    fd = (a0(r + h) - a0(r - h)) / (2 * h)
    assert np.abs(a0.derivative(r) - fd).max() < 1e-6
    with pytest.raises(ValueError):
        smoothstep(np.zeros(1), 6)


def test_plateau_identity(grid):
    assert plateau_identity_check(build_cutoff("low-pass", 1, 2), 0.5, grid).passed


def test_partition_and_disjointness_on_lattice(grid):
    a0 = build_cutoff("low-pass", 1, 2)
    r = grid.wavenumber
    assert np.array_equal(a0(r) + a0.complement()(r), np.ones_like(r))
    assert band_disjointness_check(a0, grid).residual == 0.0


def test_split_disjoint_spectra(grid):
    v = vector(grid, lambda x, y, z: np.sin(x), lambda x, y, z: np.sin(5 * y) + 0 * x,
               lambda x, y, z: 0 * x)
    low, high = split_bands(v, build_cutoff("low-pass", 2, 3))
    assert {np.linalg.norm(k) for k in spectrum_support(low)} == {1.0}
    assert {np.linalg.norm(k) for k in spectrum_support(high)} == {5.0}


def test_split_low_only_and_partition(grid, random_states):
    a0 = build_cutoff("low-pass", 2, 3)
    low_only = scalar(grid, lambda x, y, z: np.cos(x) + np.sin(y))
    assert np.abs(split_bands(low_only, a0).high.data).max() < 1e-15
    v = random_states[0].v
    lo, hi = split_bands(v, a0)
    assert np.abs(lo.data + hi.data - v.data).max() < 1e-14


def test_commutator_direct_trivial_cases(smooth_pair):
    w, u = smooth_pair
    beta = build_cutoff("high-pass", 1, 2)
    const = from_function(G8, lambda x, y, z: 0 * x + 3.0)
    assert np.abs(commutator_direct(beta, 3.0, const, u).data).max() < 1e-12
    zero = from_function(G8, lambda x, y, z: 0 * x)
    assert np.abs(commutator_direct(beta, 3.0, w, zero).data).max() == 0


def test_commutator_direct_support_separation():
    # u at |k| = 1/2 is killed by beta(D); w at |k| = 3 so w u lives on |k| >= 5/2
    g = GridSpec(16, 4 * np.pi, 7)
    beta = build_cutoff("high-pass", 1, 2)
    u = from_function(g, lambda x, y, z: np.cos(x / 2))
    w = from_function(g, lambda x, y, z: np.sin(3 * x) + np.cos(3 * y))
    out = commutator_direct(beta, 1.0, w, u)
    radii = [np.linalg.norm(k) for k in spectrum_support(out)]
    assert radii and min(radii) >= 2.5 - 1e-12


def test_commutator_kernel_constant_w(smooth_pair):
    _, u = smooth_pair
    const = from_function(G8, lambda x, y, z: 0 * x + 2.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = commutator_kernel(build_cutoff("high-pass", 1, 2), 3.0, const, u, 2)
    assert np.abs(out.data).max() < 1e-12


def test_commutator_kernel_converges(smooth_pair):
    w, u = smooth_pair
    beta = build_cutoff("high-pass", 1, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        errs = [commutator_kernel_check(beta, 3.0, w, u, q).residual for q in (1, 2, 4, 8)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-3


def test_kernel_decay_precondition(smooth_pair):
    w, u = smooth_pair
    beta = build_cutoff("high-pass", 1, 2)
    ratio = kernel_decay_ratio(beta, 3.0, G8)
    assert ratio > 1e-6
    with pytest.warns(UserWarning):
        commutator_kernel(beta, 3.0, w, u, 1)
    with pytest.raises(KernelDecayError):
        commutator_kernel(beta, 3.0, w, u, 1, strict=True)

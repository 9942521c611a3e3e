import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import scalar, vector
from wienerns.certify import random_band_field
from wienerns.field import GridSpec, multiply
from wienerns.norms import (hdot_norm, japanese_bracket, lp_norm, superlevel_measure,
                            vsw_norm, weighted_wiener, wiener_norm)
from wienerns.operators import curl

TWO_PI3 = (2 * np.pi) ** 3


def test_lp_sin(grid):
    f = scalar(grid, lambda x, y, z: np.sin(x))
    assert lp_norm(f, 2).value == pytest.approx(math.sqrt(TWO_PI3 / 2), rel=1e-14)
    assert lp_norm(f, math.inf).value == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("p", [1, 1.5, 2, 6])
def test_lp_constant(grid, p):
    f = scalar(grid, lambda x, y, z: np.ones_like(x))
    assert lp_norm(f, p).value == pytest.approx(grid.box_length ** (3 / p), rel=1e-14)


def test_wiener_and_vsw(grid):
    assert wiener_norm(scalar(grid, lambda x, y, z: np.sin(x))).value == pytest.approx(1.0)
    one = scalar(grid, lambda x, y, z: np.ones_like(x))
    assert japanese_bracket(np.zeros(1))[0] == pytest.approx(math.sqrt(2))
    assert vsw_norm(one, 2).value == pytest.approx(2.0)
    assert vsw_norm(scalar(grid, lambda x, y, z: np.cos(x)), 2).value == pytest.approx(3.0)


def test_hdot_and_weighted(grid):
    f = scalar(grid, lambda x, y, z: np.sin(x))
    assert hdot_norm(f, 1).value == pytest.approx(math.sqrt(TWO_PI3 / 2), rel=1e-14)
    g = scalar(grid, lambda x, y, z: 2 + np.cos(y) + 0.5 * np.sin(2 * z))
    assert weighted_wiener(g, 0).value == pytest.approx(wiener_norm(g).value - 2.0)


def test_hdot_equals_curl_l2(shear, random_states):
    for stt in [shear] + random_states:
        a = hdot_norm(stt.v, 1).value
        b = lp_norm(curl(stt.v), 2).value
        assert abs(a - b) <= 1e-10 * b


def test_superlevel(grid):
    f = scalar(grid, lambda x, y, z: np.sin(x))
    assert superlevel_measure(f, math.sqrt(2) / 2) == pytest.approx(TWO_PI3 / 2)
    assert superlevel_measure(f, 1.0) == 0.0 and superlevel_measure(f, 3.0) == 0.0
    g = scalar(grid, lambda x, y, z: 2 + np.sin(x))
    assert superlevel_measure(g, 0.0) == pytest.approx(grid.volume)


def test_sup_below_wiener(shear, random_states):
    for stt in [shear] + random_states:
        assert lp_norm(stt.v, math.inf).value <= wiener_norm(stt.v).value * (1 + 1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from([0.0, 1.0, 2.5]))
def test_submultiplicative_property(seed, s):
    g = GridSpec(8, 2 * np.pi, 3)
    rng = np.random.default_rng(seed)
    a, b = random_band_field(g, rng), random_band_field(g, rng)
    assert vsw_norm(multiply(a, b), s).value <= vsw_norm(a, s).value * vsw_norm(b, s).value * (1 + 1e-12)


@given(st.integers(0, 2**32 - 1), st.floats(0, 3), st.floats(0, 3))
def test_vsw_monotone_in_s(seed, s1, s2):
    g = GridSpec(8, 2 * np.pi, 3)
    f = random_band_field(g, np.random.default_rng(seed), (3,))
    lo, hi = sorted((s1, s2))
    assert vsw_norm(f, lo).value <= vsw_norm(f, hi).value * (1 + 1e-12)


def test_vector_magnitude_convention(grid):
    # (cos x, sin x, 0): each of the two modes carries the 3-vector (1/2, -+i/2, 0)
    v = vector(grid, lambda x, y, z: np.cos(x), lambda x, y, z: np.sin(x), lambda x, y, z: 0 * x)
    assert wiener_norm(v).value == pytest.approx(math.sqrt(2))

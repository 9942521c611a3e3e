import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import scalar, vector
from wienerns.field import (Field, GridMismatchError, GridSpec, SpectralField, check_reality,
                            coefficients, cross, dot, forward_transform, from_coefficients,
                            integrate, inverse_transform, multiply, read_raw, resample,
                            spectrum_support, write_raw, write_spectral_csv)
from wienerns.solutions import make_random_divfree


def test_grid_invariants():
    with pytest.raises(ValueError):
        GridSpec(5)
    with pytest.raises(ValueError):
        GridSpec(32, 2 * np.pi, 16)
    g = GridSpec()
    m = g.mode_indices
    assert m.min() == -15 and m.max() == 16
    assert not np.any(g.nyquist_mask & g.band_mask)
    assert g.spacing == pytest.approx(2 * np.pi / 32)


def test_forward_sin_single_mode(grid):
    c = coefficients(scalar(grid, lambda x, y, z: np.sin(x)))
    assert c[1, 0, 0] == pytest.approx(-0.5j, abs=1e-15)
    assert c[-1, 0, 0] == pytest.approx(0.5j, abs=1e-15)
    c[1, 0, 0] = c[-1, 0, 0] = 0
    assert np.abs(c).max() < 1e-15


def test_forward_constant(grid):
    c = coefficients(scalar(grid, lambda x, y, z: np.ones_like(x)))
    assert c[0, 0, 0] == pytest.approx(1.0)
    c[0, 0, 0] = 0
    assert np.abs(c).max() < 1e-15


def test_round_trip_random(grid):
    v = Field(grid, np.random.default_rng(1).standard_normal(grid.shape))
    back = inverse_transform(forward_transform(v))
    assert np.abs(back.data - v.data).max() <= 1e-12 * np.abs(v.data).max()


@given(st.integers(0, 2**32 - 1))
def test_round_trip_and_parseval_property(seed):
    g = GridSpec(8, 3.0, 3)
    v = Field(g, np.random.default_rng(seed).standard_normal((3,) + g.shape))
    c = coefficients(v)
    back = inverse_transform(forward_transform(v)).data
    assert np.abs(back - v.data).max() <= 1e-12 * np.abs(v.data).max()
    # Parseval: mean of |v|^2 equals the coefficient energy
    lhs = np.mean(np.sum(v.data ** 2, axis=0))
    rhs = np.sum(np.abs(c) ** 2)
    assert abs(lhs - rhs) <= 1e-12 * rhs


def test_reality_cos_and_sum(grid):
    assert check_reality(forward_transform(scalar(grid, lambda x, y, z: np.cos(x)))).passed
    assert check_reality(forward_transform(
        scalar(grid, lambda x, y, z: np.sin(x) + np.cos(2 * y)))).passed


def test_reality_broken_symmetry(grid):
    c = np.zeros(grid.shape, complex)
    c[1, 0, 0] = 1.0
    assert not check_reality(SpectralField(grid, c)).passed


def test_support_sin(grid):
    assert spectrum_support(scalar(grid, lambda x, y, z: np.sin(x))) == {(1.0, 0.0, 0.0),
                                                                        (-1.0, 0.0, 0.0)}
    g = GridSpec(16, 4 * np.pi, 7)
    assert spectrum_support(scalar(g, lambda x, y, z: np.sin(x / 2))) == {(0.5, 0.0, 0.0),
                                                                         (-0.5, 0.0, 0.0)}


def test_support_zero(grid):
    assert spectrum_support(scalar(grid, lambda x, y, z: 0 * x)) == set()


def test_support_band_annulus():
    v = make_random_divfree(3).v
    radii = [np.linalg.norm(k) for k in spectrum_support(v)]
    assert radii and 2 - 1e-12 <= min(radii) and max(radii) <= 5 + 1e-12


def test_products_are_dealiased_and_exact(grid):
    a = scalar(grid, lambda x, y, z: np.sin(3 * x) + np.cos(2 * y))
    b = scalar(grid, lambda x, y, z: np.cos(4 * x) * np.sin(z))
    ab = multiply(a, b)
    assert np.abs(ab.data - a.data * b.data).max() < 1e-13
    # components beyond the dealias limit vanish after a product (up to transform rounding)
    hi = scalar(grid, lambda x, y, z: np.cos(8 * x))
    sq = coefficients(multiply(hi, hi))
    assert np.abs(sq[~grid.band_mask]).max() < 1e-16
    assert sq[0, 0, 0] == pytest.approx(0.5) and abs(sq[16, 0, 0]) < 1e-16


def test_dot_cross_integrate(grid):
    a = vector(grid, lambda x, y, z: np.sin(y), lambda x, y, z: 0 * x, lambda x, y, z: 0 * x)
    b = vector(grid, lambda x, y, z: 0 * x, lambda x, y, z: np.cos(x), lambda x, y, z: 0 * x)
    c = cross(a, b)
    assert np.abs(c.data[2] - np.sin(grid.coordinates[1]) * np.cos(grid.coordinates[0])).max() < 1e-13
    assert integrate(dot(a, a)) == pytest.approx(grid.volume / 2)


def test_invalid_shape(grid):
    with pytest.raises(GridMismatchError):
        Field(grid, np.zeros((4, 4, 4)))


def test_resample_band_limited(grid):
    f = scalar(grid, lambda x, y, z: np.sin(x) * np.cos(2 * z))
    fine = resample(f, GridSpec(64, grid.box_length, grid.dealias_limit))
    x, y, z = fine.grid.coordinates
    assert np.abs(fine.data - np.sin(x) * np.cos(2 * z)).max() < 1e-13


def test_spectral_csv_and_raw(tmp_path, grid):
    v = make_random_divfree(0).v
    write_spectral_csv(v, tmp_path / "v.csv")
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "k1,k2,k3,re0,im0,re1,im1,re2,im2" and len(lines) == 1 + grid.n ** 3
    write_raw(v, tmp_path / "v.raw")
    back = read_raw(tmp_path / "v.raw")
    assert back.grid == grid and np.array_equal(back.data, v.data)


def test_from_coefficients_round_trip(grid):
    f = scalar(grid, lambda x, y, z: np.cos(x + 2 * y))
    assert np.abs(from_coefficients(grid, coefficients(f)).data - f.data).max() < 1e-14

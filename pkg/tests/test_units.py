from fractions import Fraction

import pytest

from wienerns.units import (Derivative, Dimension, Fourier, LpNorm, PRESSURE, Quantity, Sum,
                            VELOCITY, VISCOSITY, enstrophy_root, fixtures, nu, units_check,
                            units_suite, v)


def test_viscous_and_convective_terms():
    assert (nu * Derivative(v, 2)).dimension() == Dimension(1, -2)
    assert Derivative(v * v).dimension() == Dimension(1, -2)


def test_enstrophy_chain():
    assert enstrophy_root.dimension() == Dimension(Fraction(3, 2), -1)
    assert (nu ** -2 * enstrophy_root ** 3).dimension() == Dimension(Fraction(1, 2), -1)
    assert LpNorm(Derivative(v, 2), 2).dimension() == Dimension(Fraction(1, 2), -1)


def test_fourier_velocity():
    assert Fourier(v).dimension() == Dimension(4, -1)


def test_all_fixtures_exact():
    reps = units_suite()
    assert len(reps) == len(fixtures()) and all(r.passed and r.residual == 0 for r in reps)


def test_mismatch_detected():
    rep = units_check("bad", "[v] = [p]", v, Quantity("p", PRESSURE))
    assert not rep.passed and rep.extra["lhs_units"] == "L^1 T^-1"
    with pytest.raises(ValueError):
        Sum(v, Quantity("p", PRESSURE)).dimension()


def test_exponents_are_exact_rationals():
    d = (VISCOSITY ** Fraction(1, 3)) * VELOCITY
    assert d.length == Fraction(5, 3) and d.time == Fraction(-4, 3)
    assert isinstance(LpNorm(v, Fraction(3, 2)).dimension().length, Fraction)

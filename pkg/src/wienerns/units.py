"""Dimensional analysis with exact rational exponents of length and time."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .report import CheckReport

Number = Union[int, Fraction, str]


@dataclass(frozen=True)
class Dimension:
    length: Fraction = Fraction(0)
    time: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "length", Fraction(self.length))
        object.__setattr__(self, "time", Fraction(self.time))

    def __mul__(self, other: "Dimension") -> "Dimension":
        return Dimension(self.length + other.length, self.time + other.time)

    def __truediv__(self, other: "Dimension") -> "Dimension":
        return Dimension(self.length - other.length, self.time - other.time)

    def __pow__(self, e: Number) -> "Dimension":
        e = Fraction(e)
        return Dimension(self.length * e, self.time * e)

    def add(self, other: "Dimension") -> "Dimension":
        """Dimension of a sum; only like quantities may be added."""
        if self != other:
            raise ValueError(f"cannot add {self} and {other}")
        return self

    def __str__(self):
        parts = [f"{s}^{e}" for s, e in (("L", self.length), ("T", self.time)) if e]
        return " ".join(parts) or "1"


DIMENSIONLESS = Dimension()
LENGTH = Dimension(1, 0)
TIME = Dimension(0, 1)
VELOCITY = Dimension(1, -1)
VISCOSITY = Dimension(2, -1)
PRESSURE = Dimension(2, -2)  # per unit density
WAVENUMBER = Dimension(-1, 0)


# -- expression tree ---------------------------------------------------------

class Expr:
    def dimension(self) -> Dimension:
        raise NotImplementedError

    def __mul__(self, other: "Expr") -> "Expr":
        return Product(self, other)

    def __pow__(self, e: Number) -> "Expr":
        return Power(self, Fraction(e))


@dataclass(frozen=True)
class Quantity(Expr):
    name: str
    dim: Dimension

    def dimension(self):
        return self.dim


@dataclass(frozen=True)
class Product(Expr):
    left: Expr
    right: Expr

    def dimension(self):
        return self.left.dimension() * self.right.dimension()


@dataclass(frozen=True)
class Sum(Expr):
    left: Expr
    right: Expr

    def dimension(self):
        return self.left.dimension().add(self.right.dimension())


@dataclass(frozen=True)
class Power(Expr):
    base: Expr
    exponent: Fraction

    def dimension(self):
        return self.base.dimension() ** self.exponent


@dataclass(frozen=True)
class Derivative(Expr):
    """Spatial derivative of the given order: each order contributes L^-1."""

    arg: Expr
    order: int = 1

    def dimension(self):
        return self.arg.dimension() * LENGTH ** (-self.order)


@dataclass(frozen=True)
class LpNorm(Expr):
    """L^p norm over d-dimensional physical space (L^{d/p}) or frequency space (L^{-d/p})."""

    arg: Expr
    p: Fraction
    d: int = 3
    frequency: bool = False

    def dimension(self):
        p = Fraction(self.p)
        if p == 0:
            raise ValueError("p must be positive")
        sign = -1 if self.frequency else 1
        return self.arg.dimension() * LENGTH ** (sign * Fraction(self.d) / p)


@dataclass(frozen=True)
class SupNorm(Expr):
    arg: Expr

    def dimension(self):
        return self.arg.dimension()


@dataclass(frozen=True)
class Fourier(Expr):
    """Fourier transform over d-dimensional space: contributes L^d."""

    arg: Expr
    d: int = 3

    def dimension(self):
        return self.arg.dimension() * LENGTH ** self.d


def units_check(check_id: str, anchor: str, lhs: Expr | Dimension,
                rhs: Expr | Dimension) -> CheckReport:
    """Exact comparison of dimensions; any mismatch fails."""
    a = lhs if isinstance(lhs, Dimension) else lhs.dimension()
    b = rhs if isinstance(rhs, Dimension) else rhs.dimension()
    same = a == b
    return CheckReport(check_id, anchor, None, None, 0.0 if same else 1.0, 0.0, same,
                       extra={"lhs_units": str(a), "rhs_units": str(b)})


# -- stationary-flow fixtures ---------------------------------------------------

nu = Quantity("nu", VISCOSITY)
v = Quantity("v", VELOCITY)
rho = Quantity("rho", WAVENUMBER)
p = Quantity("p", PRESSURE)
curl_v = Derivative(v)
curl2_v = Derivative(v, 2)
enstrophy_root = LpNorm(curl_v, Fraction(2))
v_hat = Fourier(v)


def fixtures() -> list[tuple[str, str, Expr | Dimension, Expr | Dimension]]:
    """(check_id, anchor, lhs, rhs) for the dimensional statements of the stationary system."""
    half = Fraction(1, 2)
    return [
        ("units-viscous-term", "[nu Delta v] = L T^-2", nu * Derivative(v, 2), Dimension(1, -2)),
        ("units-convective-term", "[d_j(v_j v)] = L T^-2", Derivative(v * v), Dimension(1, -2)),
        ("units-viscous-vs-convective", "[nu Delta v] = [d_j(v_j v)]", nu * Derivative(v, 2),
         Derivative(v * v)),
        ("units-pressure-gradient", "[grad p] = [d_j(v_j v)]", Derivative(p), Derivative(v * v)),
        ("units-curl-l2", "[||Cv||_L2] = L^3/2 T^-1", enstrophy_root, Dimension(Fraction(3, 2), -1)),
        ("units-curl2-l2", "[||C^2 v||_L2] = L^1/2 T^-1", LpNorm(curl2_v, Fraction(2)),
         Dimension(half, -1)),
        ("units-curl-cubed", "[nu^-2 ||Cv||^3] = L^1/2 T^-1", nu ** -2 * enstrophy_root ** 3,
         Dimension(half, -1)),
        ("units-curl2-bound", "[||C^2 v||_L2] = [nu^-2 ||Cv||_L2^3]",
         LpNorm(curl2_v, Fraction(2)), nu ** -2 * enstrophy_root ** 3),
        ("units-fourier-velocity", "[v^(xi)] = L^4 T^-1", v_hat, Dimension(4, -1)),
        ("units-wiener-bound", "[||v^||_L1] = [nu^-1 ||Cv||^2] = [||v||_Linf]",
         LpNorm(v_hat, Fraction(1), frequency=True), nu ** -1 * enstrophy_root ** 2),
        ("units-sup-vs-wiener", "[||v||_Linf] = [||v^||_L1]", SupNorm(v),
         LpNorm(v_hat, Fraction(1), frequency=True)),
        ("units-tail-bound", "[int_{|xi|>rho} |W|^2] = [nu^-4 rho^-4 ||Cv||^6] = L^5 T^-2",
         LpNorm(v_hat, Fraction(2), frequency=True) ** 2,
         nu ** -4 * rho ** -4 * enstrophy_root ** 6),
        ("units-tail-value", "[nu^-4 rho^-4 ||Cv||^6] = L^5 T^-2",
         nu ** -4 * rho ** -4 * enstrophy_root ** 6, Dimension(5, -2)),
        ("units-bernoulli", "[p] = [|v|^2] = L^2 T^-2", Sum(p, v ** 2), Dimension(2, -2)),
    ]


def units_suite() -> list[CheckReport]:
    return [units_check(cid, anchor, lhs, rhs) for cid, anchor, lhs, rhs in fixtures()]

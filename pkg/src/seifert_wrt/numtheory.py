"""Exact integer and rational primitives.

Bezout complements, Dedekind sums computed by reciprocity, the Rademacher
Phi function on SL(2,Z) and a small rational-modulo-one value type.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) > 0 and a*x + b*y = g."""
    if a == 0 and b == 0:
        raise ValueError("ext_gcd(0, 0) is undefined")
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def rho_sigma(alpha: int, beta: int) -> tuple[int, int]:
    """Integers (rho, sigma) with alpha*sigma - beta*rho = 1, rho in [0, alpha)."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if gcd(alpha, beta) != 1:
        raise ValueError(f"({alpha}, {beta}) is not a coprime pair")
    if alpha == 1:
        # sigma = 1 + beta*rho with rho = 0
        return 0, 1
    # beta*rho = -1 mod alpha
    rho = (-pow(beta, -1, alpha)) % alpha
    sigma = (1 + beta * rho) // alpha
    return rho, sigma


def _dedekind_pos(d: int, c: int) -> Fraction:
    # s(d, c) for c > 0, via periodicity, oddness and reciprocity
    sign = 1
    acc = Fraction(0)
    while True:
        if c == 1:
            return acc
        d %= c
        if d == 0:
            # only reachable for c == 1 when gcd(c, d) = 1
            return acc
        if 2 * d > c:
            d = c - d
            sign = -sign
        # s(d, c) = -s(c, d) - 1/4 + (d/c + c/d + 1/(cd)) / 12
        acc += sign * (Fraction(-1, 4) + Fraction(d * d + c * c + 1, 12 * c * d))
        sign = -sign
        c, d = d, c


def dedekind(d: int, c: int) -> tuple[Fraction, Fraction]:
    """Dedekind sum s(d, c) and Dedekind symbol S(d/c) = 12 sign(c) s(d, c)."""
    if c == 0:
        raise ValueError("Dedekind sum needs c != 0")
    if gcd(c, d) != 1:
        raise ValueError(f"({d}, {c}) is not a coprime pair")
    s = _dedekind_pos(d, abs(c))
    return s, 12 * (1 if c > 0 else -1) * s


def dedekind_symbol(d: int, c: int) -> Fraction:
    return dedekind(d, c)[1]


@dataclass(frozen=True)
class SL2Z:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")

    def __neg__(self) -> "SL2Z":
        return SL2Z(-self.a, -self.b, -self.c, -self.d)

    def __matmul__(self, other: "SL2Z") -> "SL2Z":
        return SL2Z(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


def rademacher_phi(m: SL2Z) -> Fraction:
    """Rademacher Phi: (a+d)/c - S(d/c) if c != 0, else b/d."""
    if m.c == 0:
        return Fraction(m.b, m.d)
    return Fraction(m.a + m.d, m.c) - dedekind_symbol(m.d, m.c)


@dataclass(frozen=True, order=True)
class RationalModZ:
    """Exact rational number reduced into [0, 1)."""

    value: Fraction

    def __init__(self, value) -> None:
        v = Fraction(value)
        object.__setattr__(self, "value", v - (v.numerator // v.denominator))

    def __add__(self, other) -> "RationalModZ":
        other = other.value if isinstance(other, RationalModZ) else Fraction(other)
        return RationalModZ(self.value + other)

    __radd__ = __add__

    def __neg__(self) -> "RationalModZ":
        return RationalModZ(-self.value)

    def __sub__(self, other) -> "RationalModZ":
        return self + (-(other if isinstance(other, RationalModZ) else RationalModZ(other)))

    def __mul__(self, k: int) -> "RationalModZ":
        if not isinstance(k, int):
            return NotImplemented
        return RationalModZ(self.value * k)

    __rmul__ = __mul__

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return f"{self.value.numerator}/{self.value.denominator}"

    def __repr__(self) -> str:
        return f"RationalModZ({self})"

    @classmethod
    def parse(cls, text: str) -> "RationalModZ":
        return cls(Fraction(text))


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out

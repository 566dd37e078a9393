"""Index sets of flat-connection families, their q-values and CS values.

Labels come in two kinds.  ``I1`` labels (m, n) are interior stationary
points with 0 < z_st < 1; ``I2`` labels (l, n') carry half-integer n' in
the box 0 <= n'_j <= alpha_j / 2 and are tagged ``a`` when some sign vector
mu' makes sum(mu'_j n'_j / alpha_j) an integer, ``b`` otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .numtheory import RationalModZ
from .seifert import SeifertData


@dataclass(frozen=True)
class FlatFamilyLabel:
    kind: str  # "I1" or "I2"
    index: int  # m for I1, l for I2
    n: tuple[Fraction, ...]
    tag: str | None
    q: RationalModZ

    @property
    def sort_key(self):
        return (self.kind, self.index, self.n)

    def n_text(self) -> str:
        return "(" + ",".join(str(v) for v in self.n) + ")"

    def __str__(self) -> str:
        return f"{self.kind}{self.tag or ''}({self.index},{self.n_text()})"


def z_st(x: SeifertData, m: int, n) -> Fraction:
    """Stationary point -(2/E)(m - sum n_j/alpha_j)."""
    E = x.euler
    if E == 0:
        raise ValueError("stationary points need E != 0")
    s = sum((Fraction(v, a) for v, a in zip(n, x.alphas)), Fraction(0))
    return -2 / E * (m - s)


def q_i1(x: SeifertData, m: int, n) -> RationalModZ:
    z = z_st(x, m, n)
    val = sum((Fraction(rho * v * v, a) for v, (a, _, rho, _) in zip(n, x.pairs)), Fraction(0))
    return RationalModZ(val - x.euler * z * z / 4)


def q_i2(x: SeifertData, l: int, n) -> RationalModZ:
    val = -Fraction(x.beta0 * l * l, 4)
    for v, (a, b, rho, sigma) in zip(n, x.pairs):
        val += rho * Fraction(v) ** 2 / a - Fraction(sigma * b * l * l, 4)
    return RationalModZ(val)


def q_value(x: SeifertData, label: FlatFamilyLabel) -> RationalModZ:
    if label.kind == "I1":
        return q_i1(x, label.index, label.n)
    return q_i2(x, label.index, label.n)


def is_type_a(x: SeifertData, n) -> bool:
    return any(sum(Fraction(mu) * v / a for mu, v, a in zip(mus, n, x.alphas)).denominator == 1
               for mus in itertools.product((1, -1), repeat=len(n)))


def _half_range(alpha: int, half: bool) -> list[Fraction]:
    if half:
        return [Fraction(2 * k + 1, 2) for k in range(alpha) if 2 * k + 1 <= alpha]
    return [Fraction(k) for k in range(alpha // 2 + 1)]


def i2_labels(x: SeifertData) -> list[FlatFamilyLabel]:
    out = []
    for l in (0, 1):
        ranges = [_half_range(a, (l * b) % 2 == 1) for a, b in zip(x.alphas, x.betas)]
        for n in itertools.product(*ranges):
            tag = "a" if is_type_a(x, n) else "b"
            out.append(FlatFamilyLabel("I2", l, tuple(n), tag, q_i2(x, l, n)))
    return sorted(out, key=lambda lab: lab.sort_key)


def i1_labels(x: SeifertData) -> list[FlatFamilyLabel]:
    E = x.euler
    if E == 0:
        return []
    out = []
    for n in itertools.product(*(range(a) for a in x.alphas)):
        s = sum((Fraction(v, a) for v, a in zip(n, x.alphas)), Fraction(0))
        lo, hi = (s - E / 2, s) if E > 0 else (s, s - E / 2)
        for m in range(math.floor(lo) + 1, math.ceil(hi)):
            z = z_st(x, m, n)
            if 0 < z < 1:
                out.append(FlatFamilyLabel("I1", m, tuple(Fraction(v) for v in n), None, q_i1(x, m, n)))
    return sorted(out, key=lambda lab: lab.sort_key)


@dataclass(frozen=True)
class IndexSets:
    I1: list[FlatFamilyLabel]
    I2a: list[FlatFamilyLabel]
    I2b: list[FlatFamilyLabel]

    def all(self) -> list[FlatFamilyLabel]:
        return self.I1 + self.I2a + self.I2b


def index_sets(x: SeifertData) -> IndexSets:
    i2 = i2_labels(x)
    return IndexSets(
        I1=i1_labels(x),
        I2a=[lab for lab in i2 if lab.tag == "a"],
        I2b=[lab for lab in i2 if lab.tag == "b"],
    )


# ---- Chern-Simons values -------------------------------------------------------

@dataclass(frozen=True)
class OmegaNu:
    l: int
    n: tuple


@dataclass(frozen=True)
class RhoSigmaRep:
    m: int
    n: tuple


def _cs_c(x: SeifertData) -> int:
    return 0 if x.base_class == "o" else x.genus


def auckly_cs(x: SeifertData, rep) -> RationalModZ:
    """Chern-Simons value of the representation family, modulo 1."""
    E = x.euler
    c = _cs_c(x)
    if isinstance(rep, OmegaNu):
        eps = Fraction(rep.l, 2)
        val = -eps * c - eps * eps * E
        for v, (a, b, rho, _) in zip(rep.n, x.pairs):
            nj = Fraction(v) + eps * b
            val -= (rho * nj * nj + 2 * nj * eps) / a
        return RationalModZ(val)
    if isinstance(rep, RhoSigmaRep):
        if E == 0:
            raise ValueError("rho/sigma representations need E != 0")
        M = rep.m + Fraction(c, 2)
        s = sum((Fraction(v, a) for v, a in zip(rep.n, x.alphas)), Fraction(0))
        val = M * (M + s) / E
        for v, (a, _, rho, _) in zip(rep.n, x.pairs):
            val -= (rho * Fraction(v) ** 2 - Fraction(v) / E * (M + s)) / a
        return RationalModZ(val)
    raise TypeError(f"unknown representation {rep!r}")


def cs_of_label(x: SeifertData, label: FlatFamilyLabel) -> RationalModZ:
    """CS value of the representation family attached to ``label``."""
    if label.kind == "I2":
        return auckly_cs(x, OmegaNu(label.index, label.n))
    return auckly_cs(x, RhoSigmaRep(-label.index - Fraction(_cs_c(x), 2), label.n))


# ---- genus-0 realizability ----------------------------------------------------------

@dataclass(frozen=True)
class Interval01Pi:
    """Reachable rotation angles, in units of pi."""

    lo: Fraction
    hi: Fraction

    def contains(self, t) -> bool:
        return self.lo <= t <= self.hi


def _cap(phi, theta):
    # largest product angle for classes phi and theta
    return min(phi + theta, 2 - phi - theta)


def fold_angles(angles) -> Interval01Pi:
    """Angles (units of pi) reachable by products of elements of the given classes."""
    angles = [Fraction(t) for t in angles]
    lo = hi = angles[0]
    for t in angles[1:]:
        new_lo = Fraction(0) if lo <= t <= hi else min(abs(lo - t), abs(hi - t))
        if lo <= 1 - t <= hi:
            new_hi = Fraction(1)
        else:
            new_hi = max(_cap(lo, t), _cap(hi, t))
        lo, hi = new_lo, new_hi
    return Interval01Pi(lo, hi)


def rep_exists(x: SeifertData, label: FlatFamilyLabel) -> bool:
    """Whether the I2 label is realized by an SU(2) representation."""
    if label.kind != "I2":
        raise ValueError("realizability is defined for I2 labels")
    if x.base_class == "n" or x.genus >= 1:
        return True
    angles = [2 * Fraction(v) / a for v, a in zip(label.n, x.alphas)]
    target = (x.beta0 * label.index) % 2
    return fold_angles(angles).contains(target)


def modulin3(x: SeifertData, label: FlatFamilyLabel) -> bool:
    """Three-class criterion |x1 - x2| <= x3 <= min(x1 + x2, 1 - x1 - x2), x_j = n'_j/alpha_j."""
    if len(label.n) != 3:
        raise ValueError("three pairs required")
    x1, x2, x3 = (Fraction(v) / a for v, a in zip(label.n, x.alphas))
    return abs(x1 - x2) <= x3 <= min(x1 + x2, 1 - x1 - x2)


def cs_spectrum(x: SeifertData) -> list[dict]:
    """One record per label: label text, q, cs = -q and realizability."""
    sets = index_sets(x)
    out = []
    for lab in sets.all():
        out.append({
            "label": str(lab),
            "q": str(lab.q),
            "cs": str(-lab.q),
            "rep_exists": rep_exists(x, lab) if lab.kind == "I2" else True,
        })
    return out

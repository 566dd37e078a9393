"""Truncated Laurent series in z with Laurent-polynomial-in-r coefficients.

A series stores a dense block ``data[i, j]`` holding the coefficient of
``z**(val + i) * r**(rmin + j)``.  Everything the residue formulas need is
built from a handful of primitives (affine sines and cosines, Gaussians,
``cot(pi r z)``, powers of ``1/sin(pi z)``) and ring operations.

Coefficients are complex doubles by default.  Passing ``dps`` switches a
series to mpmath complex numbers at that many decimal digits.
"""

from __future__ import annotations

import logging
from contextlib import nullcontext
from fractions import Fraction
from functools import lru_cache
from math import factorial, pi

import mpmath
import numpy as np
from scipy.signal import convolve2d

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-13


class SeriesError(ValueError):
    pass


def _ctx(dps):
    return mpmath.workdps(dps) if dps else nullcontext()


def _num(x, dps):
    if dps:
        return mpmath.mpc(x)
    return complex(x)


def _pi(dps):
    return mpmath.pi if dps else pi


class RCoeff:
    """Laurent polynomial in r with complex coefficients, as {exponent: value}."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = {0: terms}
        self.terms = {int(e): c for e, c in terms.items() if c != 0}

    @classmethod
    def monomial(cls, coef, exp: int = 0) -> "RCoeff":
        return cls({exp: coef})

    def __getitem__(self, exp: int):
        return self.terms.get(exp, 0)

    def __add__(self, other) -> "RCoeff":
        other = other if isinstance(other, RCoeff) else RCoeff(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return RCoeff(out)

    __radd__ = __add__

    def __neg__(self) -> "RCoeff":
        return RCoeff({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "RCoeff":
        return self + (-(other if isinstance(other, RCoeff) else RCoeff(other)))

    def __mul__(self, other) -> "RCoeff":
        if not isinstance(other, RCoeff):
            return RCoeff({e: c * other for e, c in self.terms.items()})
        out: dict[int, complex] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return RCoeff(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RCoeff":
        if k < 0:
            if not self.is_monomial():
                raise SeriesError("only monomials in r can be inverted")
            (e, c), = self.terms.items()
            return RCoeff({e * k: c ** k})
        out = RCoeff({0: 1})
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def degree(self) -> int | None:
        return max(self.terms) if self.terms else None

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    def __call__(self, r) -> complex:
        return sum((c * r ** e for e, c in self.terms.items()), 0)

    def evaluate(self, r) -> complex:
        return self(r)

    def chop(self, tol: float = 0.0) -> "RCoeff":
        return RCoeff({e: c for e, c in self.terms.items() if abs(complex(c)) > tol})

    def __repr__(self) -> str:
        inner = " + ".join(f"({complex(c):.6g})*r^{e}" for e, c in sorted(self.terms.items()))
        return f"RCoeff({inner or '0'})"


def _as_rcoeff(x) -> RCoeff:
    return x if isinstance(x, RCoeff) else RCoeff({0: x})


class LaurentSeries:
    __slots__ = ("val", "rmin", "data", "dps")

    def __init__(self, val: int, data, rmin: int = 0, dps: int | None = None):
        dtype = object if dps else complex
        data = np.asarray(data, dtype=dtype)
        if data.ndim == 1:
            data = data[:, None]
        if data.shape[0] == 0:
            raise SeriesError("a series needs at least one retained coefficient")
        self.val = int(val)
        self.rmin = int(rmin)
        self.data = data
        self.dps = dps

    # ---- construction ----------------------------------------------------
    @classmethod
    def from_rcoeffs(cls, val: int, coeffs, dps=None) -> "LaurentSeries":
        coeffs = [_as_rcoeff(c) for c in coeffs]
        exps = [e for c in coeffs for e in c.terms] or [0]
        lo, hi = min(exps), max(exps)
        dtype = object if dps else complex
        data = np.zeros((len(coeffs), hi - lo + 1), dtype=dtype)
        if dps:
            data[:] = mpmath.mpc(0)
        for i, c in enumerate(coeffs):
            for e, v in c.terms.items():
                data[i, e - lo] = _num(v, dps)
        return cls(val, data, lo, dps)

    @classmethod
    def constant(cls, c, order: int, dps=None) -> "LaurentSeries":
        return cls.from_rcoeffs(0, [c] + [0] * order, dps)

    @property
    def order(self) -> int:
        return self.val + self.data.shape[0] - 1

    def coeff(self, k: int) -> RCoeff:
        if k < self.val:
            return RCoeff()
        if k > self.order:
            raise SeriesError(f"z^{k} lies beyond the truncation order {self.order}")
        row = self.data[k - self.val]
        return RCoeff({self.rmin + j: v for j, v in enumerate(row) if v != 0})

    def coeffs(self) -> list[RCoeff]:
        return [self.coeff(k) for k in range(self.val, self.order + 1)]

    def _zero_block(self, nz, nr):
        out = np.zeros((nz, nr), dtype=self.data.dtype)
        if self.dps:
            out[:] = mpmath.mpc(0)
        return out

    def _promote(self, other: "LaurentSeries"):
        dps = max(self.dps or 0, other.dps or 0) or None
        a, b = self, other
        if dps and not a.dps:
            a = LaurentSeries(a.val, np.vectorize(mpmath.mpc, otypes=[object])(a.data), a.rmin, dps)
        if dps and not b.dps:
            b = LaurentSeries(b.val, np.vectorize(mpmath.mpc, otypes=[object])(b.data), b.rmin, dps)
        return a, b, dps

    # ---- ring operations ---------------------------------------------------
    def truncate(self, order: int) -> "LaurentSeries":
        if order > self.order:
            raise SeriesError(f"cannot extend order {self.order} to {order}")
        if order < self.val:
            raise SeriesError("truncation below the valuation")
        return LaurentSeries(self.val, self.data[: order - self.val + 1], self.rmin, self.dps)

    def __add__(self, other) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries.from_rcoeffs(0, [_as_rcoeff(other)] + [0] * max(self.order, 0), self.dps)
        a, b, dps = self._promote(other)
        val = min(a.val, b.val)
        order = min(a.order, b.order)
        if order < val:
            raise SeriesError("sum has no retained coefficients")
        rmin = min(a.rmin, b.rmin)
        rmax = max(a.rmin + a.data.shape[1], b.rmin + b.data.shape[1])
        out = a._zero_block(order - val + 1, rmax - rmin)
        for s in (a, b):
            lo = s.val - val
            n = min(s.data.shape[0], order - s.val + 1)
            if n > 0:
                out[lo:lo + n, s.rmin - rmin:s.rmin - rmin + s.data.shape[1]] += s.data[:n]
        return LaurentSeries(val, out, rmin, dps)

    __radd__ = __add__

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.val, -self.data, self.rmin, self.dps)

    def __sub__(self, other) -> "LaurentSeries":
        return self + (-other)

    def __rsub__(self, other) -> "LaurentSeries":
        return (-self) + other

    def scale(self, c) -> "LaurentSeries":
        """Multiply by a scalar or by an RCoeff."""
        if isinstance(c, RCoeff):
            return self * LaurentSeries.from_rcoeffs(0, [c] + [0] * (self.order - self.val), self.dps)
        with _ctx(self.dps):
            return LaurentSeries(self.val, self.data * _num(c, self.dps), self.rmin, self.dps)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by z**k."""
        return LaurentSeries(self.val + k, self.data, self.rmin, self.dps)

    def __mul__(self, other) -> "LaurentSeries":
        if not isinstance(other, LaurentSeries):
            return self.scale(other)
        a, b, dps = self._promote(other)
        val = a.val + b.val
        order = min(a.order + b.val, b.order + a.val)
        nz = order - val + 1
        if dps:
            with _ctx(dps):
                out = a._zero_block(nz, a.data.shape[1] + b.data.shape[1] - 1)
                for i in range(min(nz, a.data.shape[0])):
                    for j in range(min(nz - i, b.data.shape[0])):
                        out[i + j] += np.convolve(a.data[i], b.data[j])
        else:
            out = convolve2d(a.data[:nz], b.data[:nz])[:nz]
        return LaurentSeries(val, out, a.rmin + b.rmin, dps)

    __rmul__ = __mul__

    def _pivot(self) -> "LaurentSeries":
        # drop numerically vanishing leading coefficients
        s = self
        scale = max(1.0, float(np.max(np.abs(np.asarray(self.data, dtype=complex)))))
        k = 0
        while k < s.data.shape[0]:
            row = np.asarray(s.data[k], dtype=complex)
            if np.max(np.abs(row)) > PIVOT_TOL * scale:
                break
            k += 1
        if k == s.data.shape[0]:
            raise SeriesError("cannot invert a series with no nonzero retained coefficient")
        if k:
            log.warning("leading %d coefficient(s) below %.0e treated as zero", k, PIVOT_TOL)
        return LaurentSeries(s.val + k, s.data[k:], s.rmin, s.dps)

    def invert(self) -> "LaurentSeries":
        s = self._pivot()
        lead = np.asarray(s.data[0], dtype=complex)
        big = np.flatnonzero(np.abs(lead) > PIVOT_TOL * max(1.0, np.max(np.abs(lead))))
        if len(big) != 1:
            raise SeriesError("leading coefficient is not a monomial in r")
        e0 = s.rmin + int(big[0])
        with _ctx(s.dps):
            a0_inv = 1 / s.data[0, big[0]]
            # normalize to u = s / (a0 r^e0 z^val) = 1 + higher terms
            coeffs = [c * a0_inv for c in s.coeffs()]
            coeffs = [RCoeff({e - e0: v for e, v in c.terms.items()}) for c in coeffs]
            coeffs[0] = RCoeff({0: _num(1, s.dps)})
            inv = [RCoeff({0: _num(1, s.dps)})]
            for m in range(1, len(coeffs)):
                acc = RCoeff()
                for j in range(1, m + 1):
                    if coeffs[j].terms:
                        acc = acc + coeffs[j] * inv[m - j]
                inv.append(-acc)
            inv = [c * a0_inv for c in inv]
            inv = [RCoeff({e - e0: v for e, v in c.terms.items()}) for c in inv]
        return LaurentSeries.from_rcoeffs(-s.val, inv, s.dps)

    def __pow__(self, k: int) -> "LaurentSeries":
        if k < 0:
            return self.invert() ** (-k)
        if k == 0:
            return LaurentSeries.from_rcoeffs(0, [1] + [0] * max(self.order - self.val, 0), self.dps)
        out = None
        base = self
        while k:
            if k & 1:
                out = base if out is None else out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # ---- extraction --------------------------------------------------------
    def residue(self) -> RCoeff:
        if not self.val <= -1 <= self.order:
            raise SeriesError(f"z^-1 outside retained range [{self.val}, {self.order}]")
        return self.coeff(-1)

    def is_r_free(self) -> bool:
        cols = [j for j in range(self.data.shape[1]) if self.rmin + j != 0]
        if not cols:
            return True
        return not np.any(np.asarray(self.data[:, cols], dtype=complex))

    def derivative_at(self, k: int):
        """k-th derivative at the expansion point: k! times the z^k coefficient."""
        if self.val < 0 and np.any(np.asarray(self.data[: -self.val], dtype=complex)):
            raise SeriesError("series has a pole at the expansion point")
        if k > self.order:
            raise SeriesError(f"order {self.order} is too low for derivative {k}")
        if not self.is_r_free():
            raise SeriesError("derivative_at needs r-free coefficients")
        return self.coeff(k)[0] * factorial(k)

    def evaluate_r(self, r) -> np.ndarray:
        """Substitute a concrete r, returning the z-coefficients."""
        powers = np.array([float(r) ** (self.rmin + j) for j in range(self.data.shape[1])])
        return np.asarray(self.data, dtype=complex) @ powers

    def __repr__(self) -> str:
        return f"LaurentSeries(val={self.val}, order={self.order}, r-exponents=[{self.rmin}..{self.rmin + self.data.shape[1] - 1}])"


# ---- primitives ------------------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli numbers with B_1 = -1/2."""
    if n == 0:
        return Fraction(1)
    return -sum((Fraction(factorial(n + 1), factorial(k) * factorial(n + 1 - k)) * bernoulli(k)
                 for k in range(n)), Fraction(0)) / (n + 1)


def _split_b(b):
    # slope given either as a scalar or as a monomial (coef, r-exponent)
    if isinstance(b, RCoeff):
        if len(b.terms) > 1:
            raise SeriesError("affine slope must be a monomial in r")
        if not b.terms:
            return 0, 0
        (e, c), = b.terms.items()
        return c, e
    if isinstance(b, tuple):
        return b
    return b, 0


def sin_affine(a, b, order: int, dps=None) -> LaurentSeries:
    """sin(a + b z) about z = 0; ``b`` may be a monomial in r."""
    return _trig_affine(a, b, order, dps, 0)


def cos_affine(a, b, order: int, dps=None) -> LaurentSeries:
    """cos(a + b z) about z = 0."""
    return _trig_affine(a, b, order, dps, 1)


def _trig_affine(a, b, order, dps, phase):
    bc, be = _split_b(b)
    with _ctx(dps):
        if dps:
            a = mpmath.mpc(a)
            bc = mpmath.mpc(bc)
            base = [mpmath.sin(a), mpmath.cos(a), -mpmath.sin(a), -mpmath.cos(a)]
        else:
            a = complex(a)
            base = [np.sin(a), np.cos(a), -np.sin(a), -np.cos(a)]
        coeffs = []
        for k in range(order + 1):
            c = bc ** k / factorial(k) * base[(k + phase) % 4]
            coeffs.append(RCoeff({be * k: c}))
    return LaurentSeries.from_rcoeffs(0, coeffs, dps)


def exp_linear(c, order: int, dps=None) -> LaurentSeries:
    """exp(c z) with c an RCoeff (or scalar)."""
    c = _as_rcoeff(c)
    with _ctx(dps):
        coeffs, p = [], RCoeff({0: _num(1, dps)})
        for k in range(order + 1):
            coeffs.append(p * (_num(1, dps) / factorial(k)))
            p = p * c
    return LaurentSeries.from_rcoeffs(0, coeffs, dps)


def exp_quadratic(c, order: int, dps=None) -> LaurentSeries:
    """exp(c z^2) with c an RCoeff (or scalar)."""
    c = _as_rcoeff(c)
    with _ctx(dps):
        coeffs = [RCoeff() for _ in range(order + 1)]
        p = RCoeff({0: _num(1, dps)})
        for j in range(order // 2 + 1):
            coeffs[2 * j] = p * (_num(1, dps) / factorial(j))
            p = p * c
    return LaurentSeries.from_rcoeffs(0, coeffs, dps)


def cot_rz(order: int, dps=None) -> LaurentSeries:
    """cot(pi r z) about 0, valuation -1."""
    coeffs = [RCoeff() for _ in range(order + 2)]
    p = _pi(dps)
    with _ctx(dps):
        for k in range(order // 2 + 2):
            e = 2 * k - 1
            if e > order:
                break
            bk = bernoulli(2 * k)
            frac = (-1) ** k * 2 ** (2 * k) * bk / factorial(2 * k)
            val = (mpmath.mpf(frac.numerator) / frac.denominator if dps else float(frac)) * p ** e
            coeffs[e + 1] = RCoeff({e: _num(val, dps)})
    return LaurentSeries.from_rcoeffs(-1, coeffs[: order + 2], dps)


def _sinc_pi(order: int, dps=None) -> LaurentSeries:
    # sin(pi z) / (pi z)
    p = _pi(dps)
    with _ctx(dps):
        coeffs = [RCoeff() for _ in range(order + 1)]
        for j in range(order // 2 + 1):
            coeffs[2 * j] = RCoeff({0: _num((-1) ** j * p ** (2 * j) / factorial(2 * j + 1), dps)})
    return LaurentSeries.from_rcoeffs(0, coeffs, dps)


def pi_z_over_sin_pow(k: int, order: int, dps=None) -> LaurentSeries:
    """(pi z / sin(pi z))**k about 0, for any integer k."""
    return _sinc_pi(order, dps) ** (-k)


def inv_sin_pow(k: int, order: int, center=0, dps=None) -> LaurentSeries:
    """sin(pi z)**(-k) about ``center`` (Laurent when center = 0)."""
    if center == 0:
        # (pi z)^-k (pi z / sin pi z)^k; need order + k terms of the regular part
        reg = pi_z_over_sin_pow(k, max(order + k, 0), dps)
        with _ctx(dps):
            return reg.shift(-k).scale(_pi(dps) ** (-k))
    if float(center) == round(float(center)):
        raise SeriesError(f"sin(pi z) vanishes at the expansion point {center}")
    p = _pi(dps)
    with _ctx(dps):
        z0 = mpmath.mpf(center.numerator) / center.denominator if dps and isinstance(center, Fraction) else float(center)
        base = sin_affine(p * z0, p, order, dps)
    return base ** (-k)


def taylor_at_point(f: str, a, b, z0, order: int, dps=None) -> LaurentSeries:
    """f(a + b z) expanded in w = z - z0, f in {'sin', 'cos'}."""
    if f not in ("sin", "cos"):
        raise SeriesError(f"unsupported function {f!r}")
    bc, be = _split_b(b)
    if be:
        raise SeriesError("expansion about a nonzero point needs an r-free slope")
    with _ctx(dps):
        a0 = a + bc * z0
    return (sin_affine if f == "sin" else cos_affine)(a0, bc, order, dps)


_PRIMITIVES = {
    "sin_affine": sin_affine,
    "cos_affine": cos_affine,
    "exp_quadratic": exp_quadratic,
    "exp_linear": exp_linear,
    "cot_rz": cot_rz,
    "inv_sin_pow": inv_sin_pow,
    "pi_z_over_sin_pow": pi_z_over_sin_pow,
    "taylor_at_point": taylor_at_point,
}


def primitive(kind: str, params: dict, order: int) -> LaurentSeries:
    """Dispatch to a named primitive; ``params`` are its keyword arguments."""
    try:
        fn = _PRIMITIVES[kind]
    except KeyError:
        raise SeriesError(f"unknown primitive {kind!r}") from None
    return fn(order=order, **params)


def combine(op: str, *operands) -> LaurentSeries:
    if op == "add":
        out = operands[0]
        for s in operands[1:]:
            out = out + s
        return out
    if op == "mul":
        out = operands[0]
        for s in operands[1:]:
            out = out * s
        return out
    if op == "pow_int":
        s, k = operands
        return s ** k
    if op == "invert":
        return operands[0].invert()
    if op == "scalar_mul":
        s, c = operands
        return s.scale(c)
    raise SeriesError(f"unknown operation {op!r}")


def residue(s: LaurentSeries) -> RCoeff:
    return s.residue()


def derivative_at(f: LaurentSeries, k: int):
    return f.derivative_at(k)

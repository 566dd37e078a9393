import math
import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seifert_wrt import lseries as ls
from seifert_wrt.lseries import LaurentSeries, RCoeff, SeriesError

PI = math.pi


def close(a, b, tol=1e-12):
    return abs(complex(a) - complex(b)) <= tol * max(1.0, abs(complex(b)))


def test_cot_rz_leading_terms():
    s = ls.cot_rz(1)
    assert s.val == -1
    assert close(s.coeff(-1).terms[-1], 1 / PI)
    assert close(s.coeff(1).terms[1], -PI / 3)
    assert ls.residue(s).terms.keys() == {-1}


def test_pi_z_over_sin():
    s = ls.pi_z_over_sin_pow(1, 4)
    assert close(s.coeff(0)(1), 1)
    assert close(s.coeff(2)(1), PI ** 2 / 6)
    assert close(s.coeff(4)(1), 7 * PI ** 4 / 360)
    assert close(ls.derivative_at(s, 2), PI ** 2 / 3)


def test_sin_affine_taylor():
    a, b = 0.7, -0.4
    s = ls.sin_affine(a, b, 3)
    assert close(s.coeff(0)(1), math.sin(a))
    assert close(s.coeff(1)(1), b * math.cos(a))
    assert close(s.coeff(2)(1), -b * b * math.sin(a) / 2)


def test_sin_affine_with_r_slope():
    s = ls.sin_affine(0, (2.0, 1), 3)
    assert s.coeff(1).terms == {1: pytest.approx(2.0)}
    assert close(s.coeff(3).terms[3], -8 / 6)


def test_residues():
    assert close(ls.residue(ls.inv_sin_pow(1, 2))(1), 1 / PI)
    assert close(ls.residue(ls.cot_rz(3))(2.0), 1 / (PI * 2.0))


def test_inverse_identity():
    s = ls.pi_z_over_sin_pow(-1, 10)  # sin(pi z)/(pi z)
    one = ls.combine("invert", s) * s
    assert close(one.coeff(0)(1), 1)
    for k in range(1, 11):
        assert abs(one.coeff(k)(1)) < 1e-12


def test_pythagoras():
    s = ls.sin_affine(0.3, 1.1, 8)
    c = ls.cos_affine(0.3, 1.1, 8)
    one = s * s + c * c
    assert close(one.coeff(0)(1), 1)
    for k in range(1, 9):
        assert abs(one.coeff(k)(1)) < 1e-12


def test_valuation_of_product():
    s = ls.cot_rz(4) * ls.exp_quadratic(RCoeff({1: 1j * PI * 0.5}), 4)
    assert s.val == -1


def test_residue_of_derivative_vanishes():
    # d/dz of a Laurent series has no z^-1 term
    s = ls.inv_sin_pow(3, 6)
    coeffs = s.coeffs()
    deriv = [c * (s.val + i) for i, c in enumerate(coeffs)]
    d = LaurentSeries.from_rcoeffs(s.val - 1, deriv)
    assert ls.residue(d).max_abs() < 1e-14


def test_derivative_at_examples():
    assert close(ls.derivative_at(ls.sin_affine(0, PI, 3), 1), PI)
    f = ls.inv_sin_pow(1, 6)
    for a in (2, 3, 7):
        f = f * ls.sin_affine(0, PI / a, 6)
    assert close(ls.derivative_at(f, 2), 2 * PI ** 2 / 42)


def test_errors():
    with pytest.raises(SeriesError):
        ls.inv_sin_pow(2, 4, center=1)
    with pytest.raises(SeriesError):
        ls.residue(ls.sin_affine(0, 1, 3))
    with pytest.raises(SeriesError):
        ls.derivative_at(ls.sin_affine(0, 1, 2), 5)
    with pytest.raises(SeriesError):
        ls.combine("invert", LaurentSeries.from_rcoeffs(0, [RCoeff({0: 1.0, 1: 1.0}), RCoeff({0: 1.0})]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_derivative_matches_finite_differences(seed):
    rng = random.Random(seed)
    terms = [(rng.uniform(-1, 1), rng.uniform(-2, 2)) for _ in range(rng.randint(1, 3))]
    k = rng.randint(1, 4)
    order = k + 2
    f = None
    for a, b in terms:
        s = ls.sin_affine(a, b, order)
        f = s if f is None else f * s
    with mpmath.workdps(40):
        def g(z):
            return mpmath.fprod(mpmath.sin(a + b * z) for a, b in terms)
        ref = mpmath.diff(g, 0, k, h=mpmath.mpf("1e-5"))
    got = ls.derivative_at(f, k)
    assert abs(got - complex(ref)) <= 1e-6 * max(abs(complex(ref)), 1e-8)


@given(st.integers(2, 10), st.integers(0, 9))
def test_truncation_consistency(n, m):
    m = min(m, n - 1)
    a = ls.sin_affine(0.2, 0.9, n) * ls.inv_sin_pow(2, n)
    b = ls.sin_affine(0.2, 0.9, m) * ls.inv_sin_pow(2, m)
    ta = a.truncate(b.order)
    for k in range(b.val, b.order + 1):
        ca, cb = ta.coeff(k), b.coeff(k)
        for e in set(ca.terms) | set(cb.terms):
            assert ca.terms.get(e, 0) == pytest.approx(cb.terms.get(e, 0), rel=1e-14, abs=1e-14)


def test_residue_linearity():
    f = ls.inv_sin_pow(2, 4) * ls.exp_linear(RCoeff({1: 1j}), 4)
    g = ls.cot_rz(4) * ls.sin_affine(0.4, 1.0, 4)
    a, b = 2 - 1j, 0.5
    lhs = ls.residue(f.scale(a) + g.scale(b))
    rhs = ls.residue(f) * a + ls.residue(g) * b
    assert set(lhs.terms) == set(rhs.terms)
    for e in lhs.terms:
        assert close(lhs.terms[e], rhs.terms[e])


def test_high_precision_mode_agrees():
    lo = ls.inv_sin_pow(3, 5) * ls.sin_affine(0.1, PI / 3, 5)
    hi = ls.inv_sin_pow(3, 5, dps=40) * ls.sin_affine(0.1, PI / 3, 5, dps=40)
    assert close(complex(ls.residue(hi)(1)), complex(ls.residue(lo)(1)), 1e-12)


def test_primitive_dispatch():
    s = ls.primitive("sin_affine", {"a": 0, "b": PI}, 3)
    assert close(ls.derivative_at(s, 1), PI)
    with pytest.raises(SeriesError):
        ls.primitive("tan", {}, 3)


def test_rcoeff_arithmetic():
    p = RCoeff({1: 2.0, -1: 1.0})
    q = RCoeff({0: 1.0})
    assert (p * q).terms == p.terms
    assert close((p + q)(2.0), 2 * 2 + 0.5 + 1)
    assert close((p ** 2)(2.0), (4 + 0.5) ** 2)
    assert RCoeff({3: 5.0}).is_monomial()

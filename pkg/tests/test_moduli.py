import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import M_MINUS_1, random_seifert
from oracles import su2_product_reachable
from seifert_wrt.moduli import (OmegaNu, RhoSigmaRep, auckly_cs, cs_of_label, cs_spectrum,
                                fold_angles, index_sets, is_type_a, modulin3, q_value, rep_exists, z_st)
from seifert_wrt.numtheory import RationalModZ
from seifert_wrt.seifert import (AddTrivialPair, SeifertData, ShiftBetas, apply_moves, parse,
                                 to_non_normalized)


def q_multiset(x):
    return Counter(lab.q for lab in index_sets(x).all())


def test_m_minus_1_labels():
    x = parse(M_MINUS_1)
    sets = index_sets(x)
    assert len(sets.all()) == 24
    assert [str(l.q) for l in sets.I2a] == ["0/1"]
    qs = {str(l.q) for l in sets.all()}
    assert {"121/168", "25/168"} <= qs
    realized = [str(l.q) for l in sets.I2b if rep_exists(x, l)]
    assert sorted(realized) == ["121/168", "25/168"]


def test_cs_spectrum_records():
    spec = cs_spectrum(parse(M_MINUS_1))
    assert len(spec) == 24
    for rec in spec:
        assert (RationalModZ.parse(rec["q"]) + RationalModZ.parse(rec["cs"])) == RationalModZ(0)


def test_stationary_points_are_interior():
    for text in ["o;0|-1;(2,1),(3,1),(5,1)", "o;0|-1;(3,2),(4,1),(5,3)", "o;1|-1;(2,1),(3,1)"]:
        x = parse(text)
        for lab in index_sets(x).I1:
            assert 0 < z_st(x, lab.index, lab.n) < 1
            assert lab.q == q_value(x, lab)


def test_zero_euler_has_no_interior_points():
    x = parse("o;0|-1;(2,1),(3,1),(6,1)")
    assert index_sets(x).I1 == []
    with pytest.raises(ValueError):
        z_st(x, 0, (0, 0, 0))


def test_type_a_tagging():
    x = parse("o;0|-1;(3,1),(3,1),(3,1)")
    assert is_type_a(x, (Fraction(1), Fraction(1), Fraction(1)))
    assert not is_type_a(parse(M_MINUS_1), (Fraction(1), Fraction(1), Fraction(1)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_q_invariant_under_complement_shift(seed):
    rng = random.Random(seed)
    x = random_seifert(rng, n=rng.randint(1, 3), alpha_max=6)
    shifted = tuple((rho + a * t, sigma + b * t)
                    for (a, b), (rho, sigma), t in zip(x.fibers, x.complements,
                                                       (rng.randint(-2, 2) for _ in x.fibers)))
    y = x.with_complements(shifted)
    assert q_multiset(x) == q_multiset(y)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_q_multiset_commutes_with_moves(seed):
    rng = random.Random(seed)
    x = to_non_normalized(random_seifert(rng, n=rng.randint(1, 3), alpha_max=6))
    ks = [rng.randint(-2, 2) for _ in range(len(x.fibers) - 1)]
    y = apply_moves(x, [ShiftBetas(tuple(ks + [-sum(ks)])), AddTrivialPair(rng.randint(0, len(x.fibers)))])
    assert q_multiset(x) == q_multiset(y)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_cs_plus_q_vanishes(seed):
    rng = random.Random(seed)
    while True:
        x = random_seifert(rng, n=rng.randint(0, 3), alpha_max=6)
        if x.ag % 2 == 0:
            break
    for lab in index_sets(x).all():
        assert cs_of_label(x, lab) + lab.q == RationalModZ(0)


def test_cs_offset_for_odd_nonorientable_genus():
    # with base class n and odd genus the l = 1 families pick up -c/2 = 1/2
    x = parse("n;1;(5,-3),(2,1)")
    for lab in index_sets(x).all():
        want = RationalModZ(Fraction(1, 2)) if lab.kind == "I2" and lab.index == 1 else RationalModZ(0)
        assert cs_of_label(x, lab) + lab.q == want


def test_auckly_cs_rejects_unknown():
    with pytest.raises(TypeError):
        auckly_cs(parse(M_MINUS_1), object())
    with pytest.raises(ValueError):
        auckly_cs(parse("o;0|-1;(2,1),(2,1)"), RhoSigmaRep(0, (0, 0)))
    assert isinstance(auckly_cs(parse(M_MINUS_1), OmegaNu(0, (0, 0, 0))), RationalModZ)


def test_higher_genus_always_realizable():
    x = parse("o;1|-1;(2,1),(3,1)")
    assert all(rep_exists(x, lab) for lab in index_sets(x).I2b)
    x = parse("n;2|0;(3,1)")
    assert all(rep_exists(x, lab) for lab in index_sets(x).I2b)


def test_rep_exists_needs_i2():
    x = parse("o;0|-1;(3,2),(4,1),(5,3)")
    with pytest.raises(ValueError):
        rep_exists(x, index_sets(x).I1[0])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_three_class_criterion_matches_fold(seed):
    rng = random.Random(seed)
    x = SeifertData("o", 0, None, tuple((rng.randint(2, 9), 1) for _ in range(3)))
    sets = index_sets(x)
    for lab in sets.I2a + sets.I2b:
        if lab.index == 0:
            assert modulin3(x, lab) == rep_exists(x, lab)


def test_fold_angles_basic():
    iv = fold_angles([Fraction(1, 2), Fraction(1, 2)])
    assert iv.lo == 0 and iv.hi == 1
    iv = fold_angles([Fraction(1, 3), Fraction(1, 5)])
    assert iv.lo == Fraction(2, 15) and iv.hi == Fraction(8, 15)


def _random_angles(rng, n):
    return [Fraction(rng.randint(0, 60), 60) for _ in range(n)]


@pytest.mark.slow
@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_fold_matches_quaternion_search(seed):
    rng = random.Random(seed)
    angles = _random_angles(rng, rng.randint(1, 5))
    target = rng.randint(0, 1)
    assert fold_angles(angles).contains(target) == su2_product_reachable(angles, target)

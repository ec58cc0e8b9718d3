import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zakhrt.functions import AnalyticFunction, TFPoint
from zakhrt.torus import (OrbitClass, TorusVector, advance, classify_generator, find_relation,
                          orbit, orbit_discrepancy, product_along_orbit, verify_product_identity)
from zakhrt.zak import TrigPoly, ZakGridSpec, gamma_of, zak_modulus_at

S2, S3 = math.sqrt(2), math.sqrt(3)
GAUSS = AnalyticFunction("gaussian")
ONE = TrigPoly(((1, (0,), (0,)),))


def test_advance_examples():
    assert advance([0.25, 0.75], [0.5, 0.5], 1).coords == (0.75, 0.25)
    z = advance([0, 0], [Fraction(1, 2), Fraction(1, 3)], 6)
    assert z.tags == (0, 0) and z.coords == (0.0, 0.0)


def test_advance_against_high_precision():
    mpmath.mp.prec = 256
    m = 10 ** 6
    got = advance([0.0, 0.0], [S2 - 1, S3 - 1], m).coords
    for g, root in zip(got, (2, 3)):
        exact = mpmath.frac(m * (mpmath.sqrt(root) - 1))
        assert abs(g - float(exact)) <= 1e-9


def test_advance_exact_float_input_high_precision():
    # oracle on the exact binary value of the input
    mpmath.mp.prec = 256
    g = 0.7390851332151607
    for m in (10 ** 6, 10 ** 9, 12345678901):
        want = float(mpmath.frac(m * mpmath.mpf(g)))
        assert abs(advance([0.0], [g], m).coords[0] - want) <= 2e-16


@settings(max_examples=100, deadline=None)
@given(g=st.lists(st.floats(0, 1, exclude_max=True), min_size=2, max_size=2),
       z=st.lists(st.floats(0, 1, exclude_max=True), min_size=2, max_size=2),
       a=st.integers(0, 10 ** 6), b=st.integers(0, 10 ** 6))
def test_advance_composition(g, z, a, b):
    one = np.array(advance(z, g, a + b).coords)
    two = np.array(advance(advance(z, g, a), g, b).coords)
    d = np.abs(one - two)
    assert np.all(np.minimum(d, 1 - d) <= 1e-12)


@settings(max_examples=50, deadline=None)
@given(p=st.lists(st.integers(-50, 50), min_size=2, max_size=2),
       q=st.lists(st.integers(1, 50), min_size=2, max_size=2),
       a=st.integers(0, 1000), b=st.integers(0, 1000))
def test_advance_composition_exact(p, q, a, b):
    g = [Fraction(u, v) for u, v in zip(p, q)]
    z = [Fraction(1, 7), Fraction(2, 5)]
    assert advance(z, g, a + b) == advance(advance(z, g, a), g, b)


def test_torus_vector_tags():
    v = TorusVector.of([Fraction(-1, 3), 1.25, 2])
    assert v.tags == (Fraction(2, 3), None, 0)
    assert v.coords[1] == 0.25
    assert not v.exact
    assert all(abs(c - float(t)) <= 1e-15 for c, t in zip(v.coords, v.tags) if t is not None)


def test_classify_examples():
    c = classify_generator(TorusVector.of([Fraction(1, 2), Fraction(1, 3)]), Q=100)
    assert (c.kind, c.order, c.rational_dimension) == ("finite", 6, 1)
    c = classify_generator([S2 - 1, S2 - 1], H=50)
    assert (c.kind, c.relation, c.rational_dimension) == ("infinite_nondense", (0, 1, -1), 2)
    c = classify_generator([S2 - 1, S3 - 1], Q=10 ** 4, H=1000)
    assert (c.kind, c.search_bound, c.rational_dimension) == ("dense_up_to_bound", 1000, 3)


def test_classify_floats_as_rationals():
    c = classify_generator([0.5, 1 / 3])
    assert c.kind == "finite" and c.order == 6


@pytest.mark.parametrize("g", [[S2 - 1, S2 - 1], [S2 - 1, S3 - 1], [0.5, 1 / 3], [S2 - 1, 0.25]])
def test_classify_permutation_and_inverse(g):
    base = classify_generator(g, H=200)
    for alt in ([g[1], g[0]], [1 - g[0], g[1]], [g[0], 1 - g[1]], [1 - g[0], 1 - g[1]]):
        c = classify_generator(alt, H=200)
        assert (c.kind, c.rational_dimension) == (base.kind, base.rational_dimension)


def test_finite_iff_order_annihilates():
    for g in ([Fraction(3, 4), Fraction(5, 6)], [Fraction(2, 9), Fraction(0)]):
        c = classify_generator(TorusVector.of(g))
        assert c.kind == "finite"
        assert all((c.order * v).denominator == 1 for v in g)
        # minimal
        assert all(any((k * v).denominator != 1 for v in g) for k in range(1, c.order))


def test_relation_annihilates():
    rel = find_relation(np.array([S2 - 1, 2 - S2]), 20)
    assert abs(rel[0] + rel[1] * (S2 - 1) + rel[2] * (2 - S2)) <= 1e-12


def test_unresolved_budget():
    c = classify_generator([S2 - 1, S3 - 1, math.pi - 3, math.e - 2], H=30, budget=1000)
    assert c.kind == "unresolved"
    with pytest.raises(ValueError):
        classify_generator([0.1, 0.2], Q=0)


def test_orbit_class_roundtrip():
    for c in (OrbitClass("finite", order=6, rational_dimension=1),
              OrbitClass("infinite_nondense", relation=(0, 1, -1), rational_dimension=2)):
        assert OrbitClass.from_dict(c.to_dict()) == c


def test_discrepancy_examples():
    assert orbit_discrepancy([0.1, 0.2], [S2 - 1, S3 - 1], 1, 8) == pytest.approx(1 - 1 / 64, abs=1e-15)
    g = TorusVector.of([Fraction(1, 2), Fraction(1, 3)])
    assert orbit_discrepancy(TorusVector.of([0, 0]), g, 6000, 6) == pytest.approx(5 / 36, abs=1e-15)
    assert orbit_discrepancy([0.0, 0.0], [S2 - 1, S3 - 1], 10 ** 5, 8) <= 0.01


def test_discrepancy_decreases_for_dense():
    vals = [orbit_discrepancy([0.0, 0.0], [S2 - 1, S3 - 1], m, 8) for m in (10 ** 3, 10 ** 4, 10 ** 5)]
    inversions = sum(b > a for a, b in zip(vals, vals[1:]))
    assert inversions <= 1 and vals[-1] < vals[0]


def test_orbit_exact_matches_float():
    g = TorusVector.of([Fraction(1, 2), Fraction(1, 3)])
    pts = orbit(TorusVector.of([0, 0]), g, 7)
    assert pts[6].tolist() == [0.0, 0.0]
    d = np.abs(pts - orbit([0.0, 0.0], [0.5, 1 / 3], 7))
    assert np.all(np.minimum(d, 1 - d) <= 1e-15)


def test_product_examples():
    assert product_along_orbit(ONE, [0.3, 0.1], [S2 - 1, 0.2], 17).log_magnitude == 0.0
    two = TrigPoly(((2, (0,), (0,)),))
    assert product_along_orbit(two, [0.3, 0.1], [0.1, 0.2], 10).log_magnitude == pytest.approx(10 * math.log(2), rel=1e-15)
    cancel = TrigPoly(((1, (0,), (0,)), (1, (1,), (0,))))
    r = product_along_orbit(cancel, [0.5, 0.0], [0.0, 0.0], 3)
    assert r.is_zero and r.zero_index == 0 and r.log_magnitude == -math.inf


@settings(max_examples=30, deadline=None)
@given(kappa=st.floats(0.01, 100), m=st.integers(1, 200), seed=st.integers(0, 1000))
def test_product_kappa_scaling(kappa, m, seed):
    from zakhrt.zak import random_trig_poly
    P = random_trig_poly(np.random.default_rng(seed))
    z, g = [0.123, 0.456], [S2 - 1, S3 - 1]
    a = product_along_orbit(P, z, g, m)
    b = product_along_orbit(P.scaled(kappa), z, g, m)
    assert a.is_zero == b.is_zero
    if not a.is_zero:
        assert b.log_magnitude == pytest.approx(a.log_magnitude + m * math.log(kappa), abs=1e-9 * m)


def test_product_identity_trivial():
    rep = verify_product_identity(GAUSS, ONE, TFPoint.origin(), [0.2, 0.3], 10, ZakGridSpec(1, 16, 10))
    assert rep.residual == 0.0


def test_product_identity_synthetic():
    p = TFPoint((S2 - 1,), (S3 - 1,))
    g = gamma_of(p)

    def G(pts):
        return zak_modulus_at(GAUSS, pts + g, 10) / zak_modulus_at(GAUSS, pts, 10)

    rep = verify_product_identity(GAUSS, None, p, [0.1, 0.2], 50, ZakGridSpec(1, 16, 10), multiplier=G)
    assert rep.max_step_residual <= 1e-12
    assert rep.excess <= 1e-12
    assert rep.residual <= 1e-12


def test_product_identity_detects_failure():
    rep = verify_product_identity(GAUSS, ONE, TFPoint((0.5,), (0.5,)), [0.5, 0.5], 5, ZakGridSpec(1, 16, 10))
    assert rep.residual >= 0.1

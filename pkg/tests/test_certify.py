import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gaussian_ambiguity
from zakhrt.certify import (CertifyConfig, TFSystem, best_dependence, certify, gram_matrix)
from zakhrt.functions import AnalyticFunction, TFPoint, apply_tf_shift
from zakhrt.linalg import jacobi_eigenvalues, min_eigenvalue

GAUSS = AnalyticFunction("gaussian")
EXP1 = AnalyticFunction("two_sided_exponential")
S2, S3 = math.sqrt(2), math.sqrt(3)
SQUARE = ((0, 0), (1, 0), (0, 1), (1, 1))


@pytest.fixture(scope="module")
def certs():
    return {
        "prop1": certify(GAUSS, TFSystem(SQUARE, TFPoint((S2,), (S3,)))),
        "numerical": certify(EXP1, TFSystem(SQUARE, TFPoint((Fraction(1, 2),), (Fraction(1, 2),)))),
        "prop3": certify(EXP1, TFSystem(SQUARE, TFPoint((S2 - 1,), (S2 - 1,)))),
    }


def test_system_validation():
    with pytest.raises(ValueError):
        TFSystem(((0, 0), (0, 0)), TFPoint((0.5,), (0.5,)))
    with pytest.raises(ValueError):
        TFSystem(((0, 0), (0, 1)), TFPoint((1.0,), (0.0,)))  # (l=0, m=1) is x=1, y=0
    with pytest.raises(ValueError):
        TFSystem(((0.5, 0),), TFPoint((0.3,), (0.0,)))
    s = TFSystem(((2, 3),), TFPoint((0.5,), (0.25,)))
    assert s.points()[0] == TFPoint((3.0,), (2.0,))


def test_gamma_sign_regression():
    s = TFSystem(SQUARE, TFPoint((Fraction(1, 3),), (Fraction(1, 5),)))
    assert s.gamma.tags == (Fraction(2, 3), Fraction(1, 5))
    s = TFSystem(SQUARE, TFPoint((0.3,), (0.2,)))
    assert s.gamma.coords == pytest.approx((0.7, 0.2), abs=1e-15)
    assert s.to_dict()["gamma"] == list(s.gamma.coords)


def test_gram_examples():
    G = gram_matrix(GAUSS, TFSystem((), TFPoint((0.0,), (0.0,))))
    assert G.shape == (1, 1) and abs(G[0, 0] - 1) <= 1e-6
    G = gram_matrix(GAUSS, TFSystem(((0, 0),), TFPoint((1.0,), (0.0,))))
    assert abs(abs(G[0, 1]) - math.exp(-math.pi / 2)) <= 1e-6
    G = gram_matrix(GAUSS, TFSystem(((0, 0),), TFPoint((S2,), (S3,))))
    assert abs(abs(G[0, 1]) - math.exp(-5 * math.pi / 2)) <= 1e-6


@pytest.mark.parametrize("x, y", [(1.0, 0.0), (S2, S3), (0.3, -0.7)])
def test_ambiguity_oracle_by_quadrature(x, y):
    # fine trapezoid quadrature, independent of the package's sampling
    t = np.linspace(-12, 12 + abs(x), 400001)
    g = GAUSS(t[:, None])
    h = apply_tf_shift(GAUSS, TFPoint((x,), (y,)))(t[:, None])
    val = abs(np.trapezoid(g * np.conj(h), t))
    assert val == pytest.approx(gaussian_ambiguity(x, y), abs=1e-9)


def test_min_eigenvalue_examples():
    assert min_eigenvalue(np.array([[1, 0.2], [0.2, 1]])) == pytest.approx(0.8, abs=1e-15)
    assert min_eigenvalue(np.eye(4)) == 1.0
    e = math.exp(-math.pi / 2)
    assert min_eigenvalue(np.array([[1, e], [e, 1]])) == pytest.approx(1 - e, abs=1e-12)
    with pytest.raises(ValueError):
        min_eigenvalue(np.array([[1, 0.3], [0.2, 1]]))


@settings(max_examples=40, deadline=None)
@given(a=st.floats(-5, 5), d=st.floats(-5, 5), re=st.floats(-5, 5), im=st.floats(-5, 5))
def test_two_by_two_closed_form(a, d, re, im):
    b = complex(re, im)
    G = np.array([[a, b], [np.conj(b), d]])
    closed = (a + d) / 2 - math.sqrt(((a - d) / 2) ** 2 + abs(b) ** 2)
    assert min_eigenvalue(G) == pytest.approx(closed, abs=1e-12 * max(1.0, abs(a), abs(d), abs(b)))


@settings(max_examples=40, deadline=None)
@given(k=st.integers(1, 8), seed=st.integers(0, 10 ** 6))
def test_jacobi_matches_eigvalsh(k, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    H = X + X.conj().T
    np.testing.assert_allclose(jacobi_eigenvalues(H), np.linalg.eigvalsh(H),
                               atol=1e-12 * np.linalg.norm(H))


@settings(max_examples=15, deadline=None)
@given(x=st.floats(-2, 2), y=st.floats(-2, 2), kind=st.sampled_from(["gaussian", "two_sided_exponential"]))
def test_gram_positive_semidefinite(x, y, kind):
    f = AnalyticFunction(kind)
    try:
        s = TFSystem(SQUARE, TFPoint((x,), (y,)))
    except ValueError:
        return
    G = gram_matrix(f, s, T=6, M=16)
    np.testing.assert_array_equal(G, G.conj().T)
    assert min_eigenvalue(G) >= -1e-10


def test_near_degenerate_dependence():
    s = TFSystem(SQUARE, TFPoint((1e-9,), (0.0,)))
    fit = best_dependence(GAUSS, s)
    assert fit.residual <= 1e-6
    np.testing.assert_allclose(fit.coefficients, [1, 0, 0, 0], atol=1e-6)
    assert min_eigenvalue(gram_matrix(GAUSS, s)) <= 1e-8


def test_far_system_residual_and_eigenvalue():
    s = TFSystem(SQUARE, TFPoint((S2,), (S3,)))
    fit = best_dependence(GAUSS, s)
    assert fit.residual >= 0.9
    assert min_eigenvalue(gram_matrix(GAUSS, s)) > 1e-8


def test_residual_zero_iff_eigenvalue_zero():
    for eps in (1e-9, 1e-5, 0.3):
        s = TFSystem(SQUARE, TFPoint((eps,), (0.0,)))
        r = best_dependence(GAUSS, s).residual
        lam = min_eigenvalue(gram_matrix(GAUSS, s))
        assert (r ** 2 <= 1e-8) == (lam <= 1e-8)


def test_conjugate_modulations_invariance():
    s = TFSystem(SQUARE, TFPoint((0.4,), (0.7,)))
    flipped = TFSystem(tuple((-l, m) for l, m in SQUARE), TFPoint((0.4,), (-0.7,)))
    for f in (GAUSS, EXP1):
        G1, G2 = gram_matrix(f, s), gram_matrix(f, flipped)
        np.testing.assert_allclose(np.abs(G1), np.abs(G2), atol=1e-13)
        assert best_dependence(f, s).residual == pytest.approx(best_dependence(f, flipped).residual, abs=1e-12)


def test_certificate_verdicts(certs):
    assert certs["prop1"].verdict == "independent_prop1"
    assert certs["numerical"].verdict == "independent_numerical"
    assert certs["prop3"].verdict == "independent_prop3"
    assert certs["numerical"].orbit.order == 2
    assert any("rational" in a for a in certs["numerical"].annotations)
    assert certs["prop3"].orbit.kind == "infinite_nondense"
    assert len(certs["prop3"].zeros["zeros"]) == 1
    assert certs["prop1"].ls_residual >= 0.9


def test_certificate_fields(certs):
    d = certs["prop1"].to_dict()
    for key in ("system", "gram_min_eig", "ls_residual", "feq_residual", "orbit", "zeros",
                "verdict", "config", "versions"):
        assert key in d
    assert d["system"]["distinguished"] == [S2, S3]
    assert certs["prop1"].witness is not None


def test_ls_and_zak_residuals_agree(certs):
    for c in certs.values():
        assert abs(c.ls_residual - c.zak_ls_residual) <= 1e-6


def test_certificate_reproducible(certs):
    again = certify(EXP1, TFSystem(SQUARE, TFPoint((Fraction(1, 2),), (Fraction(1, 2),))))
    assert again.to_json() == certs["numerical"].to_json()


def test_verdict_monotone_under_removal(certs):
    base = TFSystem(SQUARE, TFPoint((Fraction(1, 2),), (Fraction(1, 2),)))
    G = gram_matrix(EXP1, base)
    full = min_eigenvalue(G)
    for j in range(base.N):
        sub = base.without(j)
        assert min_eigenvalue(gram_matrix(EXP1, sub)) >= full - 1e-12
        assert certify(EXP1, sub).verdict.startswith("independent")


def test_config_roundtrip():
    cfg = CertifyConfig(gram_M=32, H=200).resolved(GAUSS)
    assert CertifyConfig.from_dict(cfg.to_dict()) == cfg


def test_box_disables_prop_branches():
    box = AnalyticFunction("box_indicator")
    c = certify(box, TFSystem(SQUARE, TFPoint((S2 - 1,), (S3 - 1,))), CertifyConfig(T=2))
    assert c.verdict in ("independent_numerical", "inconclusive")
    assert c.zeros is None
    assert any("not continuous" in a for a in c.annotations)

import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphall import experiments, qforms
from sphall.errors import BudgetError, ConvergenceError, DomainError, NonPrimitiveError, NonSurjectiveError


def brute_primitive(G, bound, box=12):
    n = G.shape[0]
    out = []
    for v in itertools.product(range(-box, box + 1), repeat=n):
        if not any(v) or math.gcd(*v) != 1:
            continue
        if next(c for c in v if c) < 0:
            continue
        q = float(np.array(v) @ G @ np.array(v))
        if q <= bound:
            out.append(q)
    return sorted(out)


def test_gram_bundle_basics():
    E = qforms.bundle_from_iwasawa(2.0, 0.5, 0.3)
    assert E.degree() == pytest.approx(1.0)
    assert qforms.GramBundle.from_json(E.to_json()).G.tolist() == E.G.tolist()
    with pytest.raises(DomainError):
        qforms.GramBundle([[1, 2], [2, 1]])
    with pytest.raises(DomainError):
        qforms.GramBundle([[1, 0.5], [0.4, 1]])
    with pytest.raises(DomainError):
        qforms.UpperHalfPoint(0, -1)


def test_tau_bundle_is_iwasawa_slice():
    tau = complex(0.3, 1.7)
    A = qforms.bundle_from_tau(tau).G
    B = qforms.bundle_from_iwasawa(math.sqrt(tau.imag), 1 / math.sqrt(tau.imag), tau.real).G
    # same lattice up to the basis swap e1 <-> e2
    assert np.allclose(sorted(brute_primitive(A, 5)), sorted(brute_primitive(B, 5)))


def test_enumeration_at_i():
    E = qforms.bundle_from_tau(1j)
    assert {v.coords for v in qforms.enumerate_rank1_subbundles(E, 1.0)} == {(0, 1), (1, 0)}
    assert len(qforms.enumerate_rank1_subbundles(E, 1 / math.sqrt(2))) == 4


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.6, 2.5), st.floats(0.5, 6))
def test_rank2_enumeration_matches_brute_force(x, y, bound):
    G = qforms.bundle_from_tau(complex(x, y)).G
    _, q = qforms.subbundle_norms_2d(G, bound)
    assert np.allclose(np.sort(q), brute_primitive(G, bound))


def test_rank3_enumeration_matches_brute_force():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(3, 3)) + 2 * np.eye(3)
    G = A.T @ A
    E = qforms.GramBundle(G)
    q = qforms.subbundle_norms(E, 1 / math.sqrt(6.0))
    assert np.allclose(q, brute_primitive(G, 6.0, box=8))


def test_enumeration_budget():
    with pytest.raises(BudgetError):
        qforms.subbundle_norms_2d(qforms.bundle_from_tau(1j).G, 1e8, cap=1000)


def test_restrict_and_pushforward():
    E = qforms.GramBundle([[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.1]])
    sub = qforms.restrict_form(E, [[1, 0], [0, 1], [0, 0]])
    quot = qforms.pushforward_form(E, [[0, 0, 1]])
    # deg E = deg(sub) deg(quotient)
    assert E.degree() == pytest.approx(sub.degree() * quot.degree())
    with pytest.raises(NonPrimitiveError):
        qforms.restrict_form(E, [[2, 0], [0, 1], [0, 0]])
    with pytest.raises(NonSurjectiveError):
        qforms.pushforward_form(E, [[0, 0, 2]])
    assert qforms.integer_minors_gcd([[2, 0], [0, 3], [0, 0]]) == 6


def test_primitive_vector_sign():
    assert qforms.PrimitiveVector((-2, 3)).coords == (2, -3)
    with pytest.raises(NonPrimitiveError):
        qforms.PrimitiveVector((2, 4))


def exact_eisenstein_at_i(s):
    # sum over nonzero (m, n) of (m^2 + n^2)^-s = 4 zeta(s) beta(s)
    s = mpmath.mpf(s)
    beta = mpmath.dirichlet(s, [0, 1, 0, -1])
    return float(4 * mpmath.zeta(s) * beta / (2 * mpmath.zeta(2 * s)))


@pytest.mark.parametrize("s", [1.5, 2.0, 3.25])
def test_eisenstein_at_i_exact(s):
    assert qforms.eisenstein_maass(1j, s) == pytest.approx(exact_eisenstein_at_i(s), rel=1e-12)


def test_eisenstein_value_at_i_2():
    # 30 G / pi^2 with Catalan's constant G
    assert qforms.eisenstein_maass(1j, 2).real == pytest.approx(30 * float(mpmath.catalan) / math.pi ** 2, rel=1e-13)


def test_eisenstein_modular_invariance():
    tau = qforms.UpperHalfPoint(0.21, 0.93)
    moved = tau.act(2, 1, 1, 1)
    assert qforms.eisenstein_maass(tau.tau, 2.5) == pytest.approx(qforms.eisenstein_maass(moved.tau, 2.5), rel=1e-11)


def test_eisenstein_direct_agrees():
    tau = complex(0.3, 1.1)
    d = qforms.eisenstein_maass_direct(tau, 2.0, tol=1e-7)
    assert abs(d["value"] - qforms.eisenstein_maass(tau, 2.0)) < 10 * d["error_estimate"]
    with pytest.raises(ConvergenceError):
        qforms.eisenstein_maass(tau, 0.9)


@pytest.mark.parametrize("y", [0.7, 1.3, 2.0])
def test_eisenstein_constant_term(y):
    row = experiments.eisenstein_constant_term(y)
    assert row["deviation"] < 1e-9


def test_hall_character_product_matches_eisenstein():
    tau = complex(0.3, 1.1)
    res = qforms.hall_character_product(3.0, 0.0, qforms.bundle_from_tau(tau))
    assert res["value"] == pytest.approx(qforms.eisenstein_maass(tau, 2.0), rel=1e-8)


def test_hall_product_11_terms():
    # with f1 = f2 = 1 the product counts subbundles weighted by (d / (D/d))^(1/2)
    E = qforms.bundle_from_tau(1j)
    val = qforms.hall_product_11(lambda d: np.ones_like(d), lambda d: np.ones_like(d), E, 0.999)
    assert val == pytest.approx(2.0)


def test_constant_term_rules_agree():
    f = lambda a1, a2, x: math.cos(2 * math.pi * x) ** 2 + a1 * a2
    gl = qforms.constant_term_rank2(f, 1.0, 2.0, 24)
    tr = qforms.constant_term_rank2(f, 1.0, 2.0, 8, rule="trapezoid")
    assert gl == pytest.approx(2.5)
    assert tr == pytest.approx(2.5)
    with pytest.raises(DomainError):
        qforms.constant_term_rank2(f, 1.0, 2.0, 8, rule="simpson")

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from sphall import mellin, shuffle, specfun
from sphall.errors import DomainError, PoleError
from sphall.experiments import random_entire
from sphall.graded import GradedEvaluator


def one_var(func):
    return GradedEvaluator(1, lambda p: func(p[:, 0]))


F = one_var(lambda s: np.exp(0.3 * s + 0.1 * s * s))
G = one_var(lambda s: (1 + 0.5 * s) * np.exp(-0.2 * s + 0.05 * s * s))
H = one_var(lambda s: np.cos(0.4 * s))


def test_shuffle_enumeration():
    assert len(shuffle.enumerate_shuffles(2, 3)) == 10
    assert shuffle.enumerate_shuffles(1, 1)[1].crossed_pairs() == [(1, 2)]
    with pytest.raises(DomainError):
        shuffle.Shuffle((2, 1, 3), 2, 1)
    with pytest.raises(DomainError):
        shuffle.Shuffle((1, 1), 1, 1)


def test_degree_one_product_formula():
    s1, s2 = 0.7 + 1j, -0.4 + 3j
    val = shuffle.shuffle_product(F, G)(s1, s2)
    ref = F(s1) * G(s2) + specfun.phi(s1 - s2) * F(s2) * G(s1)
    assert val == pytest.approx(ref, rel=1e-13)


def test_unit_is_neutral():
    u = shuffle.unit()
    pts = np.array([[0.3 + 2j, 1.1 - 1j]])
    FG = shuffle.shuffle_product(F, G)
    assert shuffle.shuffle_product(u, FG).many(pts) == pytest.approx(FG.many(pts))
    assert shuffle.shuffle_product(FG, u).many(pts) == pytest.approx(FG.many(pts))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_associativity_for_any_kernel(seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=3) + 1j * rng.normal(size=3)
    kernel = lambda z: (z + c[0]) / (z * z + c[1] * z + c[2] + 5)
    A, B, C = (random_entire(rng, 1) for _ in range(3))
    pts = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    left = shuffle.shuffle_product(shuffle.shuffle_product(A, B, kernel), C, kernel).many(pts)
    right = shuffle.shuffle_product(A, shuffle.shuffle_product(B, C, kernel), kernel).many(pts)
    assert np.max(np.abs(left - right) / np.abs(right)) < 1e-10


def test_associativity_mixed_degrees_phi():
    FG = shuffle.shuffle_product(F, G)
    pts = np.array([[0.2 + 1j, 1.9 - 2j, -0.8 + 4.5j, 0.4 + 7j]])
    left = shuffle.shuffle_product(FG, shuffle.shuffle_product(H, F)).many(pts)
    right = shuffle.shuffle_product(shuffle.shuffle_product(FG, H), F).many(pts)
    assert left == pytest.approx(right, rel=1e-10)


def test_symmetric_product_is_symmetric_and_associative():
    P = shuffle.symmetric_shuffle(F, G)
    pts = np.array([[0.3 + 1j, -1.2 + 2.5j], [2.0, 0.5 - 3j]])
    assert P.symmetry_defect(pts) < 1e-12 * np.max(np.abs(P.many(pts)))
    pts3 = np.array([[0.3 + 1j, -1.2 + 2.5j, 0.9 - 4j]])
    left = shuffle.symmetric_shuffle(P, H).many(pts3)
    right = shuffle.symmetric_shuffle(F, shuffle.symmetric_shuffle(G, H)).many(pts3)
    assert left == pytest.approx(right, rel=1e-11)


def test_homomorphism_divides_by_lambda():
    pts = np.array([[0.3 + 1j, -1.2 + 2.5j], [1.7, 0.2 - 3j]])
    star = shuffle.star_to_shuffle(shuffle.symmetric_shuffle(F, G)).many(pts)
    prod = shuffle.shuffle_product(shuffle.star_to_shuffle(F), shuffle.star_to_shuffle(G)).many(pts)
    assert star == pytest.approx(prod, rel=1e-12)
    # multiplying by the lambda product instead does not intertwine the products
    lam = specfun.lambda_big_array(pts[:, 0] - pts[:, 1])
    wrong = shuffle.symmetric_shuffle(F, G).many(pts) * lam
    assert np.max(np.abs(wrong - shuffle.shuffle_product(F, G).many(pts))) > 1e-3


def test_diagonal_limit():
    f = lambda s: np.exp(0.3 * s)
    fp = lambda s: 0.3 * np.exp(0.3 * s)
    g = lambda s: 1 + s * s
    gp = lambda s: 2 * s
    m = 0.4 + 0.7j
    P = shuffle.symmetric_shuffle(one_var(f), one_var(g))
    assert P(m, m) == pytest.approx(shuffle.diagonal_limit_11(f, fp, g, gp, m), rel=1e-8)


def test_shuffle_with_pole_reports_pair():
    with pytest.raises(PoleError) as info:
        shuffle.shuffle_product(F, G)(1.5, 0.5)
    assert info.value.where == (1, 2)


def test_quadratic_relations_vanish():
    pts = np.array([[2.5 + 1j, 0.3], [0.7 - 2j, 1.2 + 4j], [3.0, -0.1 + 0.5j]])
    assert np.max(np.abs(shuffle.mult2(shuffle.quadratic_relation_f11()).many(pts))) < 1e-10
    assert np.max(np.abs(shuffle.mult2(shuffle.quadratic_relation_family(2.0, 5.0)).many(pts))) < 1e-9
    # a generic function is not annihilated
    generic = GradedEvaluator(2, lambda p: np.exp(0.2 * p[:, 0] - 0.1 * p[:, 1]))
    assert np.min(np.abs(shuffle.mult2(generic).many(pts))) > 1e-3
    with pytest.raises(DomainError):
        shuffle.mult2(F)


def _unfolded_twisted_ct(f1, f2, u1, ell, n_max=4000):
    """Constant term from the orbit decomposition of primitive vectors (independent of the lattice code)."""
    a1, D = math.exp(u1), math.exp(ell)
    a2 = D / a1

    def g(q):
        d = q ** -0.5
        return math.sqrt(d / (D / d)) * f1(d) * f2(D / d)

    total = g(1 / a1 ** 2)
    phi = np.arange(n_max + 1)
    for p in range(2, n_max + 1):  # Euler phi by sieve
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    for n in range(1, n_max + 1):
        base = n * n / a2 ** 2
        if base > 1e6:
            break
        val, _ = integrate.quad(lambda t: g(t * t / a1 ** 2 + base), -np.inf, np.inf, epsabs=1e-14)
        total += phi[n] / n * val
    return total * math.sqrt(a2 / a1)


@pytest.mark.parametrize("u1,ell", [(-0.5, -0.1), (0.3, 0.4), (-1.2, -0.6)])
def test_slice_constant_term_matches_unfolding(u1, ell):
    f1 = mellin.LogGaussianTestFunction((0.1,), (0.45,))
    f2 = mellin.LogGaussianTestFunction((-0.2,), (0.5,))
    model = shuffle._SliceModel(f1, f2)
    assert model.twisted_ct(u1, ell) == pytest.approx(_unfolded_twisted_ct(f1, f2, u1, ell), rel=1e-7)


def test_pipeline_a_rejects_bad_exponents():
    f = mellin.LogGaussianTestFunction((0.0,), (0.5,))
    with pytest.raises(DomainError):
        shuffle.ch_pipeline_a(f, f, [(0.5, 0.1)])

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphall import mellin, specfun
from sphall.errors import ConvergenceError, DomainError
from sphall.experiments import riemann_inverse_reference
from sphall.graded import GradedEvaluator


def test_forward_gamma():
    # int exp(-a^2) a^s d*a = Gamma(s/2) / 2
    for s in (1.0, 2.5, 1 + 3j):
        val = mellin.mellin_forward(lambda a: np.exp(-a * a), s)
        assert abs(val - complex(mpmath.gamma(s / 2)) / 2) < 1e-12


def test_forward_log_gaussian_matches_closed_form():
    f = mellin.LogGaussianTestFunction((0.3, -0.4), (0.5, 0.7), amplitude=1.7)
    S = np.array([[0.2 + 1j, -0.5], [1.0, 2.0 - 3j]])
    val = mellin.mellin_forward(f, S, mellin.QuadConfig(tol=1e-12, center=f.mu, scale=f.sigma))
    ref = mellin.mellin_closed_form(f).many(S)
    assert np.max(np.abs(val - ref)) < 1e-11


def test_forward_reports_slow_decay():
    with pytest.raises(ConvergenceError):
        mellin.mellin_forward(lambda a: 1 / (1 + a), 0.5, mellin.QuadConfig(u_max=20, max_levels=2))


def test_forward_theta_gives_zeta_star():
    for s in (2.0, 3.0, 2 + 5j):
        val = mellin.mellin_forward(lambda a: specfun.theta_array(a * a) - 1, s)
        assert abs(val - specfun.zeta_star(s)) < 1e-12


@settings(max_examples=15, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(0.3, 0.9), st.floats(0.4, 2.5))
def test_round_trip_property(mu, sigma, a):
    f = mellin.LogGaussianTestFunction((mu,), (sigma,))
    back = mellin.mellin_inverse(mellin.mellin_closed_form(f), a, mellin.VerticalContour((0.2,), 20.0, 401))
    assert abs(back - f(a)) < 1e-10


def test_inverse_2d():
    f = mellin.LogGaussianTestFunction((0.1, 0.2), (0.6, 0.5))
    pts = np.array([[1.0, 1.2], [0.5, 2.0]])
    back = mellin.mellin_inverse(mellin.mellin_closed_form(f), pts, mellin.VerticalContour((0.0, 0.5), 12.0, 97))
    assert np.max(np.abs(back - f(pts))) < 1e-10


@pytest.mark.parametrize("strip,sigma0", [("right", 2.0), ("critical", 0.5), ("left", -1.0)])
@pytest.mark.parametrize("a", [0.8, 1.5])
def test_riemann_inverse_with_exact_residues(strip, sigma0, a):
    zs = GradedEvaluator(1, lambda p: specfun.zeta_star_array(p[:, 0]))
    val = mellin.mellin_inverse(zs, a, mellin.VerticalContour((sigma0,)))
    assert abs(val - riemann_inverse_reference(a, strip)) < 1e-9


def test_residue_shift_is_one_over_a():
    zs = GradedEvaluator(1, lambda p: specfun.zeta_star_array(p[:, 0]))
    a = 1.3
    right = mellin.mellin_inverse(zs, a, mellin.VerticalContour((2.0,)))
    mid = mellin.mellin_inverse(zs, a, mellin.VerticalContour((0.5,)))
    assert abs((right - mid) - 1 / a) < 1e-9
    assert abs((right - mid) - 1 / (a * math.sqrt(math.pi))) > 0.1


def test_inverse_detects_unconverged_tail():
    slow = GradedEvaluator(1, lambda p: 1.0 / (1.0 + p[:, 0] ** 2))
    with pytest.raises(ConvergenceError):
        mellin.mellin_inverse(slow, 1.0, mellin.VerticalContour((0.5,), 5.0, 51), max_doublings=2)


def test_derivative_rule():
    f = mellin.LogGaussianTestFunction((0.2, -0.3), (0.5, 0.6))
    for nu in (0, 1):
        rep = mellin.derivative_rule_check(f, nu, mellin.VerticalContour((0.3, 0.1), 12.0, 97))
        assert rep["max_abs_dev"] < 1e-10


def test_convolution_is_product_of_transforms():
    f = mellin.LogGaussianTestFunction((0.2,), (0.4,))
    g = mellin.LogGaussianTestFunction((-0.5,), (0.3,), 2.0)
    h = mellin.log_gaussian_convolution(f, g)
    s = 0.7 + 2j
    lhs = mellin.mellin_closed_form(h)(s)
    rhs = mellin.mellin_closed_form(f)(s) * mellin.mellin_closed_form(g)(s)
    assert abs(lhs - rhs) < 1e-12 * abs(rhs)


def test_validation():
    with pytest.raises(DomainError):
        mellin.LogGaussianTestFunction((0.0,), (-1.0,))
    with pytest.raises(DomainError):
        mellin.VerticalContour((0.0,), 10.0, 5)
    f = mellin.LogGaussianTestFunction((0.0,), (1.0,))
    with pytest.raises(DomainError):
        f(-1.0)
    with pytest.raises(DomainError):
        mellin.mellin_inverse(mellin.mellin_closed_form(f), 1.0, mellin.VerticalContour((0.0, 0.0)))

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphall import specfun
from sphall.errors import DomainError, KernelZeroDivisionError, PoleError


def mp_zeta_star(s):
    s = mpmath.mpc(s.real, s.imag)
    return complex(mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s))


@pytest.mark.parametrize("s", [0.5, 3.7, -4.2 + 1j, 1 + 20j, -12.5 - 3j, 30 + 0.1j, 0.001 - 7j])
def test_gamma_matches_mpmath(s):
    ref = complex(mpmath.gamma(s))
    assert abs(specfun.gamma(s) - ref) <= 2e-13 * abs(ref)


@pytest.mark.parametrize("s", [2, 0.5 + 14j, -3.5 + 2j, -7 - 25j, 0.2 + 40j, 1.0001, 12 - 1j, -20.5])
def test_zeta_matches_mpmath(s):
    ref = complex(mpmath.zeta(s))
    assert abs(specfun.zeta(s) - ref) <= 1e-11 * max(1.0, abs(ref))


def test_zeta_special_values():
    assert specfun.zeta(0) == pytest.approx(-0.5, abs=1e-14)
    assert specfun.zeta(2) == pytest.approx(math.pi ** 2 / 6, rel=1e-14)
    assert specfun.zeta(-1) == pytest.approx(-1 / 12, rel=1e-13)
    for k in (-2, -4, -10):
        assert specfun.zeta(k) == 0


@pytest.mark.parametrize("s", [2.5, -1.5 + 3j, 0.5 + 21j, -3.2 - 28j, 4 + 4j, -2])
def test_zeta_star_matches_mpmath(s):
    ref = mp_zeta_star(complex(s)) if s != -2 else mp_zeta_star(complex(3))
    assert abs(specfun.zeta_star(s) - ref) <= 1e-11 * abs(ref)


def test_zeta_star_poles():
    for s in (0, 1):
        with pytest.raises(PoleError):
            specfun.zeta_star(s)
    # residues +1 at 1 and -1 at 0
    eps = 1e-7
    assert specfun.zeta_star(1 + eps) * eps == pytest.approx(1, abs=1e-6)
    assert specfun.zeta_star(eps) * eps == pytest.approx(-1, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.floats(-4, 4), st.floats(-30, 30))
def test_functional_equation_property(x, y):
    s = complex(x, y)
    if abs(s) < 1e-3 or abs(s - 1) < 1e-3:
        return
    a, b = specfun.zeta_star(s), specfun.zeta_star(1 - s)
    assert abs(a - b) <= 1e-9 * abs(a)


def test_phi_special_values_and_reflection():
    assert specfun.phi(0) == -1
    assert specfun.phi(-1) == 0
    with pytest.raises(PoleError):
        specfun.phi(1)
    for s in (0.3 + 2j, -2.5 + 7j, 3.1):
        assert specfun.phi(s) * specfun.phi(-s) == pytest.approx(1, abs=1e-12)
        assert specfun.phi(s) == pytest.approx(specfun.lambda_big(-s) / specfun.lambda_big(s), rel=1e-12)


def test_phi_denominator_zero_is_reported():
    # no float lands exactly on a zero of zeta*, so patch in a vanishing denominator at s + 1 = 3
    from unittest import mock

    real = specfun.zeta_star_array

    def fake(z):
        out = real(z)
        out[np.isclose(np.asarray(z), 3.0)] = 0
        return out

    with mock.patch.object(specfun, "zeta_star_array", fake):
        with pytest.raises(KernelZeroDivisionError) as info:
            specfun.phi_array(np.array([2.0]))
    assert info.value.where[1] == "zeta_star(s+1)"


def test_lambda_pole_residue_and_values():
    with pytest.raises(PoleError):
        specfun.lambda_big(0)
    eps = 1e-7
    assert specfun.lambda_big(eps) * eps == pytest.approx(1, abs=1e-6)
    assert specfun.lambda_big(-1) == -2
    assert specfun.lambda_big(-1 + 1e-7) == pytest.approx(-2, abs=1e-5)
    assert abs(specfun.lambda_big(1)) < 1e-14


def test_lambda_vanishes_at_minus_rho():
    t = specfun.find_zeta_zeros(14, 14.3)[0]
    assert abs(specfun.lambda_big(-complex(0.5, t))) < 1e-8


def test_theta_matches_mpmath_and_jacobi():
    for b in (0.01, 0.04, 0.3, 1.0, 7.0):
        ref = float(mpmath.jtheta(3, 0, mpmath.exp(-mpmath.pi * b)))
        assert specfun.theta(b) == pytest.approx(ref, rel=1e-13)
        assert specfun.theta(1 / b) == pytest.approx(math.sqrt(b) * specfun.theta(b), rel=1e-12)
    with pytest.raises(DomainError):
        specfun.theta(-1.0)


def test_zero_finder_and_cache(tmp_path):
    zeros = specfun.find_zeta_zeros(0, 30)
    assert len(zeros) == 3
    for z, ref in zip(zeros, (14.134725141734693, 21.022039638771555, 25.010857580145688)):
        assert z == pytest.approx(ref, abs=1e-8)
    cache = specfun.ZetaZeroCache(zeros, 1e-6)
    assert cache.verify()
    path = tmp_path / "zeros.txt"
    cache.write(path)
    back = specfun.ZetaZeroCache.read(path)
    assert back.verify()
    assert back.ordinates == pytest.approx(zeros, abs=1e-10)
    bad = tmp_path / "bad.txt"
    bad.write_text("nonsense\n")
    with pytest.raises(DomainError):
        specfun.ZetaZeroCache.read(bad)
    assert not specfun.ZetaZeroCache([14.0], 1e-6).verify()


def test_kernels():
    cache = specfun.ZetaZeroCache(specfun.find_zeta_zeros(0, 22), 1e-6)
    lam = specfun.make_kernel("LambdaBig", cache)
    assert lam.pole_set == (0j,)
    assert 1 + 0j in lam.zero_hints
    for z in lam.zero_hints:
        assert abs(lam(z)) < 1e-8
    ph = specfun.make_kernel(specfun.KernelKind.PHI)
    assert ph(0.3) == pytest.approx(specfun.phi(0.3))
    with pytest.raises(ValueError):
        specfun.make_kernel("Psi")


def test_rejects_non_finite_points():
    with pytest.raises(DomainError):
        specfun.zeta_star(float("nan"))
    with pytest.raises(DomainError):
        specfun.gamma("x")


def test_phi_bounded_on_vertical_lines():
    from sphall.experiments import phi_vertical_profile

    rep = phi_vertical_profile(t_max=120.0, samples=1201)
    for row in rep["rows"]:
        assert np.isfinite(row["max_abs"])
        assert row["max_abs_upper_half"] < row["max_abs"]
        assert row["scaled_tail_max"] < 10

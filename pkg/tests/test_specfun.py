import math

import mpmath as mp
import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given
from hypothesis import strategies as st

from isingcorr.errors import DomainError
from isingcorr.specfun import (
    carlson_rf,
    carlson_rj,
    digamma,
    ellip_E,
    ellip_K,
    ellip_KE,
    ellip_Pi,
    elliptic_triple,
    gamma_fn,
    gauss_2f1,
    inverse_landen,
    pochhammer,
    rgamma,
)


@pytest.mark.parametrize(
    "x, expected",
    [(1.0, 1.0), (0.5, math.sqrt(math.pi)), (2.5, 3 * math.sqrt(math.pi) / 4)],
)
def test_gamma_examples(x, expected):
    assert gamma_fn(x) == pytest.approx(expected, rel=1e-14)


def test_gamma_poles():
    with pytest.raises(DomainError):
        gamma_fn(0.0)
    with pytest.raises(DomainError):
        gamma_fn(-3.0)
    assert rgamma(-3.0) == 0.0


@given(st.floats(min_value=-10.0, max_value=8.0), st.integers(min_value=0, max_value=12))
def test_pochhammer_vs_scipy(a, n):
    expected = float(sc.poch(a, n))
    assert pochhammer(a, n) == pytest.approx(expected, rel=1e-11, abs=1e-300)


@pytest.mark.parametrize("x", [0.3, 1.0, 2.5, 7.25, -0.5, -2.7])
def test_digamma_vs_scipy(x):
    assert digamma(x) == pytest.approx(float(sc.digamma(x)), rel=1e-12)


def test_2f1_examples():
    assert gauss_2f1(0.3, 0.7, 1.2, 0.0) == 1.0
    assert gauss_2f1(1, 1, 2, 0.5) == pytest.approx(2 * math.log(2), rel=1e-14)
    assert gauss_2f1(0.5, 1, 1.5, -1) == pytest.approx(math.pi / 4, rel=1e-14)


@pytest.mark.parametrize(
    "a, b, c, x",
    [
        (0.5, 0.5, 1.0, 0.95),       # c - a - b = 0, log case
        (0.5, 1.5, 3.0, 0.9),        # c - a - b = 1
        (-0.5, 0.5, 1.0, 0.99),
        (1.5, 3.0, 4.5, -2.0),
        (0.5, 4.0, 4.5, -1 / 3),
        (0.5, -3, -2.5, -2.0),       # terminating, negative c above -n
        (1.5, -4, -2.5, -0.5),
        (0.3, 0.7, 1.9, 0.75),
        (0.25, 1.5, 2.2, -7.0),
    ],
)
def test_2f1_vs_mpmath(a, b, c, x):
    expected = float(mp.hyp2f1(a, b, c, x))
    assert gauss_2f1(a, b, c, x) == pytest.approx(expected, rel=1e-12)


def test_2f1_domain():
    with pytest.raises(DomainError):
        gauss_2f1(0.5, 0.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        gauss_2f1(0.5, 0.5, -2.0, 0.3)


def test_elliptic_examples():
    assert ellip_K(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert ellip_E(1.0) == 1.0
    k = 0.6
    assert 2 / math.pi * ellip_K(k) == pytest.approx(gauss_2f1(0.5, 0.5, 1.0, k * k), abs=1e-12)


@given(st.floats(min_value=0.0, max_value=0.999))
def test_KE_vs_scipy(k):
    K, E = ellip_KE(k)
    assert K == pytest.approx(float(sc.ellipk(k * k)), rel=1e-13)
    assert E == pytest.approx(float(sc.ellipe(k * k)), rel=1e-13)
    assert K >= math.pi / 2 - 1e-15 and E <= math.pi / 2 + 1e-15


@given(st.floats(min_value=0.01, max_value=0.99))
def test_legendre_relation(k):
    kp = math.sqrt(1 - k * k)
    K, E = ellip_KE(k)
    Kp, Ep = ellip_KE(kp)
    assert E * Kp + Ep * K - K * Kp == pytest.approx(math.pi / 2, abs=1e-12)


def test_carlson_vs_scipy():
    assert carlson_rf(1.0, 2.0, 3.0) == pytest.approx(float(sc.elliprf(1.0, 2.0, 3.0)), rel=1e-14)
    assert carlson_rj(1.0, 2.0, 3.0, 4.0) == pytest.approx(float(sc.elliprj(1.0, 2.0, 3.0, 4.0)), rel=1e-13)
    with pytest.raises(DomainError):
        carlson_rj(0.5, 1.0, 2.0, -0.5)


def test_pi_examples():
    assert ellip_Pi(0.0, 0.3) == pytest.approx(ellip_K(0.3), abs=1e-13)
    assert ellip_Pi(-3.0, 0.0) == pytest.approx(math.pi / 4, rel=1e-14)
    # defining integral, adaptive Gauss-Kronrod oracle
    from scipy.integrate import quad

    n, k = -0.81, 0.5
    ref, _ = quad(lambda t: 1 / ((1 - n * math.sin(t) ** 2) * math.sqrt(1 - k * k * math.sin(t) ** 2)),
                  0, math.pi / 2, epsabs=1e-14, epsrel=1e-14)
    assert ellip_Pi(n, k) == pytest.approx(ref, abs=1e-11)


@pytest.mark.parametrize("n, k", [(0.5, 0.3), (0.9, 0.8), (-50.0, 0.5), (-1e4, 0.9), (-0.2, 0.99)])
def test_pi_vs_mpmath(n, k):
    assert ellip_Pi(n, k) == pytest.approx(float(mp.ellippi(n, k * k)), rel=1e-12)


def test_pi_domain():
    with pytest.raises(DomainError):
        ellip_Pi(1.0, 0.5)


def test_inverse_landen():
    assert inverse_landen(1.0) == pytest.approx((1.0, 0.0))
    assert inverse_landen(0.25) == pytest.approx((0.8, 0.6), abs=1e-15)
    assert inverse_landen(4.0) == pytest.approx((0.8, 0.6), abs=1e-15)
    assert inverse_landen(4.0, signed=True)[1] == pytest.approx(-0.6, abs=1e-15)
    for k in (0.1, 0.7, 3.0):
        m, mp_ = inverse_landen(k)
        assert m * m + mp_ * mp_ == pytest.approx(1.0, abs=1e-15)


def test_elliptic_triple():
    t = elliptic_triple(0.6, n=-0.4)
    assert (t.K, t.E) == pytest.approx(ellip_KE(0.6))
    assert t.Pi == pytest.approx(ellip_Pi(-0.4, 0.6))
    assert np.isfinite([t.K, t.E, t.Pi]).all()

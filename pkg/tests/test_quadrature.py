import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isingcorr.errors import ConvergenceError, EvaluationError, NearSingularError
from isingcorr.quadrature import (
    cauchy_kernel_integral,
    escalate,
    fourier_coeff,
    fourier_coeffs,
    fourier_coeffs_from_values,
    kernel_series,
    make_grid,
    nodes_for_annulus,
    trig_poly,
)
from isingcorr.specfun import ellip_E, ellip_K
from isingcorr.weight import weight_eval


@pytest.mark.parametrize("M", [8, 256, 4096])
def test_nodes_on_circle(M):
    g = make_grid(M, offset=0.37)
    assert np.max(np.abs(np.abs(g.nodes) - 1.0)) < 1e-15
    assert len(g.nodes) == M


def test_grid_rejects_non_power_of_two():
    with pytest.raises(ValueError):
        make_grid(100)


@given(st.integers(min_value=-63, max_value=63))
def test_powers_integrate_exactly(m):
    g = make_grid(64)
    val = fourier_coeff(lambda z: z**m, 0, g)
    assert abs(val - (1.0 if m == 0 else 0.0)) < 1e-14


def test_fourier_coeff_examples():
    g = make_grid(256)
    assert fourier_coeff(lambda z: np.ones_like(z), 0, g) == pytest.approx(1.0)
    for n, m in [(2, -2), (3, -1), (-4, 4)]:
        expected = 1.0 if n + m == 0 else 0.0
        assert abs(fourier_coeff(lambda z: z**m, n, g) - expected) < 1e-14


@pytest.mark.parametrize(
    "k, expected",
    [
        (0.5, 2 / math.pi * (ellip_E(0.5) - 0.75 * ellip_K(0.5)) / 0.5),
        (2.0, 2 / math.pi * ellip_E(0.5)),
    ],
)
def test_weight_zeroth_coefficient_matches_elliptic(k, expected):
    g = make_grid(1024)
    val = fourier_coeff(lambda z: weight_eval(z, k), 0, g)
    assert abs(val.imag) < 1e-13
    assert val.real == pytest.approx(expected, abs=1e-11)


def test_fft_matches_direct_sum():
    g = make_grid(512, offset=0.1)
    f = lambda z: weight_eval(z, 2.0)
    ns = list(range(-6, 7))
    fft = fourier_coeffs(f, ns, g)
    direct = np.array([fourier_coeff(f, n, g) for n in ns])
    assert np.max(np.abs(fft - direct)) < 1e-15


def test_fft_refuses_aliased_indices():
    g = make_grid(16)
    with pytest.raises(ValueError):
        fourier_coeffs_from_values(np.ones(16), [0, 8], g)


def test_nonfinite_sample_raises():
    g = make_grid(16)
    with pytest.raises(EvaluationError):
        fourier_coeff(lambda z: np.where(np.abs(z - 1) < 1e-9, np.nan, 1.0), 0, g)


@pytest.mark.parametrize(
    "f, z, expected",
    [
        (lambda zeta: np.ones_like(zeta), 0.3 + 0.2j, 1.0),
        (lambda zeta: np.ones_like(zeta), 2.0 - 1.0j, -1.0),
        (lambda zeta: zeta, 0.4j, 0.8j),
    ],
)
def test_cauchy_kernel_examples(f, z, expected):
    assert cauchy_kernel_integral(f, z, make_grid(256)) == pytest.approx(expected, abs=1e-13)


def test_cauchy_kernel_guard():
    g = make_grid(256)
    with pytest.raises(NearSingularError):
        cauchy_kernel_integral(lambda zeta: zeta, 1.0 + 1e-3, g)


def test_kernel_series_matches_quadrature():
    coeffs = [0.5, -0.25, 1.0, 0.125]  # c_{-1}, c_0, c_1, c_2
    f = trig_poly(coeffs, lowest=-1)
    laurent = lambda m: coeffs[m + 1] if -1 <= m <= 2 else 0.0
    for z in (0.3 - 0.4j, 1.7 + 0.5j):
        assert kernel_series(laurent, z) == pytest.approx(cauchy_kernel_integral(f, z, make_grid(1024)), abs=1e-14)


def test_escalation_smooth_weight():
    z = -0.5
    res = escalate(lambda M: cauchy_kernel_integral(lambda t: weight_eval(t, 0.5), z, make_grid(M)), tol=1e-13)
    assert res.M_used <= 1024


def test_escalation_near_critical_needs_more_nodes():
    z = -0.5
    smooth = escalate(lambda M: cauchy_kernel_integral(lambda t: weight_eval(t, 0.5), z, make_grid(M)), tol=1e-13)
    near = escalate(lambda M: cauchy_kernel_integral(lambda t: weight_eval(t, 0.95), z, make_grid(M)), tol=1e-13)
    assert near.M_used > smooth.M_used
    assert near.M_used <= 65536


def test_escalation_pole_on_circle():
    z = np.exp(0.3j)
    with pytest.raises(ConvergenceError):
        escalate(lambda M: cauchy_kernel_integral(lambda t: t, z, make_grid(M)), tol=1e-12)


def test_nodes_for_annulus_monotone():
    assert nodes_for_annulus(0.5) <= nodes_for_annulus(0.9) <= nodes_for_annulus(0.99)

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isingcorr.correlations import nextdiag_elliptic
from isingcorr.errors import DegeneracyError, DomainError
from isingcorr.determinants import (
    assemble_Y,
    biorth_gram,
    biorth_solve,
    bordered_matrix,
    bordered_toeplitz_det,
    lu_det,
    toeplitz_det,
    toeplitz_matrix,
)
from isingcorr.painleve import critical_kappa2, critical_system
from isingcorr.quadrature import make_grid
from isingcorr.weight import border_moments, make_params_sk, moment_a, moment_a_dual, weight_eval


def _cofactor_det(A):
    n = len(A)
    total = 0.0
    for perm in itertools.permutations(range(n)):
        sign = np.linalg.det(np.eye(n)[list(perm)])
        total += sign * np.prod([A[i][perm[i]] for i in range(n)])
    return total


def test_lu_det_examples():
    assert lu_det(np.eye(4)) == (1.0, False)
    assert lu_det(np.diag([2.0, 3.0, -1.0]))[0] == pytest.approx(-6.0)
    det, singular = lu_det([[1.0, 2.0], [2.0, 4.0]])
    assert singular and det == 0.0
    with pytest.raises(DomainError):
        lu_det(np.ones((2, 3)))


@settings(max_examples=30)
@given(st.lists(st.floats(min_value=-5, max_value=5), min_size=9, max_size=9))
def test_lu_det_vs_cofactor(entries):
    A = np.array(entries).reshape(3, 3)
    det, singular = lu_det(A)
    if not singular:
        assert det == pytest.approx(_cofactor_det(A), abs=1e-12 * max(1.0, np.max(np.abs(A)) ** 3))


def test_toeplitz_examples():
    assert toeplitz_det(0, k=0.5) == 1.0
    assert toeplitz_det(1, k=0.5) == pytest.approx(moment_a(0, 0.5))
    assert toeplitz_det(2, k=1.0) == pytest.approx(16 / (3 * math.pi**2), rel=1e-14)


def test_toeplitz_matrix_layout():
    T = toeplitz_matrix(3, lambda n: float(n), epsilon=1)
    assert T[2, 0] == 1.0 and T[0, 2] == -3.0 and T[1, 1] == -1.0


@pytest.mark.parametrize("N", range(1, 8))
def test_critical_toeplitz_gamma_product(N):
    # I_N = prod_{n<N} 1/kappa_n^2
    expected = math.prod(1 / critical_kappa2(n) for n in range(N))
    assert toeplitz_det(N, k=1.0) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("k", [0.5, 2.0])
@pytest.mark.parametrize("n", range(0, 7))
@pytest.mark.parametrize("eps", [0, 1, -2])
def test_dual_toeplitz_identity(k, n, eps):
    lhs = toeplitz_det(n, eps, a=lambda m: moment_a_dual(m, k))
    rhs = (-1) ** n * toeplitz_det(n, -1 - eps, k=k)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-14)


def test_bordered_examples():
    p = make_params_sk(2.0, 1.0)
    b = border_moments(p, 1).values
    a0, a1 = moment_a(0, p.k), moment_a(1, p.k)
    assert bordered_toeplitz_det(1, p) == pytest.approx(b[0])
    assert bordered_toeplitz_det(2, p) == pytest.approx(a0 * b[0] - a1 * b[1], rel=1e-14)
    M = bordered_matrix(2, lambda n: moment_a(n, p.k), b)
    assert M[0, 1] == b[1] and M[1, 0] == a1


@pytest.mark.parametrize("S, Sb", [(2.0, 1.0), (1.0, 0.5)])
def test_bordered_vs_elliptic(S, Sb):
    p = make_params_sk(S, Sb)
    for N in (1, 2):
        assert bordered_toeplitz_det(N, p) == pytest.approx(nextdiag_elliptic(N, p), abs=1e-9)


def test_biorth_initial():
    s = biorth_solve(0, 0.5)
    a0 = moment_a(0, 0.5)
    assert s.kappa == pytest.approx(a0**-0.5)
    assert s.phi[0] == s.phistar[0] == s.kappa
    assert s.r == 1.0 and s.rbar == 1.0


def test_biorth_critical():
    s = biorth_solve(2, 1.0)
    assert s.r == pytest.approx(-1 / 15, rel=1e-12)
    assert s.rbar == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("k", [0.5, 3.0])
def test_biorth_structure(k):
    s = biorth_solve(4, k)
    assert s.phi[-1] == pytest.approx(s.kappa)
    assert s.phistar[0] == pytest.approx(s.kappa)
    assert s.r == pytest.approx(s.phi[0] / s.kappa)
    assert s.rbar == pytest.approx(s.phistar[-1] / s.kappa)
    np.testing.assert_array_equal(s.phibar, s.phistar[::-1])


def test_biorthonormality_under_quadrature():
    k = 0.5
    snaps = [biorth_solve(n, k) for n in range(5)]
    g = make_grid(1024)
    zeta = g.nodes
    w = weight_eval(zeta, k)
    G = np.empty((5, 5), dtype=complex)
    for i, sm in enumerate(snaps):
        for j, sn in enumerate(snaps):
            G[i, j] = np.mean(w * sm.eval_phi(zeta) * np.polynomial.polynomial.polyval(1 / zeta, sn.phibar))
    assert np.max(np.abs(G - np.eye(5))) < 1e-9
    assert np.max(np.abs(biorth_gram(snaps, lambda n: moment_a(n, k)) - np.eye(5))) < 1e-10


def test_biorth_degenerate():
    with pytest.raises(DegeneracyError):
        biorth_solve(2, a=lambda n: 1.0)


def test_assemble_Y_initial_column():
    Y = assemble_Y(0, -0.5, 2.0)
    k0 = biorth_solve(0, 2.0).kappa
    assert Y[0, 0] == pytest.approx(k0) and Y[1, 0] == pytest.approx(k0)


@pytest.mark.parametrize("z", [-0.5, 0.3 + 0.4j, -2.0, 1.5j])
def test_assemble_Y_regular(z):
    Y = assemble_Y(3, z, 0.5)
    assert np.all(np.isfinite(Y))
    assert abs(np.linalg.det(Y)) > 1e-8


def test_assemble_Y_near_critical_matches_closed_forms():
    n, z = 2, -2.0
    cs = critical_system(n, z)
    Y = assemble_Y(n, z, 1.0)
    from isingcorr.weight import weight_continued

    w = complex(weight_continued(z, 1.0))
    assert Y[0, 0].real == pytest.approx(cs.phi, rel=1e-10)
    assert Y[1, 0].real == pytest.approx(cs.phistar, rel=1e-10)
    assert (Y[0, 1] * w).real == pytest.approx(cs.eps, rel=1e-9)
    assert (-Y[1, 1] * w).real == pytest.approx(cs.epsstar, rel=1e-9)

"""Toeplitz and bordered Toeplitz determinants and the bi-orthogonal system.

Everything here works from a moment callable ``a(n)`` (default: the closed-form
Ising moments), so the same code evaluates the direct and dual systems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegeneracyError, DomainError, RegimeError
from .weight import DEFAULT_CRITICAL_BAND, IsingParams, border_moments, moment_a, moment_a_dual

Moments = Callable[[int], float]

SINGULAR_RTOL = 1e-14


def lu_det(matrix) -> tuple[complex | float, bool]:
    """Determinant by Gaussian elimination with partial pivoting.

    Returns
    -------
    det : float or complex
        ``0`` when the matrix is numerically singular.
    singular : bool
        True if a pivot fell below ``1e-14`` times the largest entry.

    Raises
    ------
    DomainError
        For a non-square input.
    """
    A = np.array(matrix, dtype=complex if np.iscomplexobj(matrix) else float, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"lu_det needs a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n == 0:
        return 1.0, False
    scale = float(np.max(np.abs(A))) or 1.0
    det = 1.0
    for col in range(n):
        piv = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[piv, col]) <= SINGULAR_RTOL * scale:
            return 0.0 * det, True
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            det = -det
        det = det * A[col, col]
        if col + 1 < n:
            f = A[col + 1:, col] / A[col, col]
            A[col + 1:, col:] -= np.outer(f, A[col, col:])
    return det, False


def _moments(k: float, which: str = "direct", critical_band: float = DEFAULT_CRITICAL_BAND) -> Moments:
    if which == "direct":
        return lambda n: moment_a(n, k, critical_band)
    if which == "dual":
        return lambda n: moment_a_dual(n, k, critical_band=critical_band)
    raise ValueError(f"unknown weight {which!r}")


def toeplitz_matrix(N: int, a: Moments, epsilon: int = 0) -> np.ndarray:
    """``T[j, i] = a(-epsilon + j - i)`` for ``0 <= i, j < N``."""
    cache = {m: a(m) for m in range(-epsilon - N + 1, -epsilon + N)}
    return np.array([[cache[-epsilon + j - i] for i in range(N)] for j in range(N)], dtype=float)


def toeplitz_det(N: int, epsilon: int = 0, k: float | None = None, a: Optional[Moments] = None,
                 critical_band: float = DEFAULT_CRITICAL_BAND) -> float:
    """``I^epsilon_N = det[a_{-epsilon+j-i}]`` of order ``N`` (1 for ``N = 0``).

    Pass either ``k`` (Ising moments) or a moment callable ``a``.
    """
    if N < 0:
        raise DomainError("order must be >= 0")
    if N == 0:
        return 1.0
    if a is None:
        if k is None:
            raise DomainError("need k or a moment callable")
        a = _moments(k, critical_band=critical_band)
    det, _ = lu_det(toeplitz_matrix(N, a, epsilon))
    return float(det)


def bordered_matrix(N: int, a: Moments, b) -> np.ndarray:
    """Row ``i``: ``a_{i-c}`` for ``c < N-1``, then ``b_{N-1-i}``."""
    M = np.empty((N, N))
    for i in range(N):
        for c in range(N - 1):
            M[i, c] = a(i - c)
        M[i, N - 1] = b[N - 1 - i]
    return M


def bordered_toeplitz_det(N: int, params: IsingParams, which: str = "direct", branch: str = "continued",
                          a: Optional[Moments] = None, b=None, tol: float = 1e-14,
                          nodes_cap: int = 65536, critical_band: float = DEFAULT_CRITICAL_BAND) -> float:
    """Next-to-diagonal bordered Toeplitz determinant of order ``N``.

    ``which="dual"`` uses the dual moments and border (disorder correlation).
    ``a``/``b`` override the moments (``b`` indexable for ``0..N-1``).
    """
    if N < 1:
        raise DomainError("bordered determinant needs N >= 1")
    if a is None:
        a = _moments(params.k, which, critical_band)
    if b is None:
        b = border_moments(params, N - 1, which, branch, tol=tol, nodes_cap=nodes_cap,
                           critical_band=critical_band)
    det, _ = lu_det(bordered_matrix(N, a, b))
    return float(det)


@dataclass(frozen=True)
class BiorthSnapshot:
    """Bi-orthonormal pair of order ``n`` (ascending coefficient arrays).

    ``phistar`` holds the coefficients of ``phi*_n(z) = z**n phibar_n(1/z)``.
    """

    n: int
    phi: np.ndarray
    phistar: np.ndarray
    kappa: float
    r: float
    rbar: float
    I_n: float
    I_next: float

    @property
    def phibar(self) -> np.ndarray:
        return self.phistar[::-1]

    def eval_phi(self, z):
        return np.polynomial.polynomial.polyval(z, self.phi)

    def eval_phistar(self, z):
        return np.polynomial.polynomial.polyval(z, self.phistar)


def biorth_solve(n: int, k: float | None = None, a: Optional[Moments] = None,
                 critical_band: float = DEFAULT_CRITICAL_BAND) -> BiorthSnapshot:
    """Construct ``phi_n`` and ``phi*_n`` directly from the moment matrix.

    Monic coefficients solve ``sum_i c_i a_{j-i} = -a_{j-n}`` (``j < n``) and
    the transposed system for ``phibar_n``; both are scaled by
    ``kappa_n = sqrt(I_n / I_{n+1})``.

    Raises
    ------
    DegeneracyError
        If ``I_n`` or ``I_{n+1}`` vanishes.
    RegimeError
        If ``I_n / I_{n+1} <= 0`` (no real positive ``kappa_n``).
    """
    if n < 0:
        raise DomainError("order must be >= 0")
    if a is None:
        if k is None:
            raise DomainError("need k or a moment callable")
        a = _moments(k, critical_band=critical_band)
    T = toeplitz_matrix(n + 1, a)
    I_n, sing_n = lu_det(T[:n, :n]) if n else (1.0, False)
    I_next, sing_next = lu_det(T)
    if sing_n or sing_next:
        raise DegeneracyError(f"Toeplitz determinant vanishes at order {n if sing_n else n + 1}",
                              order=n if sing_n else n + 1)
    ratio = float(I_n) / float(I_next)
    if not ratio > 0.0:
        raise RegimeError(f"I_n/I_(n+1) = {ratio:.6g} is not positive at n={n}")
    kappa = math.sqrt(ratio)
    if n == 0:
        c = np.ones(1)
        d = np.ones(1)
    else:
        A = T[:n, :n]
        c = np.append(np.linalg.solve(A, -T[:n, n]), 1.0)
        d = np.append(np.linalg.solve(A.T, -T[n, :n]), 1.0)
    phi = kappa * c
    phistar = (kappa * d)[::-1]
    return BiorthSnapshot(n, phi, phistar, kappa, float(c[0]), float(d[0]), float(I_n), float(I_next))


def biorth_gram(snaps: list[BiorthSnapshot], a: Moments) -> np.ndarray:
    """``G[m, n] = int w phi_m(zeta) phibar_n(1/zeta) dzeta/(2 pi i zeta)`` from moments."""
    size = len(snaps)
    G = np.empty((size, size))
    for i, sm in enumerate(snaps):
        for j, sn in enumerate(snaps):
            pb = sn.phibar
            G[i, j] = sum(sm.phi[p] * pb[q] * a(q - p) for p in range(len(sm.phi)) for q in range(len(pb)))
    return G


def assemble_Y(n: int, z: complex, k: float, branch: str = "continued",
               critical_band: float = DEFAULT_CRITICAL_BAND) -> np.ndarray:
    """``Y_n(z) = [[phi_n, eps_n / w], [phi*_n, -eps*_n / w]]`` at an off-circle point.

    ``w`` is the weight continued off the circle by its closed expression.
    """
    from .painleve import epsilon_direct, epsilon_star_direct
    from .weight import weight_continued

    snap = biorth_solve(n, k, critical_band=critical_band)
    w = complex(weight_continued(z, k))
    if w == 0:
        raise DomainError("weight vanishes at z")
    eps = epsilon_direct(n, z, k, branch=branch, snapshot=snap, critical_band=critical_band)
    epss = epsilon_star_direct(n, z, k, branch=branch, snapshot=snap, critical_band=critical_band)
    return np.array([[snap.eval_phi(z), eps / w], [snap.eval_phistar(z), -epss / w]], dtype=complex)

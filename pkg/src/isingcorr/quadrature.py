"""Trapezoidal quadrature on the unit circle.

Every integral here has the form ``int_T f(zeta) dzeta / (2 pi i zeta)``, i.e.
the mean of ``f`` over the circle. For ``f`` analytic in an annulus
``rho < |zeta| < 1/rho`` the M-point rule converges like ``rho**M``.

Nodes are ``zeta_j = exp(i theta_j)`` with ``theta_j = -pi + offset + 2 pi j / M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, EvaluationError, NearSingularError

CircleFunction = Callable[[np.ndarray], np.ndarray]

M_START = 256
M_CAP = 65536
GUARD_FACTOR = 10.0


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform grid of ``M`` nodes on the unit circle (``M`` a power of two)."""

    M: int
    offset: float = 0.0
    theta: np.ndarray = field(init=False, repr=False, compare=False)
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        theta = -math.pi + self.offset + 2.0 * math.pi * np.arange(self.M) / self.M
        nodes = np.exp(1j * theta)
        theta.flags.writeable = False
        nodes.flags.writeable = False
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "nodes", nodes)

    @property
    def guard_band(self) -> float:
        """Half-width of the annulus around the circle rejected by Cauchy integrals."""
        return GUARD_FACTOR * 2.0 * math.pi / self.M


def _is_pow2(M: int) -> bool:
    return M > 0 and (M & (M - 1)) == 0


_GRID_CACHE: dict[tuple[int, float], QuadratureGrid] = {}


def make_grid(M: int, offset: float = 0.0) -> QuadratureGrid:
    """Return the (cached, immutable) grid with ``M`` nodes.

    ``offset`` shifts every angle; ``offset = pi / M`` gives the staggered grid
    used for grid-invariance checks.
    """
    if not isinstance(M, (int, np.integer)) or not _is_pow2(int(M)):
        raise ValueError(f"node count must be a power of two, got {M!r}")
    key = (int(M), float(offset))
    grid = _GRID_CACHE.get(key)
    if grid is None:
        grid = QuadratureGrid(int(M), float(offset))
        _GRID_CACHE[key] = grid
    return grid


def _sample(f: CircleFunction, grid: QuadratureGrid) -> np.ndarray:
    vals = np.asarray(f(grid.nodes), dtype=complex)
    if vals.shape == ():
        vals = np.full(grid.M, complex(vals))
    bad = ~np.isfinite(vals)
    if bad.any():
        j = int(np.argmax(bad))
        raise EvaluationError(f"non-finite integrand at node {grid.nodes[j]!r}", node=grid.nodes[j])
    return vals


def fourier_coeff(f: CircleFunction, n: int, grid: QuadratureGrid) -> complex:
    """Trapezoidal value of ``int_T zeta**n f(zeta) dzeta / (2 pi i zeta)``.

    This is the coefficient of ``zeta**(-n)`` in the Laurent expansion of ``f``.

    Raises
    ------
    EvaluationError
        If ``f`` is not finite at some node.
    """
    vals = _sample(f, grid)
    return complex(np.mean(grid.nodes**n * vals))


def fourier_coeffs_from_values(vals: np.ndarray, ns: Iterable[int], grid: QuadratureGrid) -> np.ndarray:
    """Batch version of :func:`fourier_coeff` from precomputed node values (one FFT)."""
    ns = np.asarray(list(ns), dtype=int)
    if ns.size and np.max(np.abs(ns)) >= grid.M // 2:
        raise ValueError("requested index aliases on this grid; increase M")
    spec = np.fft.ifft(vals)
    # zeta_j**n = exp(i n (offset - pi)) * exp(2 pi i j n / M)
    phase = np.exp(1j * ns * (grid.offset - math.pi))
    return phase * spec[ns % grid.M]


def fourier_coeffs(f: CircleFunction, ns: Iterable[int], grid: QuadratureGrid) -> np.ndarray:
    """Many values of :func:`fourier_coeff` at once."""
    return fourier_coeffs_from_values(_sample(f, grid), ns, grid)


def check_guard(z: complex, grid: QuadratureGrid) -> None:
    """Raise :class:`NearSingularError` if ``z`` lies in the grid's guard band."""
    if abs(abs(z) - 1.0) < grid.guard_band:
        raise NearSingularError(
            f"|z|={abs(z):.6g} is within {grid.guard_band:.3g} of the circle at M={grid.M}",
            z=z,
            nodes=grid.M,
        )


def cauchy_kernel_integral(f: CircleFunction, z: complex, grid: QuadratureGrid) -> complex:
    """Trapezoidal value of ``int_T (zeta + z)/(zeta - z) f(zeta) dzeta / (2 pi i zeta)``.

    Raises
    ------
    NearSingularError
        If ``||z| - 1|`` is below ``10 * 2 pi / M``.
    """
    check_guard(z, grid)
    zeta = grid.nodes
    vals = _sample(f, grid)
    return complex(np.mean((zeta + z) / (zeta - z) * vals))


def kernel_series(laurent: Callable[[int], float], z: complex, tol: float = 1e-16, max_terms: int = 20000,
                  scale: float | None = None) -> complex:
    """Cauchy-kernel integral summed from the Laurent coefficients of ``f``.

    ``laurent(m)`` is the coefficient of ``zeta**m`` in ``f``. Inside the circle
    the kernel expands as ``1 + 2 sum (z/zeta)**m``, outside as
    ``-1 - 2 sum (zeta/z)**m``. Used where the integrand has branch points on
    the circle (``k = 1``) and trapezoidal sums converge only algebraically.

    ``scale`` bounds ``|laurent(m)|`` (e.g. ``sup |f|`` on the circle); without
    it the largest coefficient met so far stands in, after a minimum of
    ``16`` terms.
    """
    r = abs(z)
    if r == 1.0:
        raise NearSingularError("kernel series diverges on the circle", z=z)
    inside = r < 1.0
    q = z if inside else 1.0 / z
    sgn = 1 if inside else -1
    total = complex(laurent(0))
    bound = abs(total) if scale is None else scale
    min_terms = 16 if scale is None else 1
    power = 1.0 + 0j
    for m in range(1, max_terms):
        power *= q
        c = laurent(sgn * m)
        bound = max(bound, abs(c))
        total += 2.0 * power * c
        # individual coefficients may vanish (orthogonality), so test the
        # geometric tail against a coefficient bound
        tail = 2.0 * abs(power) * bound / (1.0 - abs(q))
        if m >= min_terms and tail <= tol * max(abs(total), bound, 1e-300):
            break
    else:
        raise ConvergenceError(f"kernel series not converged after {max_terms} terms", last=total)
    return total if inside else -total


@dataclass(frozen=True)
class Escalation:
    """Result of node doubling: final value, node count and last change."""

    value: complex | np.ndarray
    M_used: int
    est_error: float


def escalate_until_converged(
    thunk: Callable[[int], complex | np.ndarray],
    tol: float,
    M_start: int = M_START,
    M_cap: int = M_CAP,
) -> tuple[complex | np.ndarray, int]:
    """Double ``M`` from ``M_start`` until successive values differ by < ``tol``.

    ``thunk(M)`` may return a scalar or an array (compared by max-abs change).
    Grid sizes at which the thunk raises :class:`NearSingularError` are skipped.

    Returns
    -------
    value, M_used

    Raises
    ------
    ConvergenceError
        When ``M`` would exceed ``M_cap`` without agreement.
    """
    res = escalate(thunk, tol, M_start, M_cap)
    return res.value, res.M_used


def escalate(thunk, tol: float, M_start: int = M_START, M_cap: int = M_CAP) -> Escalation:
    """Same as :func:`escalate_until_converged` but also reports the last change."""
    older = prev = None
    M = M_start
    while M <= M_cap:
        try:
            cur = thunk(M)
        except NearSingularError:
            older = prev = None
            M *= 2
            continue
        if prev is not None:
            change = float(np.max(np.abs(np.asarray(cur) - np.asarray(prev))))
            if change < tol:
                return Escalation(cur, M, change)
        older, prev = prev, cur
        M *= 2
    raise ConvergenceError(f"no agreement to {tol:g} up to M={M_cap}", previous=older, last=prev, nodes=M_cap)


def nodes_for_annulus(rho: float, target: float = 1e-17, M_start: int = M_START, M_cap: int = M_CAP) -> int:
    """Smallest power-of-two M >= M_start with ``rho**M < target``.

    ``rho < 1`` is the ratio of the inner radius of the analyticity annulus to 1
    (or its reciprocal outside). Raises :class:`ConvergenceError` above ``M_cap``.
    """
    M = M_start
    if rho <= 0.0:
        return M
    if rho >= 1.0:
        raise ConvergenceError("integrand not analytic in any annulus", nodes=M_cap)
    need = math.log(target) / math.log(rho)
    while M < need:
        M *= 2
    if M > M_cap:
        raise ConvergenceError(f"needs about {need:.0f} nodes, above the cap {M_cap}", nodes=M_cap)
    return M


def trig_poly(coeffs: Sequence[complex], lowest: int) -> CircleFunction:
    """Laurent polynomial ``sum c_j zeta**(lowest + j)`` as a circle function."""
    coeffs = np.asarray(coeffs, dtype=complex)

    def f(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        out = np.zeros_like(zeta)
        for j, c in enumerate(coeffs):
            out = out + c * zeta ** (lowest + j)
        return out

    return f

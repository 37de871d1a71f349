"""Model parameters, the Ising weights and their moments.

Conventions
-----------
The direct weight ``W(zeta; k)`` has Laurent coefficients ``a_n`` (coefficient
of ``zeta**n``), and the diagonal correlation is the Toeplitz determinant
``det[a_{j-i}]``. It is realised as

* ``k > 1``: ``sqrt(1 - zeta/k) / sqrt(1 - 1/(k zeta))``
* ``k < 1``: ``-zeta sqrt(1 - k/zeta) / sqrt(1 - k zeta)``
* ``k = 1``: both expressions coincide, ``sqrt(1 - zeta) / sqrt(1 - 1/zeta)``

with principal square roots. Both are analytic in the annulus between ``k``
and ``1/k`` and on the negative real axis, and unimodular on the circle. Note
``W(1) = 1`` for ``k > 1`` but ``W(1) = -1`` for ``k < 1``. The dual weight is
``W(zeta; 1/k)``.

The next-to-diagonal border elements ``b_n`` have a pole at ``z = -Sbar/S``.
By default they are returned as the analytic continuation from ``|z| > 1``
(``branch="continued"``); ``branch="literal"`` gives the plain contour
integral, which differs by the pole residue when ``S > Sbar``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import DomainError, NearSingularError
from .quadrature import (
    M_CAP,
    QuadratureGrid,
    escalate,
    fourier_coeffs_from_values,
    make_grid,
)
from .specfun import gamma_fn, gauss_2f1

DEFAULT_CRITICAL_BAND = 1e-8

Which = Literal["direct", "dual"]
Branch = Literal["continued", "literal"]


# ---------------------------------------------------------------------------
# Parameters


class Phase(enum.Enum):
    LOW_TEMPERATURE = "low-temperature"
    HIGH_TEMPERATURE = "high-temperature"
    CRITICAL = "critical"


def classify_phase(k: float, critical_band: float = DEFAULT_CRITICAL_BAND) -> Phase:
    """Phase of the deformation variable ``k``."""
    if k <= 0.0:
        raise DomainError(f"k must be positive, got {k!r}")
    if abs(k - 1.0) <= critical_band:
        return Phase.CRITICAL
    return Phase.LOW_TEMPERATURE if k > 1.0 else Phase.HIGH_TEMPERATURE


@dataclass(frozen=True)
class IsingParams:
    """Couplings in hyperbolic form.

    Attributes
    ----------
    S, Sbar : float
        ``sinh 2K`` and ``sinh 2Kbar``.
    C, Cbar : float
        ``cosh 2K`` and ``cosh 2Kbar``.
    k : float
        ``S * Sbar``.
    """

    S: float
    Sbar: float
    C: float
    Cbar: float
    k: float
    # image under the duality map, kept so the map is an exact involution
    _dual: "IsingParams | None" = field(default=None, compare=False, repr=False)

    @property
    def z(self) -> float:
        """Spectral point ``-Sbar/S`` of the next-to-diagonal correlation."""
        return -self.Sbar / self.S

    @property
    def isotropic(self) -> bool:
        return self.S == self.Sbar

    def phase(self, critical_band: float = DEFAULT_CRITICAL_BAND) -> Phase:
        return classify_phase(self.k, critical_band)


def make_params_sk(S: float, Sbar: float) -> IsingParams:
    """Parameters from ``S = sinh 2K`` and ``Sbar = sinh 2Kbar``."""
    if not (S > 0.0 and Sbar > 0.0):
        raise DomainError(f"S and Sbar must be positive, got {S!r}, {Sbar!r}")
    S = float(S)
    Sbar = float(Sbar)
    return IsingParams(S, Sbar, math.sqrt(1.0 + S * S), math.sqrt(1.0 + Sbar * Sbar), S * Sbar)


def make_params(K: float, Kbar: float) -> IsingParams:
    """Parameters from the reduced couplings ``K, Kbar > 0``."""
    if not (K > 0.0 and Kbar > 0.0):
        raise DomainError(f"couplings must be positive, got {K!r}, {Kbar!r}")
    return make_params_sk(math.sinh(2.0 * K), math.sinh(2.0 * Kbar))


def dual_params(p: IsingParams) -> IsingParams:
    """Duality map ``k -> 1/k, S -> 1/Sbar, Sbar -> 1/S`` (an exact involution)."""
    if p._dual is not None:
        return p._dual
    q = make_params_sk(1.0 / p.Sbar, 1.0 / p.S)
    object.__setattr__(q, "_dual", p)
    return q


def exchange_params(p: IsingParams) -> IsingParams:
    """Swap ``S`` and ``Sbar``."""
    return make_params_sk(p.Sbar, p.S)


# ---------------------------------------------------------------------------
# Weights


@dataclass(frozen=True)
class SemiclassicalData:
    """Logarithmic-derivative data ``w'/w = 2V/W = sum rho_j / (z - z_j)``.

    ``V`` and ``W`` are ascending coefficient tuples.
    """

    z: tuple[complex, complex, complex]
    rho: tuple[float, float, float]
    V: tuple[float, ...]
    W: tuple[float, ...]

    def log_derivative(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        return sum(r / (zeta - zj) for r, zj in zip(self.rho, self.z))


def semiclassical_data(k: float, which: Which = "direct") -> SemiclassicalData:
    """Singularities and residues of the weight's logarithmic derivative."""
    if k <= 0.0:
        raise DomainError("k must be positive")
    z2, z3 = (1.0 / k, k) if which == "direct" else (k, 1.0 / k)
    zs = (0.0, z2, z3)
    rho = (0.5, -0.5, 0.5)
    P = np.polynomial.polynomial
    W = P.polyfromroots(zs)
    twoV = np.zeros(1)
    for j in range(3):
        others = [zs[i] for i in range(3) if i != j]
        twoV = P.polyadd(twoV, rho[j] * P.polyfromroots(others))
    return SemiclassicalData(zs, rho, tuple(np.real(twoV) / 2.0), tuple(np.real(W)))


def _weight(z, k: float):
    z = np.asarray(z, dtype=complex)
    zero = z == 0
    zs = np.where(zero, 1.0, z)
    if k >= 1.0:
        w = np.sqrt(1.0 - zs / k) / np.sqrt(1.0 - 1.0 / (k * zs))
    else:
        w = -zs * np.sqrt(1.0 - k / zs) / np.sqrt(1.0 - k * zs)
    # branch point at the origin, where w ~ sqrt(z)
    return np.where(zero, 0.0, w)


def weight_continued(z, k: float, which: Which = "direct"):
    """Weight at any point off its cuts (the positive real axis outside the annulus).

    The same closed expression as on the circle, so it is the analytic
    continuation of the circle values along any ray that avoids the cuts.
    """
    if k <= 0.0:
        raise DomainError("k must be positive")
    return _weight(z, k if which == "direct" else 1.0 / k)


def weight_eval(zeta, k: float, which: Which = "direct"):
    """Weight on the unit circle (scalar or array).

    Raises
    ------
    DomainError
        If some ``|zeta| != 1`` or ``k == 1`` (branch points on the circle).
    """
    zeta_a = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(np.abs(zeta_a) - 1.0) > 1e-12):
        raise DomainError("weight_eval needs points on the unit circle")
    if k == 1.0:
        raise DomainError("weight has branch points on the circle at k = 1")
    out = weight_continued(zeta_a, k, which)
    return complex(out) if np.ndim(zeta) == 0 else out


def analyticity_ratio(k: float) -> float:
    """``min(k, 1/k)``: the weight is analytic for ``rho < |zeta| < 1/rho``."""
    return min(k, 1.0 / k)


# ---------------------------------------------------------------------------
# Moments a_n


def _gratio(a: float, b: float) -> float:
    """``Gamma(a) / Gamma(b)``, stable for large arguments."""
    if max(abs(a), abs(b)) < 150.0:
        return gamma_fn(a) / gamma_fn(b)
    return math.exp(math.lgamma(a) - math.lgamma(b))


def _a_closed(n: int, k: float) -> float:
    pi = math.pi
    if k > 1.0:
        x = 1.0 / (k * k)
        if n >= 0:
            return -_gratio(n - 0.5, n + 1) * gamma_fn(1.5) / pi * k ** (-n) * gauss_2f1(0.5, n - 0.5, n + 1, x)
        m = -n
        return _gratio(m + 0.5, m + 1) * gamma_fn(0.5) / pi * k ** (-m) * gauss_2f1(-0.5, m + 0.5, m + 1, x)
    x = k * k
    if n >= 1:
        return -_gratio(n - 0.5, n) * gamma_fn(0.5) / pi * k ** (n - 1) * gauss_2f1(-0.5, n - 0.5, n, x)
    m = -n
    return _gratio(m + 0.5, m + 2) * gamma_fn(1.5) / pi * k ** (m + 1) * gauss_2f1(0.5, m + 0.5, m + 2, x)


def moment_a_critical(n: int) -> float:
    """``a_n`` at ``k = 1``: ``2 / (pi (1 - 2n))``."""
    return 2.0 / (math.pi * (1 - 2 * n))


@lru_cache(maxsize=8192)
def moment_a(n: int, k: float, critical_band: float = DEFAULT_CRITICAL_BAND) -> float:
    """Fourier coefficient ``a_n`` of the direct weight from Gamma ratios and 2F1.

    Within ``critical_band`` of ``k = 1`` the exact critical value is returned.
    """
    n = int(n)
    if classify_phase(k, critical_band) is Phase.CRITICAL:
        return moment_a_critical(n)
    return _a_closed(n, float(k))


def moment_a_dual(n: int, k: float, route: Literal["reflection", "inverse"] = "reflection",
                  critical_band: float = DEFAULT_CRITICAL_BAND) -> float:
    """Dual moment ``a~_n(k)``.

    ``route="reflection"`` uses ``-a_{1-n}(k)``; ``route="inverse"`` uses
    ``a_n(1/k)``. The two agree identically.
    """
    if route == "reflection":
        return -moment_a(1 - n, k, critical_band)
    if route == "inverse":
        return moment_a(n, 1.0 / k, critical_band)
    raise ValueError(f"unknown route {route!r}")


def _weight_values(k: float, grid: QuadratureGrid, which: Which) -> np.ndarray:
    return weight_continued(grid.nodes, k, which)


def moment_a_quadrature(n, k: float, M: int | None = None, which: Which = "direct",
                        offset: float = 0.0) -> complex | np.ndarray:
    """Trapezoidal moments ``a_n`` (complex; imaginary part is rounding).

    ``n`` may be an int or a sequence. ``M`` defaults to the node count that
    resolves the annulus ``min(k,1/k) < |zeta| < max(k,1/k)`` to 1e-17.
    """
    if k == 1.0:
        raise DomainError("quadrature moments are not available at k = 1")
    from .quadrature import nodes_for_annulus

    ns = np.atleast_1d(np.asarray(n, dtype=int))
    if M is None:
        M = nodes_for_annulus(analyticity_ratio(k), M_start=max(256, 4 * int(np.max(np.abs(ns)) + 1)))
    grid = make_grid(M, offset)
    # a_n is the coefficient of zeta**n, i.e. the integral of zeta**(-n) W
    out = fourier_coeffs_from_values(_weight_values(k, grid, which), -ns, grid)
    return complex(out[0]) if np.ndim(n) == 0 else out


@dataclass(frozen=True)
class MomentTable:
    """Moments over the index window ``[n_min, n_max]``."""

    k: float
    n_min: int
    n_max: int
    values: tuple[float, ...]
    source: str
    which: str = "direct"
    imag_residue: float = 0.0

    def __getitem__(self, n: int) -> float:
        if not self.n_min <= n <= self.n_max:
            raise KeyError(f"index {n} outside [{self.n_min}, {self.n_max}]")
        return self.values[n - self.n_min]

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values)


def moment_table(k: float, n_min: int, n_max: int, source: Literal["closed-form", "quadrature"] = "closed-form",
                 which: Which = "direct", M: int | None = None, imag_tol: float = 1e-10,
                 critical_band: float = DEFAULT_CRITICAL_BAND) -> MomentTable:
    """Build a :class:`MomentTable`.

    Raises
    ------
    DomainError
        If quadrature moments carry an imaginary part above ``imag_tol``.
    """
    ns = range(n_min, n_max + 1)
    if source == "closed-form":
        if which == "direct":
            vals = tuple(moment_a(n, k, critical_band) for n in ns)
        else:
            vals = tuple(moment_a_dual(n, k, critical_band=critical_band) for n in ns)
        return MomentTable(k, n_min, n_max, vals, source, which)
    if source == "quadrature":
        q = moment_a_quadrature(list(ns), k, M, which)
        resid = float(np.max(np.abs(q.imag))) if len(q) else 0.0
        if resid > imag_tol:
            raise DomainError(f"quadrature moments not real: residue {resid:.3g}")
        return MomentTable(k, n_min, n_max, tuple(float(v) for v in q.real), source, which, resid)
    raise ValueError(f"unknown source {source!r}")


def duality_defect(direct: MomentTable, dual: MomentTable) -> float:
    """Max ``|a~_n + a_{1-n}|`` over indices present in both tables."""
    worst = 0.0
    for n in range(dual.n_min, dual.n_max + 1):
        m = 1 - n
        if direct.n_min <= m <= direct.n_max:
            worst = max(worst, abs(dual[n] + direct[m]))
    return worst


# ---------------------------------------------------------------------------
# Border moments b_n, b~_n and g_j


@dataclass(frozen=True)
class BorderMoments:
    """``b_0 .. b_{n_max}`` with quadrature diagnostics."""

    values: tuple[float, ...]
    imag_residue: float
    est_error: float
    M_used: int | None
    which: str
    branch: str

    def __getitem__(self, n: int) -> float:
        return self.values[n]


def _check_offcircle(p: IsingParams) -> None:
    if p.isotropic:
        raise NearSingularError("S = Sbar puts the pole of b_n on the circle; use the isotropic limit", z=p.z)


def _b_prefactor(p: IsingParams, which: Which) -> float:
    # b_n = pref * int zeta**n w(zeta) / (zeta - z) dzeta/(2 pi i zeta)
    return p.Cbar / p.S if which == "direct" else p.C * p.Sbar / p.S


def _b_residue(n: int, p: IsingParams, which: Which) -> float:
    # pole residue of the literal integrand at zeta = z
    z = p.z
    return _b_prefactor(p, which) * z ** (n - 1) * float(np.real(weight_continued(z, p.k, which)))


def border_moments(p: IsingParams, n_max: int, which: Which = "direct", branch: Branch = "continued",
                   tol: float = 1e-14, nodes_cap: int = M_CAP,
                   critical_band: float = DEFAULT_CRITICAL_BAND) -> BorderMoments:
    """``b_n`` (or ``b~_n`` for ``which="dual"``) for ``n = 0 .. n_max``.

    Off the critical band the integrals are evaluated together by FFT with node
    doubling until successive grids agree to ``tol``; in the band they are
    summed from the exact critical moments.

    Raises
    ------
    NearSingularError
        For isotropic parameters (pole on the circle).
    ConvergenceError
        If node doubling reaches ``nodes_cap``.
    """
    _check_offcircle(p)
    z = p.z
    pref = _b_prefactor(p, which)
    ns = np.arange(n_max + 1)
    inside = abs(z) < 1.0

    if classify_phase(p.k, critical_band) is Phase.CRITICAL:
        vals = [pref * _b_series_critical(int(n), z, which) for n in ns]
        literal = np.asarray(vals, dtype=float)
        resid, err, M_used = 0.0, 0.0, None
    else:
        kw = p.k if which == "direct" else 1.0 / p.k

        def thunk(M):
            grid = make_grid(M)
            zeta = grid.nodes
            vals = weight_continued(zeta, kw) / (zeta - z)
            return pref * fourier_coeffs_from_values(vals, ns, grid)

        M0 = 256
        while M0 // 2 <= n_max + 1:
            M0 *= 2
        res = escalate(thunk, tol * max(1.0, abs(pref)), M_start=M0, M_cap=nodes_cap)
        c = np.asarray(res.value)
        resid = float(np.max(np.abs(c.imag)))
        literal = c.real
        err, M_used = res.est_error, res.M_used
    if inside and branch == "continued":
        literal = literal - np.array([_b_residue(int(n), p, which) for n in ns])
    return BorderMoments(tuple(float(v) for v in literal), resid, err, M_used, which, branch)


def _b_series_critical(n: int, z: float, which: Which) -> float:
    # literal int zeta**n W / (zeta - z) dzeta/(2 pi i zeta) from exact k=1 moments
    a = moment_a_critical if which == "direct" else (lambda m: -moment_a_critical(1 - m))
    total = 0.0
    if abs(z) > 1.0:
        # 1/(zeta - z) = -(1/z) sum (zeta/z)**m ; int zeta**(n+m) W = a_{-n-m}
        q = 1.0 / z
        power = 1.0
        for m in range(200000):
            term = power * a(-n - m)
            total += term
            if abs(term) < 1e-18 * abs(total) and m > 3:
                break
            power *= q
        return -total / z
    # 1/(zeta - z) = (1/zeta) sum (z/zeta)**m ; int zeta**(n-1-m) W = a_{m+1-n}
    power = 1.0
    for m in range(200000):
        term = power * a(m + 1 - n)
        total += term
        if abs(term) < 1e-18 * abs(total) and m > 3:
            break
        power *= z
    return total


def moment_b(n: int, p: IsingParams, branch: Branch = "continued", **kw) -> float:
    """Single border element ``b_n``; see :func:`border_moments`."""
    if n < 0:
        raise DomainError("b_n is defined for n >= 0")
    return border_moments(p, n, "direct", branch, **kw)[n]


def moment_b_dual(n: int, p: IsingParams, branch: Branch = "continued", **kw) -> float:
    """Single dual border element ``b~_n``; see :func:`border_moments`."""
    if n < 0:
        raise DomainError("b~_n is defined for n >= 0")
    return border_moments(p, n, "dual", branch, **kw)[n]


def moment_b_real(n: int, p: IsingParams, branch: Branch = "continued", M: int | None = None) -> float:
    """``b_n`` from its real angular-integral form (independent of the contour code).

    The integrand is a smooth periodic function of the angle, so the equally
    spaced rule converges geometrically.
    """
    _check_offcircle(p)
    if p.k == 1.0:
        raise DomainError("angular form is singular at k = 1")
    S, Sb, k, Cb = p.S, p.Sbar, p.k, p.Cbar
    if M is None:
        rho = max(analyticity_ratio(k), min(abs(p.z), 1.0 / abs(p.z)))
        from .quadrature import nodes_for_annulus

        M = nodes_for_annulus(rho, M_start=max(256, 4 * (n + 2)))
    t = 2.0 * math.pi * np.arange(M) / M
    num = (k * Sb - S) * np.cos(n * t) + k * S * np.cos((n - 1) * t) - Sb * np.cos((n + 1) * t)
    den = np.sqrt(k * k + 1.0 - 2.0 * k * np.cos(t)) * (S * S + Sb * Sb + 2.0 * k * np.cos(t))
    val = Cb * float(np.mean(num / den))
    if abs(p.z) < 1.0 and branch == "continued":
        val -= _b_residue(n, p, "direct")
    return val


def g_integral(j: int, z: complex, k: float, weight=None, M: int | None = None, tol: float = 1e-14,
               branch: Branch = "literal") -> complex:
    """``g_j(z) = -2z int zeta**j w(zeta) / (zeta - z) dzeta/(2 pi i zeta)``.

    ``weight`` overrides the Ising weight (any vectorised circle function).
    ``branch="continued"`` removes the residue at ``z`` for ``|z| < 1`` (Ising
    weight only).

    Raises
    ------
    NearSingularError
        If ``z`` is in the quadrature guard band.
    """
    if j < 0:
        raise DomainError("g_j needs j >= 0")
    from .quadrature import check_guard

    w = (lambda zeta: weight_continued(zeta, k)) if weight is None else weight

    def thunk(MM):
        grid = make_grid(MM)
        check_guard(z, grid)
        zeta = grid.nodes
        return complex(-2.0 * z * np.mean(zeta**j * np.asarray(w(zeta), dtype=complex) / (zeta - z)))

    if M is not None:
        val = thunk(M)
    else:
        val = escalate(thunk, tol).value
    if branch == "continued" and abs(z) < 1.0:
        if weight is not None:
            raise ValueError("continuation needs the Ising weight")
        val += 2.0 * z**j * complex(weight_continued(z, k))
    return val

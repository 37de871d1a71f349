"""Recurrences for the bi-orthogonal system of the Ising weight.

* the coupled nonlinear recurrences for the reflection coefficients
  ``r_N, rbar_N`` with the auxiliary ``kappa_N, I_N``;
* the associated functions ``eps_n, eps*_n`` by direct quadrature and the
  linear three-term recurrence for ``eps*_n``;
* the closed forms at the critical point ``k = 1`` and the leading-order
  behaviour as ``k -> infinity`` and ``k -> 0``.

Forward stepping of the nonlinear recurrences amplifies perturbations roughly
like ``k**(-2N)`` or ``k**(2N)``, so :func:`run_recurrence` chooses a working
precision from ``k`` and ``N_max`` and switches to mpmath when double
precision would not hold about ten digits.
"""

from __future__ import annotations

import math
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Literal, Optional

import mpmath
import numpy as np

from .determinants import BiorthSnapshot, biorth_solve
from .errors import ConvergenceError, DegeneracyError, DomainError, RegimeError
from .quadrature import cauchy_kernel_integral, escalate, kernel_series, make_grid
from .specfun import ellip_KE, gauss_2f1, pochhammer
from .weight import (
    DEFAULT_CRITICAL_BAND,
    Phase,
    classify_phase,
    moment_a,
    weight_continued,
)

InitialForm = Literal["moments", "phase", "landen"]


# ---------------------------------------------------------------------------
# Nonlinear recurrence


@dataclass(frozen=True)
class RecurrenceState:
    """Recurrence data at index ``N``: ``r_{N-1}, r_N, rbar_{N-1}, rbar_N, kappa_N, I_N``.

    Values are floats or mpmath numbers (extended-precision runs).
    """

    N: int
    r_prev: object
    r_cur: object
    rbar_prev: object
    rbar_cur: object
    kappa: object
    I: object
    k: object


def _is_zero(x) -> bool:
    return x == 0


def step_r(state: RecurrenceState):
    """``r_{N+1}`` from the 2/1 recurrence.

    Raises
    ------
    DegeneracyError
        If ``(2N+3)(1 - r_N rbar_N)`` vanishes.
    """
    N, k = state.N, state.k
    r, rp, rb, rbp = state.r_cur, state.r_prev, state.rbar_cur, state.rbar_prev
    lead = (2 * N + 3) * (1 - r * rb)
    if _is_zero(lead):
        raise DegeneracyError(f"leading coefficient of the r recurrence vanishes at N={N}", order=N)
    return (2 * N * (k + 1 / k + (2 * N - 1) * r * rbp) * r - (2 * N - 3) * ((2 * N - 1) * r * rb + 1) * rp) / lead


def step_rbar(state: RecurrenceState):
    """``rbar_{N+1}`` from the 1/2 recurrence.

    Raises
    ------
    DegeneracyError
        If ``(2N+1)(1 - r_N rbar_N)`` vanishes.
    """
    N, k = state.N, state.k
    r, rp, rb, rbp = state.r_cur, state.r_prev, state.rbar_cur, state.rbar_prev
    lead = (2 * N + 1) * (1 - r * rb)
    if _is_zero(lead):
        raise DegeneracyError(f"leading coefficient of the rbar recurrence vanishes at N={N}", order=N)
    return (2 * N * (k + 1 / k - (2 * N - 3) * rb * rp) * rb - (2 * N - 1) * (1 - (2 * N + 1) * r * rb) * rbp) / lead


def step_aux(state: RecurrenceState, r_next, rbar_next):
    """``(kappa_{N+1}, I_{N+1})`` from ``I_{N+1} = I_N / kappa_N**2`` and
    ``kappa_{N+1} = kappa_N / sqrt(1 - r_{N+1} rbar_{N+1})``.

    Raises
    ------
    RegimeError
        If ``1 - r_{N+1} rbar_{N+1} <= 0``.
    """
    rad = 1 - r_next * rbar_next
    if not rad > 0:
        raise RegimeError(f"1 - r rbar = {float(rad):.6g} is not positive at N={state.N + 1}")
    sqrt = mpmath.sqrt if isinstance(rad, mpmath.mpf) else math.sqrt
    return state.kappa / sqrt(rad), state.I / state.kappa**2


def advance(state: RecurrenceState) -> RecurrenceState:
    """One full step ``N -> N+1`` (``r`` first, then ``rbar``, then auxiliaries)."""
    r_next = step_r(state)
    rbar_next = step_rbar(state)
    kappa_next, I_next = step_aux(state, r_next, rbar_next)
    return RecurrenceState(state.N + 1, state.r_cur, r_next, state.rbar_cur, rbar_next, kappa_next, I_next, state.k)


def _ke(q, mp: bool):
    if mp:
        m = q * q
        return mpmath.ellipk(m), mpmath.ellipe(m)
    return ellip_KE(float(q))


def initial_r(k: float, form: InitialForm = "phase", dps: Optional[int] = None,
              critical_band: float = DEFAULT_CRITICAL_BAND):
    """``(r_1, rbar_1)``.

    ``form="phase"`` uses the separate ``k > 1`` / ``k < 1`` elliptic forms,
    ``"landen"`` the single form in the inverse-Landen modulus (signed
    complement ``(1-k)/(1+k)``), ``"moments"`` the ratios ``-a_{-1}/a_0`` and
    ``-a_1/a_0``. With ``dps`` the elliptic forms are evaluated by mpmath at
    that precision and mpmath numbers are returned.
    """
    if k <= 0:
        raise DomainError("k must be positive")
    if classify_phase(float(k), critical_band) is Phase.CRITICAL:
        if dps:
            with mpmath.workdps(dps):
                return mpmath.mpf(-1) / 3, mpmath.mpf(1)
        return -1.0 / 3.0, 1.0
    if form == "moments":
        if dps:
            raise DomainError("moment form is double precision only")
        a0 = moment_a(0, k, critical_band)
        return -moment_a(-1, k, critical_band) / a0, -moment_a(1, k, critical_band) / a0
    mp = bool(dps)
    ctx = mpmath.workdps(dps) if mp else nullcontext()
    with ctx:
        k = mpmath.mpf(k) if mp else float(k)
        if form == "phase":
            if k > 1:
                K, E = _ke(1 / k, mp)
                r1 = (k * k - 2) / (3 * k) + (1 - k * k) / (3 * k) * K / E
                rb1 = k + (1 - k * k) / k * K / E
            else:
                K, E = _ke(k, mp)
                rb1 = k * E / ((k * k - 1) * K + E)
                r1 = (-2 / k + rb1) / 3
        elif form == "landen":
            sq = mpmath.sqrt if mp else math.sqrt
            kd = 2 * sq(k) / (1 + k)
            kp = (1 - k) / (1 + k)
            K, E = _ke(kd, mp)
            rb1 = (1 - kp) / (1 + kp) * (E + kp * K) / (E - kp * K)
            r1 = (-2 * (1 + kp) / (1 - kp) + rb1) / 3
        else:
            raise ValueError(f"unknown form {form!r}")
        return r1, rb1


def initial_a0(k: float, form: str = "phase", dps: Optional[int] = None,
               critical_band: float = DEFAULT_CRITICAL_BAND):
    """``a_0 = <sigma_00 sigma_11>`` from its elliptic forms (or moments)."""
    if classify_phase(float(k), critical_band) is Phase.CRITICAL:
        if dps:
            with mpmath.workdps(dps):
                return 2 / mpmath.pi
        return 2.0 / math.pi
    if form == "moments":
        return moment_a(0, k, critical_band)
    mp = bool(dps)
    with (mpmath.workdps(dps) if mp else nullcontext()):
        pi = mpmath.pi if mp else math.pi
        k = mpmath.mpf(k) if mp else float(k)
        if form == "phase":
            if k > 1:
                return 2 / pi * _ke(1 / k, mp)[1]
            K, E = _ke(k, mp)
            return 2 / (pi * k) * ((k * k - 1) * K + E)
        sq = mpmath.sqrt if mp else math.sqrt
        kd = 2 * sq(k) / (1 + k)
        kp = (1 - k) / (1 + k)
        K, E = _ke(kd, mp)
        return 2 / pi / (1 - kp) * (E - kp * K)


def required_dps(k: float, N_max: int, target_digits: int = 12) -> int:
    """Working digits so that ``N_max`` forward steps keep ``target_digits``."""
    lost = 2.0 * N_max * abs(math.log10(k)) if k != 1 else 0.0
    return int(math.ceil(target_digits + lost + 4))


@dataclass(frozen=True)
class Trajectory:
    """Output of :func:`run_recurrence`; index ``n`` of every list is order ``n``.

    ``r, rbar, kappa`` run over ``0..N_max+1`` and ``I`` over ``0..N_max+1``.
    """

    k: float
    N_max: int
    r: tuple[float, ...]
    rbar: tuple[float, ...]
    kappa: tuple[float, ...]
    I: tuple[float, ...]
    dps: int
    ratio_defect: float = field(default=0.0)

    def diag(self, N: int) -> float:
        """``<sigma_00 sigma_NN> = I_N``."""
        return self.I[N]


def run_recurrence(k: float, N_max: int, precision: Literal["auto", "double"] | int = "auto",
                   initial: Optional[tuple] = None, a0=None,
                   critical_band: float = DEFAULT_CRITICAL_BAND) -> Trajectory:
    """Step the nonlinear recurrences from ``N = 1`` up to ``N_max + 1``.

    Parameters
    ----------
    precision
        ``"auto"`` picks digits with :func:`required_dps` (double precision when
        that is <= 16), ``"double"`` forces floats, an int forces that many
        mpmath digits.
    initial, a0
        Override ``(r_1, rbar_1)`` and ``a_0``; default is the elliptic data
        (exact values at the critical point).

    Returns
    -------
    Trajectory
        ``ratio_defect`` is the largest
        ``|I_{N+1} I_{N-1} / I_N**2 - (1 - r_N rbar_N)|`` along the run.
    """
    if N_max < 0:
        raise DomainError("N_max must be >= 0")
    crit = classify_phase(k, critical_band) is Phase.CRITICAL
    if precision == "auto":
        dps = 0 if crit else required_dps(k, N_max + 1)
        if dps <= 16:
            dps = 0
    elif precision == "double":
        dps = 0
    else:
        dps = int(precision)
    ctx = mpmath.workdps(dps) if dps else nullcontext()
    with ctx:
        if initial is None:
            initial = initial_r(k, "phase" if dps else "moments", dps or None, critical_band)
        if a0 is None:
            a0 = initial_a0(k, "phase" if dps else "moments", dps or None, critical_band)
        kk = (mpmath.mpf(1) if crit else mpmath.mpf(k)) if dps else (1.0 if crit else float(k))
        one = mpmath.mpf(1) if dps else 1.0
        r1, rb1 = initial
        if dps:
            r1, rb1, a0 = mpmath.mpf(r1), mpmath.mpf(rb1), mpmath.mpf(a0)
        sqrt = mpmath.sqrt if dps else math.sqrt
        kappa0 = 1 / sqrt(a0)
        rad = 1 - r1 * rb1
        if not rad > 0:
            raise RegimeError("1 - r_1 rbar_1 is not positive")
        state = RecurrenceState(1, one, r1, one, rb1, kappa0 / sqrt(rad), a0, kk)
        r, rb, kap, I = [one, r1], [one, rb1], [kappa0, state.kappa], [one, a0]
        while state.N < N_max + 1:
            state = advance(state)
            r.append(state.r_cur)
            rb.append(state.rbar_cur)
            kap.append(state.kappa)
            I.append(state.I)
        I = I[: N_max + 2]
        defect = 0.0
        for N in range(1, len(I) - 1):
            lhs = I[N + 1] * I[N - 1] / I[N] ** 2
            defect = max(defect, float(abs(lhs - (1 - r[N] * rb[N]))))
    return Trajectory(float(k), N_max, tuple(map(float, r[: N_max + 2])), tuple(map(float, rb[: N_max + 2])),
                      tuple(map(float, kap[: N_max + 2])), tuple(map(float, I)), dps or 16, defect)


# ---------------------------------------------------------------------------
# Associated functions


def _check_branch(branch: str) -> None:
    if branch not in ("continued", "literal"):
        raise ValueError(f"unknown branch {branch!r}")


def _kernel(poly: np.ndarray, z: complex, k: float, crit: bool, M: Optional[int], tol: float) -> tuple[complex, int | None]:
    """Kernel integral of ``W * poly`` (ascending coefficients).

    Summed from exact moments in the critical band, or when the trapezoid
    rule fails to converge below the node cap (branch points hugging the
    circle).
    """
    def series(k_eff, band):
        def laurent(m):
            return sum(poly[i] * moment_a(m - i, k_eff, band) for i in range(len(poly)))
        # |w| = 1 on the circle bounds every coefficient by sum |poly|
        return kernel_series(laurent, z, scale=float(np.sum(np.abs(poly)))), None

    if crit:
        return series(1.0, DEFAULT_CRITICAL_BAND)

    def f(zeta):
        return weight_continued(zeta, k) * np.polynomial.polynomial.polyval(zeta, poly)

    if M is not None:
        return cauchy_kernel_integral(f, z, make_grid(M)), M
    try:
        res = escalate(lambda MM: cauchy_kernel_integral(f, z, make_grid(MM)), tol)
    except ConvergenceError:
        return series(k, 0.0)
    return complex(res.value), res.M_used


def epsilon_star_direct(n: int, z: complex, k: float, branch: str = "continued",
                        snapshot: Optional[BiorthSnapshot] = None, M: Optional[int] = None,
                        tol: float = 1e-14, critical_band: float = DEFAULT_CRITICAL_BAND) -> complex:
    """``eps*_n(z) = 1/kappa_n - int (zeta+z)/(zeta-z) w phi*_n dzeta/(2 pi i zeta)``.

    Also defined for ``n = 0``. With ``branch="continued"`` and ``|z| < 1`` the
    value is continued from outside the circle (``+ 2 w(z) phi*_n(z)``). In the
    critical band the kernel is summed from exact moments.
    """
    _check_branch(branch)
    if n < 0:
        raise DomainError("n must be >= 0")
    crit = classify_phase(k, critical_band) is Phase.CRITICAL
    snap = snapshot or biorth_solve(n, k, critical_band=critical_band)
    val, _ = _kernel(snap.phistar, z, k, crit, M, tol)
    out = 1.0 / snap.kappa - val
    if branch == "continued" and abs(z) < 1.0:
        out += 2.0 * complex(weight_continued(z, 1.0 if crit else k)) * snap.eval_phistar(z)
    return complex(out)


def epsilon_direct(n: int, z: complex, k: float, branch: str = "continued",
                   snapshot: Optional[BiorthSnapshot] = None, M: Optional[int] = None,
                   tol: float = 1e-14, critical_band: float = DEFAULT_CRITICAL_BAND) -> complex:
    """``eps_n(z) = int (zeta+z)/(zeta-z) w phi_n dzeta/(2 pi i zeta)``.

    With ``branch="continued"`` and ``|z| < 1``: ``- 2 w(z) phi_n(z)``.
    """
    _check_branch(branch)
    if n < 0:
        raise DomainError("n must be >= 0")
    crit = classify_phase(k, critical_band) is Phase.CRITICAL
    snap = snapshot or biorth_solve(n, k, critical_band=critical_band)
    out, _ = _kernel(snap.phi, z, k, crit, M, tol)
    if branch == "continued" and abs(z) < 1.0:
        out -= 2.0 * complex(weight_continued(z, 1.0 if crit else k)) * snap.eval_phi(z)
    return complex(out)


@dataclass(frozen=True)
class EpsilonState:
    """``(z, n, eps*_{n-1}(z), eps*_n(z))``."""

    z: complex
    n: int
    eps_prev: complex
    eps_cur: complex


def epsilon_star_step(es: EpsilonState, rbar_n: float, rbar_np1: float, kappa_ratio_up: float,
                      kappa_ratio_down: float) -> complex:
    """``eps*_{n+1}`` from the three-term recurrence.

    ``kappa_ratio_up = kappa_n / kappa_{n+1}``, ``kappa_ratio_down = kappa_{n-1} / kappa_n``.

    Raises
    ------
    DegeneracyError
        If ``rbar_n == 0``.
    """
    if rbar_n == 0:
        raise DegeneracyError(f"rbar_{es.n} vanishes", order=es.n)
    z = es.z
    rhs = (rbar_n + rbar_np1 * z) * es.eps_cur - kappa_ratio_down * rbar_np1 * z * es.eps_prev
    return rhs / (kappa_ratio_up * rbar_n)


def ttrecur_residual(eps_prev: complex, eps_cur: complex, eps_next: complex, z: complex, rbar_n: float,
                     rbar_np1: float, kappa_ratio_up: float, kappa_ratio_down: float) -> float:
    """Residual of the three-term relation normalised by the largest term."""
    terms = (
        kappa_ratio_up * rbar_n * eps_next,
        kappa_ratio_down * rbar_np1 * z * eps_prev,
        -(rbar_n + rbar_np1 * z) * eps_cur,
    )
    scale = max(abs(t) for t in terms) or 1.0
    return abs(sum(terms)) / scale


def run_epsilon_star(z: complex, traj: Trajectory, eps0: complex, eps1: complex, n_max: int,
                     fallback=None) -> list[complex]:
    """``eps*_0 .. eps*_{n_max}`` by forward recurrence from ``eps*_0, eps*_1``.

    ``traj`` must reach order ``n_max``. When ``|rbar_n| < 1e-12``,
    ``fallback(n+1)`` supplies the value directly (required then).
    """
    if traj.N_max + 1 < n_max:
        raise DomainError("trajectory too short")
    out = [complex(eps0), complex(eps1)]
    for n in range(1, n_max):
        rb_n, rb_n1 = traj.rbar[n], traj.rbar[n + 1]
        if abs(rb_n) < 1e-12:
            if fallback is None:
                raise DegeneracyError(f"rbar_{n} is too small for the recurrence", order=n)
            out.append(complex(fallback(n + 1)))
            continue
        es = EpsilonState(z, n, out[n - 1], out[n])
        out.append(epsilon_star_step(es, rb_n, rb_n1, traj.kappa[n] / traj.kappa[n + 1],
                                     traj.kappa[n - 1] / traj.kappa[n]))
    return out[: n_max + 1]


# ---------------------------------------------------------------------------
# Critical point


def critical_kappa2(N: int) -> float:
    """``kappa_N**2 = Gamma(N+3/2) Gamma(N+1/2) / Gamma(N+1)**2`` at ``k = 1``."""
    return math.exp(math.lgamma(N + 1.5) + math.lgamma(N + 0.5) - 2.0 * math.lgamma(N + 1))


def critical_diag(N: int) -> float:
    """``<sigma_00 sigma_NN>`` at ``k = 1`` as a product of Gamma ratios."""
    out = 1.0
    for j in range(1, N + 1):
        out *= math.exp(2.0 * math.lgamma(j) - math.lgamma(j + 0.5) - math.lgamma(j - 0.5))
    return out


def critical_r(N: int) -> tuple[float, float]:
    """``(r_N, rbar_N) = (-1/((2N+1)(2N-1)), 1)`` at ``k = 1``."""
    return -1.0 / ((2 * N + 1) * (2 * N - 1)), 1.0


@dataclass(frozen=True)
class CriticalSystem:
    phi: float
    phistar: float
    eps: float
    epsstar: float


def critical_system(n: int, z: float, phi_form: Literal["exact", "shifted"] = "exact") -> CriticalSystem:
    """Closed forms of ``phi_n, phi*_n, eps_n, eps*_n`` at ``k = 1`` (real ``z``).

    ``phi_form="shifted"`` evaluates ``phi_n`` with lower parameter ``-n + 1/2``
    instead of ``-n + 3/2``; the latter reproduces the exact polynomials.

    Raises
    ------
    DomainError
        For ``z = 0`` (the associated functions use ``1/z``) or ``0 < z <= 1``.
    """
    if n < 0:
        raise DomainError("n must be >= 0")
    kap = math.sqrt(critical_kappa2(n))
    c_phi = -n + 1.5 if phi_form == "exact" else -n + 0.5
    phi = -kap / ((2 * n + 1) * (2 * n - 1)) * gauss_2f1(1.5, -n, c_phi, z)
    phistar = kap * gauss_2f1(0.5, -n, -n + 0.5, z)
    if z == 0:
        raise DomainError("associated functions need z != 0")
    x = 1.0 / z
    eps = 2.0 / kap * (-1.0 / ((2 * n + 3) * (2 * n + 1) * z)) * gauss_2f1(1.5, n + 1, n + 2.5, x)
    epsstar = 2.0 / kap * gauss_2f1(0.5, n + 1, n + 1.5, x)
    return CriticalSystem(phi, phistar, eps, epsstar)


# ---------------------------------------------------------------------------
# Asymptotics


def asymptotic_r(N: int, k: float, regime: Literal["zero-temperature", "infinite-temperature"],
                 form: Literal["exact", "swapped"] = "exact") -> tuple[float, float]:
    """Leading-order ``(r_N, rbar_N)`` as ``k -> infinity`` or ``k -> 0``.

    Zero temperature: ``r_N ~ ((-1/2)_N / N!) k**-N``, ``rbar_N ~ ((1/2)_N / N!) k**-N``.

    Infinite temperature: ``r_N ~ ((-1/2)_N / (N+1)!) k**N`` and
    ``rbar_N ~ (N! / (1/2)_N) k**-N``. ``form="swapped"`` swaps the two
    powers of ``k`` (``k**-N`` and ``k**N``), which does not match the exact
    solution (e.g. ``r_1 ~ -k/4``, ``rbar_1 ~ 2/k``).

    Raises
    ------
    DomainError
        For ``N < 1`` or ``k`` outside the regime (``k >= 20`` or ``k <= 0.05``).
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    fact = math.factorial
    if regime == "zero-temperature":
        if k < 20:
            raise DomainError("zero-temperature asymptotics need k >= 20")
        return pochhammer(-0.5, N) / fact(N) * k ** (-N), pochhammer(0.5, N) / fact(N) * k ** (-N)
    if regime == "infinite-temperature":
        if k > 0.05:
            raise DomainError("infinite-temperature asymptotics need k <= 0.05")
        p_r, p_rb = (N, -N) if form == "exact" else (-N, N)
        return pochhammer(-0.5, N) / fact(N + 1) * k**p_r, fact(N) / pochhammer(0.5, N) * k**p_rb
    raise DomainError(f"unknown regime {regime!r}")


__all__ = [
    "RecurrenceState",
    "EpsilonState",
    "Trajectory",
    "CriticalSystem",
    "step_r",
    "step_rbar",
    "step_aux",
    "advance",
    "initial_r",
    "initial_a0",
    "required_dps",
    "run_recurrence",
    "epsilon_star_direct",
    "epsilon_direct",
    "epsilon_star_step",
    "ttrecur_residual",
    "run_epsilon_star",
    "critical_kappa2",
    "critical_diag",
    "critical_r",
    "critical_system",
    "asymptotic_r",
]

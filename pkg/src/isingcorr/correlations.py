"""Diagonal and next-to-diagonal correlations by several independent methods.

Methods
-------
recurrence
    Diagonal: nonlinear recurrences for ``r_N, rbar_N`` with ``I_N``.
determinant
    Toeplitz (diagonal) or bordered Toeplitz (next-to-diagonal) determinants.
elliptic
    Next-to-diagonal ``N = 1, 2`` from complete elliptic integrals.
epsilon-recurrence
    Next-to-diagonal ``(Cbar/2Sbar) (I_{N-1}/kappa_{N-1}) eps*_{N-1}(-Sbar/S)``
    with ``eps*`` advanced by its three-term recurrence.
critical-closed-form
    Gamma products and 2F1 at ``k = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Literal, Optional

from .determinants import bordered_toeplitz_det, toeplitz_det
from .errors import DiscontinuityError, DomainError, IsingCorrError, NearSingularError
from .painleve import critical_diag, critical_system, run_epsilon_star, run_recurrence
from .specfun import ellip_KE, ellip_Pi, gauss_2f1, inverse_landen
from .weight import (
    DEFAULT_CRITICAL_BAND,
    IsingParams,
    border_moments,
    dual_params,
    exchange_params,
    make_params_sk,
    moment_a,
)


class Method(str, enum.Enum):
    RECURRENCE = "recurrence"
    DETERMINANT = "determinant"
    ELLIPTIC = "elliptic"
    EPSILON = "epsilon-recurrence"
    CRITICAL = "critical-closed-form"


@dataclass(frozen=True)
class Diagnostics:
    """Error indicators attached to a result.

    ``sides`` holds the extrapolated one-sided values ``(Sbar < S, Sbar > S)``
    of an isotropic limit.
    """

    imag_residue: float = 0.0
    est_error: float = 0.0
    M_used: Optional[int] = None
    note: str = ""
    sides: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class CorrelationResult:
    """A correlation value with the method that produced it."""

    value: float
    N: int
    params: Optional[IsingParams]
    method: str
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    k: float = float("nan")
    kind: str = "diagonal"

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise IsingCorrError(f"non-finite correlation from {self.method}")
        if math.isnan(self.k) and self.params is not None:
            object.__setattr__(self, "k", self.params.k)


def _method(m) -> Method:
    try:
        return Method(m)
    except ValueError:
        raise DomainError(f"unknown method {m!r}") from None


def _is_critical(k: float, band: float) -> bool:
    return abs(k - 1.0) <= band


# ---------------------------------------------------------------------------
# Diagonal


def diag_corr(N: int, k: float, method: str = "recurrence", critical_band: float = DEFAULT_CRITICAL_BAND,
              a=None) -> CorrelationResult:
    """``<sigma_00 sigma_NN>`` (``1`` for ``N = 0``).

    ``a`` overrides the moment callable of the determinant method.
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    if k <= 0:
        raise DomainError("k must be positive")
    m = _method(method)
    if N == 0:
        return CorrelationResult(1.0, 0, None, m.value, k=k)
    if m is Method.RECURRENCE:
        traj = run_recurrence(k, N, critical_band=critical_band)
        diag = Diagnostics(est_error=traj.ratio_defect, note=f"dps={traj.dps}")
        return CorrelationResult(traj.I[N], N, None, m.value, diag, k=k)
    if m is Method.DETERMINANT:
        return CorrelationResult(toeplitz_det(N, 0, k, a=a, critical_band=critical_band), N, None, m.value, k=k)
    if m is Method.CRITICAL:
        if not _is_critical(k, critical_band):
            raise DomainError("critical closed form needs k = 1")
        return CorrelationResult(critical_diag(N), N, None, m.value, k=k)
    raise DomainError(f"method {m.value} does not apply to diagonal correlations")


# ---------------------------------------------------------------------------
# Elliptic evaluations of the next-to-diagonal correlation


def _pi_landen(p: IsingParams) -> float:
    kd, _ = inverse_landen(p.k)
    return ellip_Pi(-4.0 * p.k / (p.Sbar - p.S) ** 2, kd)


def nextdiag_elliptic(N: int, p: IsingParams, form: Literal["phase", "landen"] = "phase",
                      theta: Optional[float] = None) -> float:
    """``<sigma_00 sigma_{N,N-1}>`` for ``N = 1, 2`` from elliptic integrals.

    ``form="phase"`` uses separate ``k > 1`` / ``k < 1`` expressions in
    ``K(k), E(k), Pi(-S^2, k)`` or their ``1/k`` counterparts.
    ``form="landen"`` uses the single inverse-Landen expression, whose third
    integral jumps across ``Sbar = S``; the step ``theta`` compensates
    (default ``Theta(S - Sbar)`` with ``Theta(0) = 1/2``; on the isotropic
    line the jumping term is replaced by its two-sided mean, zero).
    """
    if N not in (1, 2):
        raise DomainError("elliptic evaluations exist for N = 1, 2")
    S, Sb, C, Cb, k = p.S, p.Sbar, p.C, p.Cbar, p.k
    pi = math.pi
    if k == 1.0:
        raise DomainError("elliptic forms are singular at k = 1; use the critical closed form")
    if form == "phase":
        if k > 1:
            K, E = ellip_KE(1.0 / k)
            P = ellip_Pi(-1.0 / (Sb * Sb), 1.0 / k)
            if N == 1:
                return 2 * Cb / (pi * k * S) * (C * C * P - K)
            return 4 * Cb / (pi**2 * k**3 * S) * (
                C * C * (k * k * (1 - Sb * Sb) * E + (k * k - 1) * Sb * Sb * K) * P
                + k**4 * E * E + (1 - k * k) * Sb * Sb * K * K + k * k * (Sb * Sb - k * k) * E * K)
        K, E = ellip_KE(k)
        P = ellip_Pi(-S * S, k)
        if N == 1:
            return 2 * Cb / (pi * S) * (C * C * P - K)
        return 4 * Cb / (pi**2 * k * S) * (
            C * C * ((k * k - 1) * K + (1 - Sb * Sb) * E) * P
            + E * E + (1 - k * k) * K * K + (C * C * Sb * Sb - 2) * E * K)
    if form != "landen":
        raise DomainError(f"unknown form {form!r}")
    kd, _ = inverse_landen(k)
    kp = (1 - k) / (1 + k)
    Kd, Ed = ellip_KE(kd)
    if theta is None:
        theta = 0.5 if S == Sb else (1.0 if S > Sb else 0.0)
    X = 0.0 if S == Sb else (Sb + S) / (Sb - S) * _pi_landen(p)
    if N == 1:
        return Cb * (1 + kp) / (2 * pi * S) * (C * C * X + (S * S - 1) * Kd) + C / S * theta
    return Cb / (pi**2 * S) * (1 + kp) / (1 - kp) * (
        C * C * ((1 - Sb * Sb) * Ed - kp * Cb * Cb * Kd) * (X + 2 * pi / (1 + kp) * theta / (C * Cb))
        + 4 / (1 + kp) ** 2 * Ed * Ed + kp * (Sb * Sb - S * S) * Kd * Kd - (1 - S * S) * (1 - Sb * Sb) * Ed * Kd)


def critical_nextdiag(N: int, S: float) -> float:
    """``<sigma_00 sigma_{N,N-1}>`` at ``k = 1`` (``Sbar = 1/S``):
    ``<sigma_00 sigma_NN> C 2F1(1/2, N; N+1/2; -S^2)``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if S <= 0:
        raise DomainError("S must be positive")
    return critical_diag(N) * math.sqrt(1 + S * S) * gauss_2f1(0.5, N, N + 0.5, -S * S)


# ---------------------------------------------------------------------------
# Next-to-diagonal


def _epsilon_route(N: int, p: IsingParams, critical_band: float) -> tuple[float, Diagnostics]:
    crit = _is_critical(p.k, critical_band)
    traj = run_recurrence(p.k, N, critical_band=critical_band)
    z = p.z
    pref = p.Cbar / (2 * p.Sbar)
    if crit:
        eps0 = critical_system(0, z).epsstar
        if N == 1:
            return pref * traj.I[0] / traj.kappa[0] * eps0, Diagnostics(note="critical initial data")
        eps1 = critical_system(1, z).epsstar
    else:
        c1 = nextdiag_elliptic(1, p)
        eps0 = c1 / (pref * traj.I[0] / traj.kappa[0])
        if N == 1:
            return c1, Diagnostics(note="elliptic initial data")
        eps1 = nextdiag_elliptic(2, p) / (pref * traj.I[1] / traj.kappa[1])
    eps = run_epsilon_star(z, traj, eps0, eps1, N - 1)
    val = pref * traj.I[N - 1] / traj.kappa[N - 1] * eps[N - 1]
    return float(val.real), Diagnostics(imag_residue=abs(val.imag), note=f"dps={traj.dps}")


def nextdiag_corr(N: int, params: IsingParams, method: str = "epsilon-recurrence", isotropic: str = "limit",
                  tol: float = 1e-14, nodes_cap: int = 65536, critical_band: float = DEFAULT_CRITICAL_BAND,
                  delta: float = 0.01, a=None) -> CorrelationResult:
    """``<sigma_00 sigma_{N,N-1}>``.

    On the isotropic line the determinant method needs the two-sided limit;
    ``isotropic="limit"`` routes there, ``isotropic="error"`` raises
    :class:`NearSingularError`. The elliptic and epsilon-recurrence methods
    are continuous across the line and are evaluated directly.
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    m = _method(method)
    p = params
    crit = _is_critical(p.k, critical_band)
    kind = "next-diagonal"
    if m is Method.CRITICAL:
        if not crit:
            raise DomainError("critical closed form needs k = 1")
        return CorrelationResult(critical_nextdiag(N, p.S), N, p, m.value, kind=kind)
    if m is Method.ELLIPTIC:
        if crit:
            return replace(nextdiag_corr(N, p, "critical-closed-form", critical_band=critical_band), method=m.value)
        return CorrelationResult(nextdiag_elliptic(N, p), N, p, m.value, kind=kind)
    if m is Method.EPSILON:
        val, diag = _epsilon_route(N, p, critical_band)
        return CorrelationResult(val, N, p, m.value, diag, kind=kind)
    if m is Method.DETERMINANT:
        if p.isotropic:
            if isotropic == "error":
                raise NearSingularError("S = Sbar: use the isotropic limit", z=p.z)
            return nextdiag_isotropic_limit(N, p, delta, tol=tol, nodes_cap=nodes_cap, critical_band=critical_band)
        b = border_moments(p, N - 1, tol=tol, nodes_cap=nodes_cap, critical_band=critical_band)
        val = bordered_toeplitz_det(N, p, b=b, a=a, critical_band=critical_band)
        diag = Diagnostics(imag_residue=b.imag_residue, est_error=b.est_error, M_used=b.M_used)
        return CorrelationResult(val, N, p, m.value, diag, kind=kind)
    raise DomainError(f"method {m.value} does not apply to next-diagonal correlations")


def _side_params(k: float, h: float) -> IsingParams:
    # fixed k, Sbar/S = 1 + h
    return make_params_sk(math.sqrt(k / (1 + h)), math.sqrt(k * (1 + h)))


def _richardson(f1: float, f2: float, f4: float) -> tuple[float, float]:
    """Quadratic extrapolation to 0 from samples at h, h/2, h/4."""
    r1 = 2 * f2 - f1
    r2 = 2 * f4 - f2
    return (4 * r2 - r1) / 3, abs((4 * r2 - r1) / 3 - r2)


def nextdiag_isotropic_limit(N: int, params: IsingParams, delta: float = 0.01, tol: float = 1e-14,
                             nodes_cap: int = 65536, side_tol: float = 1e-6,
                             critical_band: float = DEFAULT_CRITICAL_BAND) -> CorrelationResult:
    """Bordered-determinant value on ``Sbar = S`` as a two-sided limit at fixed ``k``.

    Each side ``Sbar/S = 1 +- h`` is sampled at ``h = delta, delta/2, delta/4``
    and extrapolated to ``h = 0``; the sides must agree within ``side_tol``.

    Raises
    ------
    DiscontinuityError
        If the extrapolated sides disagree.
    """
    if not params.isotropic:
        raise DomainError("isotropic limit needs S = Sbar")
    k = params.k
    sides = []
    worst_err = 0.0
    M_used = None
    for s in (+1, -1):
        vals = []
        for h in (delta, delta / 2, delta / 4):
            ps = _side_params(k, s * h)
            res = nextdiag_corr(N, ps, "determinant", tol=tol, nodes_cap=nodes_cap, critical_band=critical_band)
            vals.append(res.value)
            if res.diagnostics.M_used:
                M_used = max(M_used or 0, res.diagnostics.M_used)
        lim, err = _richardson(*vals)
        sides.append(lim)
        worst_err = max(worst_err, err)
    gap = abs(sides[0] - sides[1])
    if gap > side_tol:
        raise DiscontinuityError(f"isotropic one-sided limits differ by {gap:.3g}", left=sides[1], right=sides[0])
    value = 0.5 * (sides[0] + sides[1])
    diag = Diagnostics(est_error=max(worst_err, gap), M_used=M_used, note=f"isotropic limit, two-sided gap {gap:.3g}",
                       sides=(sides[1], sides[0]))
    return CorrelationResult(value, N, params, Method.DETERMINANT.value, diag, kind="next-diagonal")


# ---------------------------------------------------------------------------
# Dual and exchanged correlations


def dual_corr(kind: Literal["diagonal", "next-diagonal"], N: int, params: IsingParams,
              route: Literal["mapped", "determinant"] = "mapped", method: Optional[str] = None,
              **kw) -> CorrelationResult:
    """Disorder-variable correlation.

    ``route="mapped"`` evaluates the direct correlation at the dual parameters
    (``k -> 1/k, S -> 1/Sbar, Sbar -> 1/S``); ``route="determinant"`` uses the
    dual moments and border elements directly.
    """
    if kind == "diagonal":
        if route == "mapped":
            res = diag_corr(N, 1.0 / params.k, method or "recurrence", **kw)
        else:
            val = toeplitz_det(N, 0, a=lambda n: -moment_a(1 - n, params.k)) if N else 1.0
            res = CorrelationResult(val, N, None, Method.DETERMINANT.value, k=1.0 / params.k)
        return replace(res, params=params, k=params.k, kind="dual-diagonal")
    if kind == "next-diagonal":
        if route == "mapped":
            res = nextdiag_corr(N, dual_params(params), method or "epsilon-recurrence", **kw)
        else:
            if params.isotropic:
                raise NearSingularError("dual border has its pole on the circle", z=params.z)
            val = bordered_toeplitz_det(N, params, which="dual")
            res = CorrelationResult(val, N, params, Method.DETERMINANT.value)
        return replace(res, params=params, k=params.k, kind="dual-next-diagonal")
    raise DomainError(f"unknown kind {kind!r}")


def exchange_corr(N: int, params: IsingParams, method: str = "epsilon-recurrence", **kw) -> CorrelationResult:
    """``<sigma_00 sigma_{N-1,N}>``: the next-to-diagonal value with ``S`` and ``Sbar`` swapped."""
    res = nextdiag_corr(N, exchange_params(params), method, **kw)
    return replace(res, params=params, kind="exchanged-next-diagonal")


# ---------------------------------------------------------------------------
# Cross validation


@dataclass
class ValidationReport:
    """Per-order values of every applicable method and their pairwise deviations."""

    params: IsingParams
    N_max: int
    tol: float
    rows: list[dict] = field(default_factory=list)
    deviations: dict[str, float] = field(default_factory=dict)
    horizon: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def cross_validate(N_max: int, params: IsingParams, tol: float = 1e-7, perturb: float = 0.0,
                   critical_band: float = DEFAULT_CRITICAL_BAND, **kw) -> ValidationReport:
    """Run every applicable method for ``N <= N_max`` and compare pairwise.

    ``perturb`` scales ``a_0`` by ``1 + perturb`` inside the determinant
    methods only (to exercise the failure path).
    """
    p = params
    crit = _is_critical(p.k, critical_band)
    a = None
    if perturb:
        a = lambda n: moment_a(n, p.k, critical_band) * ((1 + perturb) if n == 0 else 1.0)
    rep = ValidationReport(p, N_max, tol)
    all_ok_upto = 0
    for N in range(1, N_max + 1):
        results: dict[str, CorrelationResult] = {}
        errors: dict[str, str] = {}
        dmethods = ["recurrence", "determinant"] + (["critical-closed-form"] if crit else [])
        for m in dmethods:
            try:
                results["diagonal/" + m] = diag_corr(N, p.k, m, critical_band=critical_band,
                                                     **({"a": a} if m == "determinant" else {}))
            except IsingCorrError as exc:
                errors["diagonal/" + m] = str(exc)
        nmethods = ["epsilon-recurrence", "determinant"]
        if crit:
            nmethods.append("critical-closed-form")
        elif N <= 2:
            nmethods.append("elliptic")
        for m in nmethods:
            try:
                results["next-diagonal/" + m] = nextdiag_corr(N, p, m, critical_band=critical_band,
                                                              **({"a": a} if m == "determinant" else {}), **kw)
            except IsingCorrError as exc:
                errors["next-diagonal/" + m] = str(exc)
        row_ok = not errors
        for kind in ("diagonal", "next-diagonal"):
            keys = sorted(k_ for k_ in results if k_.startswith(kind + "/"))
            for k1, k2 in combinations(keys, 2):
                d = _rel(results[k1].value, results[k2].value)
                pair = f"{k1} vs {k2.split('/')[1]}"
                rep.deviations[pair] = max(rep.deviations.get(pair, 0.0), d)
                if d > tol:
                    row_ok = False
                    rep.failures.append(f"N={N} {pair}: {d:.3g}")
        for key, msg in errors.items():
            rep.failures.append(f"N={N} {key}: {msg}")
        rep.rows.append({"N": N, "results": results, "errors": errors, "ok": row_ok})
        if row_ok and all_ok_upto == N - 1:
            all_ok_upto = N
    rep.horizon = all_ok_upto
    return rep


__all__ = [
    "Method",
    "Diagnostics",
    "CorrelationResult",
    "ValidationReport",
    "diag_corr",
    "nextdiag_corr",
    "nextdiag_elliptic",
    "nextdiag_isotropic_limit",
    "critical_nextdiag",
    "dual_corr",
    "exchange_corr",
    "cross_validate",
]

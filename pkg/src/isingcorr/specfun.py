"""Real special functions: Gamma, digamma, Gauss 2F1 and complete elliptic integrals.

All elliptic integrals take the *modulus* ``k`` as argument, not the parameter
``m = k**2`` used by scipy, mpmath and Abramowitz & Stegun::

    K(k) = int_0^{pi/2} dphi / sqrt(1 - k^2 sin^2 phi)
    Pi(n, k) = int_0^{pi/2} dphi / ((1 - n sin^2 phi) sqrt(1 - k^2 sin^2 phi))

so ``ellip_K(k) == scipy.special.ellipk(k**2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError

_EPS = 2.220446049250313e-16
_INT_TOL = 1e-13


def _nonpos_int(v: float) -> bool:
    r = round(v)
    return r <= 0 and abs(v - r) < _INT_TOL


def _near_int(v: float) -> Optional[int]:
    r = round(v)
    return int(r) if abs(v - r) < 1e-12 else None


# ---------------------------------------------------------------------------
# Gamma family

def gamma_fn(x: float) -> float:
    """Gamma function for real ``x``; raises :class:`DomainError` at the poles."""
    if _nonpos_int(x):
        raise DomainError(f"Gamma has a pole at x={x!r}")
    return math.gamma(x)


def rgamma(x: float) -> float:
    """Reciprocal Gamma, 0 at the poles."""
    if _nonpos_int(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _gamma_ratio(num, den) -> float:
    """``prod Gamma(num) / prod Gamma(den)``; 0 if a denominator sits on a pole.

    Switches to log-Gamma when an argument is large enough to overflow.
    """
    if any(_nonpos_int(x) for x in den):
        return 0.0
    if max(abs(x) for x in (*num, *den)) < 150.0:
        out = 1.0
        for x in num:
            out *= gamma_fn(x)
        for x in den:
            out /= math.gamma(x)
        return out
    for x in num:
        if _nonpos_int(x):
            raise DomainError(f"Gamma has a pole at {x}")
    sign = 1.0
    log = 0.0
    for x, e in [(x, 1) for x in num] + [(x, -1) for x in den]:
        log += e * math.lgamma(x)
        if x < 0 and math.floor(-x) % 2 == 0:
            sign = -sign
    return sign * math.exp(log)


def pochhammer(a: float, n: int) -> float:
    """Rising factorial ``(a)_n = a (a+1) ... (a+n-1)``."""
    if n < 0:
        raise DomainError("pochhammer needs n >= 0")
    out = 1.0
    for j in range(n):
        out *= a + j
    return out


# Bernoulli numbers B_2 .. B_16 divided by 2j
_PSI_ASYM = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760, 1 / 12, -3617 / 8160)


def digamma(x: float) -> float:
    """Logarithmic derivative of Gamma for real ``x`` (not a pole)."""
    if _nonpos_int(x):
        raise DomainError(f"digamma has a pole at x={x!r}")
    if x < 0.5:
        # reflection
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for c in _PSI_ASYM:
        series += c * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - series


# ---------------------------------------------------------------------------
# Gauss hypergeometric function

def _hyp_series(a: float, b: float, c: float, x: float, max_terms: int = 200000) -> float:
    term = 1.0
    total = 1.0
    n = 0
    while True:
        if a + n == 0 or b + n == 0:
            return total
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total += term
        n += 1
        if abs(term) <= _EPS * 0.25 * abs(total) and n > 2:
            return total
        if n >= max_terms:
            raise DomainError(f"2F1 series did not converge at x={x!r}")


def _connection_generic(a, b, c, x):
    # Gauss connection formula about x=1, c-a-b not an integer
    s = c - a - b
    t = 1.0 - x
    first = _gamma_ratio((c, s), (c - a, c - b))
    second = _gamma_ratio((c, -s), (a, b))
    out = 0.0
    if first != 0.0:
        out += first * _hyp_series(a, b, 1.0 - s, t)
    if second != 0.0:
        out += second * t**s * _hyp_series(c - a, c - b, s + 1.0, t)
    return out


def _connection_log(a, b, m, x):
    # c = a + b + m with integer m >= 0; logarithmic case
    t = 1.0 - x
    lt = math.log(t)
    c = a + b + m
    out = 0.0
    if m > 0:
        pref = _gamma_ratio((m, c), (a + m, b + m))
        if pref != 0.0:
            finite = 0.0
            term = 1.0
            for n in range(m):
                finite += term
                if n < m - 1:
                    term *= (a + n) * (b + n) / ((n + 1) * (1 - m + n)) * t
            out += pref * finite
    coef = _gamma_ratio((c,), (a, b, m + 1))
    if coef == 0.0:
        return out
    coef *= (-1.0) ** m * t**m
    # sum_n (a+m)_n (b+m)_n / (n! (n+m)!/m!) t^n [ ... ]
    pa, pb = digamma(a + m), digamma(b + m)
    p1, pm = digamma(1.0), digamma(1.0 + m)
    term = 1.0
    total = 0.0
    n = 0
    while True:
        bracket = lt - p1 - pm + pa + pb
        contrib = term * bracket
        total += contrib
        if n > 2 and abs(contrib) <= _EPS * 0.25 * abs(total):
            break
        if n > 100000:
            raise DomainError("2F1 logarithmic series did not converge")
        term *= (a + m + n) * (b + m + n) / ((n + 1) * (n + m + 1)) * t
        pa += 1.0 / (a + m + n)
        pb += 1.0 / (b + m + n)
        p1 += 1.0 / (n + 1)
        pm += 1.0 / (n + m + 1)
        n += 1
    return out - coef * total


def _near_one(a, b, c, x):
    s = c - a - b
    m = _near_int(s)
    if m is None:
        return _connection_generic(a, b, c, x)
    if m < 0:
        # Euler: F(a,b;c;x) = (1-x)^(c-a-b) F(c-a,c-b;c;x)
        return (1.0 - x) ** m * _near_one(c - a, c - b, c, x)
    return _connection_log(a, b, m, x)


def gauss_2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric function ``2F1(a, b; c; x)`` for real ``x < 1``.

    Negative ``x`` is mapped into ``(0, 1)`` by a Pfaff transformation; for
    ``x > 1/2`` the connection formula about ``x = 1`` is used (with its
    logarithmic form when ``c - a - b`` is an integer). Terminating series
    (``a`` or ``b`` a nonpositive integer) are summed directly for any ``x``.

    Raises
    ------
    DomainError
        If ``c`` is a nonpositive integer or ``x >= 1``.
    """
    if _nonpos_int(c):
        raise DomainError(f"2F1 undefined for c={c!r}")
    if _nonpos_int(a) or _nonpos_int(b):
        return _hyp_series(a, b, c, x)
    if not x < 1.0:
        raise DomainError(f"2F1 requires x < 1, got {x!r}")
    if x == 0.0:
        return 1.0
    if x < 0.0:
        y = x / (x - 1.0)
        if _nonpos_int(c - a):
            return (1.0 - x) ** (-b) * gauss_2f1(c - a, b, c, y)
        return (1.0 - x) ** (-a) * gauss_2f1(a, c - b, c, y)
    if x <= 0.5:
        return _hyp_series(a, b, c, x)
    return _near_one(a, b, c, x)


# ---------------------------------------------------------------------------
# Complete elliptic integrals

def ellip_KE(k: float) -> tuple[float, float]:
    """Both complete integrals ``(K(k), E(k))`` from one AGM sweep, ``0 <= k < 1``."""
    if not 0.0 <= k < 1.0:
        raise DomainError(f"K(k) needs 0 <= k < 1, got {k!r}")
    a = 1.0
    b = math.sqrt((1.0 - k) * (1.0 + k))
    c = k
    s = 0.5 * c * c
    p = 1.0
    while abs(c) > _EPS * a:
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        s += p * c * c
        p *= 2.0
    K = math.pi / (2.0 * a)
    return K, K * (1.0 - s)


def ellip_K(k: float) -> float:
    """Complete elliptic integral of the first kind, modulus convention."""
    return ellip_KE(k)[0]


def ellip_E(k: float) -> float:
    """Complete elliptic integral of the second kind, ``0 <= k <= 1``."""
    if k == 1.0:
        return 1.0
    if not 0.0 <= k < 1.0:
        raise DomainError(f"E(k) needs 0 <= k <= 1, got {k!r}")
    return ellip_KE(k)[1]


def carlson_rc(x: float, y: float) -> float:
    """Degenerate Carlson integral ``R_C(x, y)`` for ``x >= 0, y > 0``."""
    if y <= 0.0 or x < 0.0:
        raise DomainError("R_C needs x >= 0, y > 0")
    if x == y:
        return 1.0 / math.sqrt(x)
    e = y / x - 1.0 if x > 0 else math.inf
    if abs(e) < 1e-3:
        # R_C(x, x(1+e)) = x^{-1/2} * sum_j (-e)^j / (2j+1)
        s = 0.0
        p = 1.0
        for j in range(12):
            s += p / (2 * j + 1)
            p *= -e
        return s / math.sqrt(x)
    if x < y:
        return math.acos(math.sqrt(x / y)) / math.sqrt(y - x)
    return math.acosh(math.sqrt(x / y)) / math.sqrt(x - y)


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson symmetric integral ``R_F``; at most one argument may vanish."""
    if min(x, y, z) < 0.0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise DomainError("R_F needs nonnegative arguments, at most one zero")
    A0 = A = (x + y + z) / 3.0
    x0, y0 = x, y
    Q = (3.0 * _EPS) ** (-1.0 / 8.0) * max(abs(A0 - x), abs(A0 - y), abs(A0 - z))
    f = 1.0
    while Q * f >= abs(A):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z, A = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4, (A + lam) / 4
        f /= 4.0
    X = (A0 - x0) * f / A
    Y = (A0 - y0) * f / A
    Z = -(X + Y)
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    return (1.0 - E2 / 10 + E3 / 14 + E2 * E2 / 24 - 3 * E2 * E3 / 44) / math.sqrt(A)


def carlson_rj(x: float, y: float, z: float, p: float) -> float:
    """Carlson symmetric integral ``R_J`` for ``p > 0``."""
    if min(x, y, z) < 0.0 or p <= 0.0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise DomainError("R_J needs x,y,z >= 0 (at most one zero) and p > 0")
    A0 = A = (x + y + z + 2.0 * p) / 5.0
    delta = (p - x) * (p - y) * (p - z)
    x0, y0, z0 = x, y, z
    Q = (0.25 * _EPS) ** (-1.0 / 6.0) * max(abs(A0 - x), abs(A0 - y), abs(A0 - z), abs(A0 - p))
    f = 1.0
    total = 0.0
    while Q * f >= abs(A):
        sx, sy, sz, sp = math.sqrt(x), math.sqrt(y), math.sqrt(z), math.sqrt(p)
        lam = sx * sy + sx * sz + sy * sz
        d = (sp + sx) * (sp + sy) * (sp + sz)
        e = delta * f**3 / (d * d)
        total += f / d * carlson_rc(1.0, 1.0 + e)
        x, y, z, p, A = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4, (p + lam) / 4, (A + lam) / 4
        f /= 4.0
    X = (A0 - x0) * f / A
    Y = (A0 - y0) * f / A
    Z = (A0 - z0) * f / A
    P = -(X + Y + Z) / 2.0
    E2 = X * Y + X * Z + Y * Z - 3.0 * P * P
    E3 = X * Y * Z + 2.0 * E2 * P + 4.0 * P**3
    E4 = (2.0 * X * Y * Z + E2 * P + 3.0 * P**3) * P
    E5 = X * Y * Z * P * P
    poly = 1.0 - 3 * E2 / 14 + E3 / 6 + 9 * E2 * E2 / 88 - 3 * E4 / 22 - 9 * E2 * E3 / 52 + 3 * E5 / 26
    return f * poly / (A * math.sqrt(A)) + 6.0 * total


def ellip_Pi(n: float, k: float) -> float:
    """Complete elliptic integral of the third kind ``Pi(n, k)``, ``n < 1``.

    Negative characteristics are first mapped to ``N = (k^2 - n)/(1 - n)``
    in ``[k^2, 1)``, which keeps both terms positive and avoids the
    cancellation in ``R_F + (n/3) R_J`` when ``n`` is large and negative.
    """
    if not 0.0 <= k < 1.0:
        raise DomainError(f"Pi(n, k) needs 0 <= k < 1, got k={k!r}")
    if not n < 1.0:
        raise DomainError(f"Pi(n, k) is singular for n >= 1 (n={n!r})")
    kc2 = (1.0 - k) * (1.0 + k)
    if n == 0.0:
        return ellip_K(k)
    if n > 0.0:
        return carlson_rf(0.0, kc2, 1.0) + n / 3.0 * carlson_rj(0.0, kc2, 1.0, 1.0 - n)
    k2 = k * k
    big = k2 - n
    N = big / (1.0 - n)
    pi_pos = carlson_rf(0.0, kc2, 1.0) + N / 3.0 * carlson_rj(0.0, kc2, 1.0, (1.0 - k2) / (1.0 - n))
    return (-n) * kc2 / ((1.0 - n) * big) * pi_pos + k2 / big * ellip_K(k)


def inverse_landen(k: float, signed: bool = False) -> tuple[float, float]:
    """Inverse Landen modulus ``2 sqrt(k)/(1+k)`` and its complement.

    The complement is ``|1-k|/(1+k)`` by default. With ``signed=True`` it is
    ``(1-k)/(1+k)``, the branch for which the Landen-form expressions of the
    correlations hold on both sides of ``k = 1``.
    """
    if not k > 0.0:
        raise DomainError(f"inverse Landen map needs k > 0, got {k!r}")
    kd = 2.0 * math.sqrt(k) / (1.0 + k)
    kp = (1.0 - k) / (1.0 + k)
    return min(kd, 1.0), (kp if signed else abs(kp))


@dataclass(frozen=True)
class EllipticTriple:
    K: float
    E: float
    modulus: float
    Pi: Optional[float] = None
    characteristic: Optional[float] = None


def elliptic_triple(k: float, n: Optional[float] = None) -> EllipticTriple:
    """Bundle ``K(k)``, ``E(k)`` and optionally ``Pi(n, k)``."""
    K, E = ellip_KE(k)
    if n is None:
        return EllipticTriple(K=K, E=E, modulus=k)
    return EllipticTriple(K=K, E=E, modulus=k, Pi=ellip_Pi(n, k), characteristic=n)

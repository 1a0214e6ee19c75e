"""Special functions at high precision: beta(y), half-integer Bessel J/I, d/dnu J_nu at 3/2.

Every routine takes an explicit :class:`PrecisionContext`; none touches mpmath's
global ``mp`` precision.  The ``*_array`` variants are double-precision and
vectorised for the long Kloosterman/Bessel sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

__all__ = [
    "PrecisionContext",
    "default_context",
    "erfc",
    "beta_gamma",
    "gamma_minus_three_halves",
    "bessel_J_half",
    "bessel_I_half",
    "bessel_J_series",
    "bessel_I_series",
    "digamma_half",
    "dJ_dorder_at_3_2",
    "bessel_J32_array",
    "bessel_I32_array",
    "dJ_dorder_at_3_2_array",
    "SeriesNonConvergence",
]


class SeriesNonConvergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal working precision plus the derived acceptance tolerance ``10**-(digits-15)``."""

    digits: int = 40
    mp: mpmath.ctx_mp.MPContext = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < 15:
            raise ValueError(f"digits must be an integer >= 15, got {self.digits!r}")
        ctx = mpmath.ctx_mp.MPContext()
        ctx.dps = self.digits
        object.__setattr__(self, "mp", ctx)

    @property
    def tol(self):
        return self.mp.mpf(10) ** (15 - self.digits)

    def with_guard(self, extra: int) -> "PrecisionContext":
        return PrecisionContext(self.digits + max(0, int(extra)))

    def mpf(self, x):
        return _lift(x, self)


@lru_cache(maxsize=32)
def _ctx(digits: int) -> PrecisionContext:
    return PrecisionContext(digits)


def default_context() -> PrecisionContext:
    return _ctx(40)


def _positive(x, name="x"):
    if not float(x) > 0:
        raise ValueError(f"{name} must be positive, got {x}")


def _lift(x, ctx):
    """Convert to ``ctx`` precision, parsing exact strings where given."""
    if isinstance(x, (mpmath.mpf,)):
        return ctx.mp.mpf(x)
    if isinstance(x, str):
        return ctx.mp.mpf(x)
    try:  # Fraction and friends
        return ctx.mp.mpf(x.numerator) / x.denominator
    except AttributeError:
        return ctx.mp.mpf(x)


# --- incomplete gamma -------------------------------------------------------


def erfc(z, prec: PrecisionContext | None = None):
    """erfc for real ``z >= 0``: series below 3, Lentz continued fraction above."""
    prec = prec or default_context()
    zf = float(z)
    if zf < 0:
        raise ValueError("erfc implemented for z >= 0 only")
    # erfc(z) ~ e^{-z^2}; the series route loses ~z^2/ln 10 digits to 1 - erf
    work = _ctx(prec.digits + 10 + (int(zf ** 2 / 2.3) if zf < 3 else 0))
    mp = work.mp
    z = _lift(z, work)
    tol = mp.mpf(10) ** (-work.digits)
    if z < 3:
        # erf z = 2/sqrt(pi) sum (-1)^k z^{2k+1} / (k! (2k+1))
        term = z
        s = z
        k = 0
        small = 0
        while small < 3:
            k += 1
            term *= -z * z / k
            t = term / (2 * k + 1)
            s += t
            small = small + 1 if abs(t) < tol * abs(s) else 0
            if k > 100000:
                raise SeriesNonConvergence("erf series")
        out = 1 - 2 * s / mp.sqrt(mp.pi)
    else:
        # erfc z = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
        tiny = mp.mpf(10) ** (-2 * work.digits)
        f = z
        C = z
        D = mp.mpf(0)
        n = 0
        while True:
            n += 1
            a = mp.mpf(n) / 2
            D = z + a * D
            D = tiny if D == 0 else D
            C = z + a / C
            C = tiny if C == 0 else C
            D = 1 / D
            delta = C * D
            f *= delta
            if abs(delta - 1) < tol:
                break
            if n > 100000:
                raise SeriesNonConvergence("erfc continued fraction")
        out = mp.exp(-z * z) / (mp.sqrt(mp.pi) * f)
    return prec.mp.mpf(out)


def gamma_minus_three_halves(x, prec: PrecisionContext | None = None):
    """``Gamma(-3/2, x)`` for ``x > 0`` by downward recurrence from ``Gamma(1/2, x)``."""
    prec = prec or default_context()
    _positive(x)
    xf = float(x)
    # the two subtractions cancel about 2 log10(1 + x) digits
    guard = 10 + int(2 * math.log10(1.0 + xf))
    work = _ctx(prec.digits + guard)
    mp = work.mp
    x = _lift(x, work)
    ex = mp.exp(-x)
    g_half = mp.sqrt(mp.pi) * erfc(mp.sqrt(x), work)
    g_mhalf = 2 * ex / mp.sqrt(x) - 2 * g_half
    g = (ex / (x * mp.sqrt(x)) - g_mhalf) * 2 / 3
    return prec.mp.mpf(g)


def beta_gamma(y, prec: PrecisionContext | None = None):
    """``beta(y) = Gamma(-3/2, pi y / 6)`` for ``y > 0``."""
    prec = prec or default_context()
    _positive(y, "y")
    work = _ctx(prec.digits + 5)
    return prec.mp.mpf(gamma_minus_three_halves(work.mp.pi * _lift(y, work) / 6, work))


# --- Bessel functions of half-integer order ----------------------------------


def _check_half(nu):
    two_nu = 2 * nu
    if two_nu != int(two_nu) or int(two_nu) % 2 != 1 or nu < 1.5:
        raise ValueError(f"order must be a half-integer >= 3/2, got {nu}")
    return int(two_nu)


def _bessel_half(nu, x, prec, modified):
    two_nu = _check_half(nu)
    _positive(x)
    xf = float(x)
    # the recurrence / closed form cancels about log10(1/x) digits per step for small x
    steps = (two_nu - 1) // 2
    guard = 10 + int(max(0.0, -math.log10(xf)) * 2 * steps)
    work = _ctx(prec.digits + guard)
    mp = work.mp
    x = _lift(x, work)
    pref = mp.sqrt(2 / (mp.pi * x))
    if modified:
        i_lo = pref * mp.sinh(x)           # I_{1/2}
        i_hi = pref * (mp.cosh(x) - mp.sinh(x) / x)  # I_{3/2}
        order = mp.mpf(3) / 2
        for _ in range(steps - 1):
            # I_{v+1} = I_{v-1} - (2v/x) I_v
            i_lo, i_hi = i_hi, i_lo - 2 * order / x * i_hi
            order += 1
        return prec.mp.mpf(i_hi)
    j_lo = pref * mp.sin(x)
    j_hi = pref * (mp.sin(x) / x - mp.cos(x))
    order = mp.mpf(3) / 2
    for _ in range(steps - 1):
        # J_{v+1} = (2v/x) J_v - J_{v-1}
        j_lo, j_hi = j_hi, 2 * order / x * j_hi - j_lo
        order += 1
    return prec.mp.mpf(j_hi)


def bessel_J_half(nu, x, prec: PrecisionContext | None = None):
    """``J_nu(x)`` for half-integer ``nu >= 3/2`` from the closed form and upward recurrence."""
    return _bessel_half(nu, x, prec or default_context(), modified=False)


def bessel_I_half(nu, x, prec: PrecisionContext | None = None):
    """``I_nu(x)`` for half-integer ``nu >= 3/2``."""
    return _bessel_half(nu, x, prec or default_context(), modified=True)


def _ascending(nu, x, prec, sign):
    _positive(x)
    guard = 10 + int(float(x) / 2.3)
    work = _ctx(prec.digits + guard)
    mp = work.mp
    x = _lift(x, work)
    nu = _lift(nu, work)
    h = x / 2
    term = h ** nu / mp.gamma(nu + 1)
    s = term
    tol = mp.mpf(10) ** (-work.digits)
    k = 0
    small = 0
    while small < 3:
        k += 1
        term *= sign * h * h / (k * (nu + k))
        s += term
        small = small + 1 if abs(term) <= tol * abs(s) else 0
    return prec.mp.mpf(s)


def bessel_J_series(nu, x, prec: PrecisionContext | None = None):
    """Ascending power series of ``J_nu``; used as an independent oracle."""
    return _ascending(nu, x, prec or default_context(), -1)


def bessel_I_series(nu, x, prec: PrecisionContext | None = None):
    return _ascending(nu, x, prec or default_context(), 1)


# --- derivative in the order -------------------------------------------------


def digamma_half(k: int, prec: PrecisionContext | None = None):
    """``psi(k + 1/2)`` for integer ``k >= 0``: ``-gamma - 2 ln 2 + sum_{j<k} 2/(2j+1)``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    prec = prec or default_context()
    mp = prec.mp
    s = -mp.euler - 2 * mp.ln2
    for j in range(k):
        s += mp.mpf(2) / (2 * j + 1)
    return s


def dJ_dorder_at_3_2(x, prec: PrecisionContext | None = None, max_terms: int = 100000):
    """``d/dnu J_nu(x)`` at ``nu = 3/2`` by termwise differentiation of the ascending series.

    Note the factor 2 in ``d/ds J_{2s-1}`` is left to the caller.
    """
    prec = prec or default_context()
    _positive(x)
    # terms peak near e^x / sqrt(x); keep that many extra digits
    guard = 10 + int(float(x) / 2.3)
    work = _ctx(prec.digits + guard)
    mp = work.mp
    x = _lift(x, work)
    h = x / 2
    tol = mp.mpf(10) ** (-work.digits)
    # k = 0: psi(5/2) and Gamma(5/2) = 3 sqrt(pi) / 4
    psi = digamma_half(2, work)
    base = h ** mp.mpf(1.5) / (3 * mp.sqrt(mp.pi) / 4)  # (x/2)^{3/2+2k} / (k! Gamma(5/2+k))
    j_sum = base
    d_sum = base * psi
    small = 0
    k = 0
    while small < 3:
        k += 1
        if k > max_terms:
            raise SeriesNonConvergence(f"dJ/dnu series did not converge at x={x}")
        base *= -h * h / (k * (mp.mpf(3) / 2 + k))
        psi += 1 / (mp.mpf(3) / 2 + k)
        j_sum += base
        t = base * psi
        d_sum += t
        small = small + 1 if abs(t) <= tol * abs(d_sum) and abs(base) <= tol * abs(j_sum) else 0
    return prec.mp.mpf(j_sum * mp.log(h) - d_sum)


# --- double-precision vectorised forms ---------------------------------------

_SMALL = 2.0  # below: float series; above: high-precision evaluation rounded to double
_NTERMS = 14  # (x/2)^{2k} / (k!)^2 < 1e-20 for x < 2


def _split(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    return x, x < _SMALL


def _float_from_mp(fn, xs):
    ctx = _ctx(20)
    return np.array([float(fn(mpmath.mpf(float(v)), ctx)) for v in xs])


def bessel_J32_array(x):
    x, small = _split(x)
    out = np.empty_like(x)
    xs = x[small]
    h2 = (xs / 2) ** 2
    term = (xs / 2) ** 1.5 / math.gamma(2.5)
    s = term.copy()
    for k in range(1, _NTERMS):
        term = term * (-h2) / (k * (1.5 + k))
        s += term
    out[small] = s
    out[~small] = _float_from_mp(lambda v, c: bessel_J_half(1.5, v, c), x[~small])
    return out


def bessel_I32_array(x):
    x, small = _split(x)
    out = np.empty_like(x)
    xs = x[small]
    h2 = (xs / 2) ** 2
    term = (xs / 2) ** 1.5 / math.gamma(2.5)
    s = term.copy()
    for k in range(1, _NTERMS):
        term = term * h2 / (k * (1.5 + k))
        s += term
    out[small] = s
    out[~small] = _float_from_mp(lambda v, c: bessel_I_half(1.5, v, c), x[~small])
    return out


def dJ_dorder_at_3_2_array(x):
    x, small = _split(x)
    out = np.empty_like(x)
    xs = x[small]
    h = xs / 2
    h2 = h * h
    psi = -0.5772156649015329 - 2 * math.log(2) + 2 + 2 / 3
    base = h ** 1.5 / math.gamma(2.5)
    j = base.copy()
    d = base * psi
    for k in range(1, _NTERMS):
        base = base * (-h2) / (k * (1.5 + k))
        psi += 1 / (1.5 + k)
        j += base
        d += base * psi
    out[small] = j * np.log(h) - d
    out[~small] = _float_from_mp(dJ_dorder_at_3_2, x[~small])
    return out

"""Dedekind sums, the eta multiplier and the eta-twisted Kloosterman sums.

``K(m', n'; c) = sum_{d mod c, (d,c)=1} e^{pi i s(d,c)} e((dbar m' + d n') / c)``

Two evaluation routes are provided:

* :func:`kloosterman` -- exact rational phases from :func:`dedekind_sum`, summed
  at the working precision of a :class:`~maass52.special.PrecisionContext`.
* :func:`kloosterman_table` -- a compiled double-precision kernel for long runs
  of ``c``.  It never touches a Fraction: each phase is the integer
  ``12 c s(d,c) + 24 (dbar m' + d n') mod 24c``, where
  ``12 c s(d,c) = d + t + c * (q_1 - q_2 + q_3 - ...) - 3c [r odd]`` with
  ``q_i`` the ``r`` Euclidean quotients of ``c / d`` and ``t`` the raw Bezout
  cofactor of ``d``.  Terms ``d`` and ``c - d`` are complex conjugates, so only
  ``d < c/2`` is visited.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .special import PrecisionContext, default_context

try:
    from numba import njit

    _jit = njit(cache=True, nogil=True)
except ImportError:  # pragma: no cover - exercised only without numba
    def _jit(f):
        return f

__all__ = [
    "UnimodularMatrix",
    "KloostermanContext",
    "KloostermanImaginaryPartError",
    "dedekind_sum",
    "dedekind_sum_direct",
    "dedekind_sum_12c",
    "eta_multiplier",
    "kloosterman",
    "kloosterman_table",
    "clear_kloosterman_cache",
]


class KloostermanImaginaryPartError(ArithmeticError):
    """The imaginary part of a Kloosterman sum exceeded tolerance (an arithmetic bug, not bad input)."""


# --- Dedekind sums ---------------------------------------------------------


def _check_coprime(d: int, c: int):
    if c < 1:
        raise ValueError(f"modulus must be positive, got c={c}")
    if gcd(d, c) != 1:
        raise ValueError(f"d={d} and c={c} are not coprime")


def dedekind_sum_direct(d: int, c: int) -> Fraction:
    """``s(d,c) = sum_{r=1}^{c-1} (r/c - 1/2)(dr/c - floor(dr/c) - 1/2)``, O(c) exact."""
    _check_coprime(d, c)
    total = Fraction(0)
    for r in range(1, c):
        total += (Fraction(r, c) - Fraction(1, 2)) * (Fraction((d * r) % c, c) - Fraction(1, 2))
    return total


def dedekind_sum(d: int, c: int) -> Fraction:
    """Exact ``s(d, c)`` in O(log c) steps via reciprocity.

    Uses ``s(d,c) + s(c,d) = (d^2 + c^2 + 1)/(12cd) - 1/4`` for coprime
    ``0 < d < c``, ``s(d mod c, c) = s(d, c)`` and ``s(0, 1) = 0``.
    """
    _check_coprime(d, c)
    return _dedekind_reduced(d % c, c)


@lru_cache(maxsize=1 << 16)
def _dedekind_reduced(d: int, c: int) -> Fraction:
    total = Fraction(0)
    sign = 1
    while c > 1:
        total += sign * (Fraction(d * d + c * c + 1, 12 * c * d) - Fraction(1, 4))
        sign = -sign
        d, c = c % d, d
    return total


def dedekind_sum_12c(d: int, c: int) -> int:
    """The integer ``12 c s(d, c)`` from the Euclidean quotients (same identity as the kernel)."""
    _check_coprime(d, c)
    d %= c
    if c == 1:
        return 0
    cc, dd = c, d
    alt, sign, r = 0, 1, 0
    t0, t1 = 0, 1
    while dd:
        q = cc // dd
        alt += sign * q
        sign = -sign
        r += 1
        cc, dd = dd, cc - q * dd
        t0, t1 = t1, t0 - q * t1
    return d + t0 + c * alt - 3 * c * (r & 1)


# --- the multiplier ---------------------------------------------------------


@dataclass(frozen=True)
class UnimodularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self):
        return UnimodularMatrix(-self.a, -self.b, -self.c, -self.d)

    def act(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)


def eta_multiplier(g: UnimodularMatrix) -> Fraction:
    """Argument ``t in [0, 1)`` with ``epsilon(g) = e(t)``.

    ``eta(g z) = epsilon(g) (cz + d)^{1/2} eta(z)`` with the principal branch of
    the square root.
    """
    a, b, c, d = g.a, g.b, g.c, g.d
    if c > 0:
        t = Fraction(a + d - 3 * c, 24 * c) - dedekind_sum(d, c) / 2
    elif c == 0:
        # g = T^b or -T^{-b}; (cz+d)^{1/2} = (-1)^{1/2} contributes e(-1/4)
        t = Fraction(b, 24) if a == 1 else Fraction(-b, 24) - Fraction(1, 4)
    else:
        # (cz+d)^{1/2} = e(-1/4) (-cz-d)^{1/2} on the upper half plane
        t = eta_multiplier(-g) + Fraction(1, 4)
    return t - math.floor(t)


# --- Kloosterman sums -------------------------------------------------------


@dataclass(frozen=True)
class KloostermanContext:
    """Indices of ``K(m', n'; c)``; ``m = 24 m' + 1`` and ``n = 24 n' + 1``."""

    m_prime: int
    n_prime: int
    c: int

    def __post_init__(self):
        if self.c < 1:
            raise ValueError(f"c must be >= 1, got {self.c}")

    @classmethod
    def from_mn(cls, m: int, n: int, c: int) -> "KloostermanContext":
        if m % 24 != 1 or n % 24 != 1:
            raise ValueError("m and n must be = 1 mod 24")
        return cls((m - 1) // 24, (n - 1) // 24, c)


def kloosterman_phases(ctx: KloostermanContext) -> Dict[Fraction, int]:
    """Multiset of exact phases ``t`` (mod 1) with ``K = sum e(t)``."""
    c = ctx.c
    out: Dict[Fraction, int] = {}
    for d in range(c):
        if gcd(d, c) != 1:
            continue
        dbar = pow(d, -1, c) if c > 1 else 0
        t = dedekind_sum(d, c) / 2 + Fraction(dbar * ctx.m_prime + d * ctx.n_prime, c)
        t -= math.floor(t)
        out[t] = out.get(t, 0) + 1
    return out


def kloosterman(ctx: KloostermanContext, prec: PrecisionContext | None = None, imag_tol=None):
    """``K(m', n'; c)`` as a real number at the working precision of ``prec``.

    The sum is real; an imaginary part above ``imag_tol`` (default
    ``10**-(digits - 5)``) raises :class:`KloostermanImaginaryPartError`.
    """
    prec = prec or default_context()
    mp = prec.mp
    if imag_tol is None:
        imag_tol = mp.mpf(10) ** (-(prec.digits - 5))
    re = mp.mpf(0)
    im = mp.mpf(0)
    for t, mult in sorted(kloosterman_phases(ctx).items()):
        x = 2 * mp.mpf(t.numerator) / t.denominator
        re += mult * mp.cospi(x)
        im += mult * mp.sinpi(x)
    if abs(im) > imag_tol:
        raise KloostermanImaginaryPartError(
            f"Im K({ctx.m_prime},{ctx.n_prime};{ctx.c}) = {mp.nstr(im, 5)} exceeds {mp.nstr(imag_tol, 3)}"
        )
    return re


@_jit
def _kloosterman_kernel(pairs, c_lo, c_hi):
    """Rows: pairs; columns: c = c_lo..c_hi.  Double-precision cosines of exact phases."""
    npairs = pairs.shape[0]
    out = np.zeros((npairs, c_hi - c_lo + 1))
    acc = np.zeros(npairs)
    mred = np.zeros(npairs, np.int64)
    nred = np.zeros(npairs, np.int64)
    coprime = np.ones(c_hi // 2 + 2, np.bool_)
    for c in range(c_lo, c_hi + 1):
        col = c - c_lo
        if c == 1:
            for p in range(npairs):
                out[p, col] = 1.0
            continue
        if c == 2:
            # d = 1 only: dbar = 1, s(1, 2) = 0
            for p in range(npairs):
                out[p, col] = 1.0 if (pairs[p, 0] + pairs[p, 1]) % 2 == 0 else -1.0
            continue
        half = (c - 1) // 2
        # sieve the d in [1, half] sharing a prime factor with c
        for d in range(1, half + 1):
            coprime[d] = True
        rest = c
        f = 2
        while f * f <= rest:
            if rest % f == 0:
                for d in range(f, half + 1, f):
                    coprime[d] = False
                while rest % f == 0:
                    rest //= f
            f += 1
        if rest > 1:
            for d in range(rest, half + 1, rest):
                coprime[d] = False
        mod = 24 * c
        w = 2.0 * math.pi / mod
        for p in range(npairs):
            acc[p] = 0.0
            mred[p] = pairs[p, 0] % c
            nred[p] = pairs[p, 1] % c
        for d in range(1, half + 1):
            if not coprime[d]:
                continue
            cc = c
            dd = d
            alt = 0
            sgn = 1
            r = 0
            t0 = 0
            t1 = 1
            while dd != 0:
                q = cc // dd
                alt += sgn * q
                sgn = -sgn
                r += 1
                tmp = cc - q * dd
                cc = dd
                dd = tmp
                tmp = t0 - q * t1
                t0 = t1
                t1 = tmp
            u = (d + t0 + c * alt - 3 * c * (r & 1)) % mod
            dbar = t0 % c
            for p in range(npairs):
                ph = u + 24 * ((dbar * mred[p] + d * nred[p]) % c)
                if ph >= mod:
                    ph -= mod
                acc[p] += math.cos(w * ph)
        for p in range(npairs):
            out[p, col] = 2.0 * acc[p]
    return out


_TABLE: Dict[Tuple[int, int], np.ndarray] = {}
_TABLE_LOCK = threading.Lock()


def clear_kloosterman_cache():
    with _TABLE_LOCK:
        _TABLE.clear()


def kloosterman_table(pairs: Iterable[Tuple[int, int]], c_max: int) -> Dict[Tuple[int, int], np.ndarray]:
    """``{(m', n'): K}`` with ``K[c] = K(m', n'; c)`` for ``1 <= c <= c_max`` (``K[0] = 0``).

    Arrays are memoised per ``(m', n')``; a longer request extends the stored
    array by computing only the missing ``c`` range, and all missing pairs of
    one request share a single kernel pass.
    """
    if c_max < 1:
        raise ValueError("c_max must be >= 1")
    pairs = list(dict.fromkeys((int(a), int(b)) for a, b in pairs))
    with _TABLE_LOCK:
        have = {p: _TABLE.get(p) for p in pairs}
    todo: Dict[int, list] = {}
    for p, arr in have.items():
        known = 0 if arr is None else len(arr) - 1
        if known < c_max:
            todo.setdefault(known, []).append(p)
    for known, group in sorted(todo.items()):
        block = _kloosterman_kernel(np.array(group, dtype=np.int64), known + 1, c_max)
        with _TABLE_LOCK:
            for row, p in enumerate(group):
                old = _TABLE.get(p)
                base = np.zeros(1) if old is None else old[: known + 1]
                _TABLE[p] = np.concatenate([base, block[row]])
    with _TABLE_LOCK:
        return {p: _TABLE[p][: c_max + 1] for p in pairs}


def kloosterman_float(m_prime: int, n_prime: int, c: int) -> float:
    return float(kloosterman_table([(m_prime, n_prime)], c)[(m_prime, n_prime)][c])


def pairs_for(mn: Sequence[Tuple[int, int]]):
    """Map ``(m, n)`` with ``m, n = 1 mod 24`` to ``(m', n')``."""
    return [((m - 1) // 24, (n - 1) // 24) for m, n in mn]

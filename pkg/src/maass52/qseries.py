"""Exact q-expansions with fractional grading and the weakly holomorphic bases.

Two series types are used:

* ``IntegerQSeries`` -- integral exponents ``q^k`` (``j``, ``j'``, ``E_4``, ``Delta``).
* ``FracQSeries`` -- exponents ``q^{n/24}`` with ``n`` in one residue class mod 24.
  ``eta^{-1}`` and the weight -1/2 forms ``g_m`` live in class 23, ``eta`` and the
  weight 5/2 forms ``h_m`` in class 1.

Both carry an ``order``: the largest exponent whose coefficient is known.  Nothing
past ``order`` is ever implied to be zero, and every operation computes the order
of its result from the orders of its inputs.

Convention: ``j = q^{-1} + 744 + 196884 q + ...`` (constant term 744), which is the
normalisation under which ``g_25 = eta^{-1} (j - 745)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Dict, List, Sequence, Tuple

__all__ = [
    "FracQSeries",
    "IntegerQSeries",
    "TruncationError",
    "euler_product",
    "eta_expansion",
    "eta_inverse",
    "eisenstein_e4",
    "delta_expansion",
    "j_expansion",
    "j_prime_expansion",
    "multiply",
    "basis_g",
    "basis_h_neg",
    "basis_polynomial",
]


class TruncationError(ValueError):
    """Raised when an operation would have to invent coefficients past a known order."""


def _normalize(c):
    """Keep exact rationals as ``int`` whenever the denominator is 1."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _check_rational(c):
    if isinstance(c, bool) or not isinstance(c, Rational):
        raise TypeError(f"series coefficients must be exact rationals, got {type(c).__name__}")
    return _normalize(c)


def _convolve(a: Sequence, b: Sequence, length: int) -> List:
    """First ``length`` coefficients of the Cauchy product of two dense sequences."""
    out = [0] * length
    la, lb = len(a), len(b)
    for i in range(min(la, length)):
        ai = a[i]
        if not ai:
            continue
        top = min(lb, length - i)
        for k in range(top):
            bk = b[k]
            if bk:
                out[i + k] += ai * bk
    return [_normalize(c) for c in out]


def _invert_unit(a: Sequence, length: int) -> List:
    """Inverse of a power series with constant term +-1, to ``length`` terms."""
    if a[0] not in (1, -1):
        raise ValueError("only series with unit constant term are inverted exactly here")
    inv0 = a[0]
    b = [0] * length
    b[0] = inv0
    for n in range(1, length):
        acc = 0
        for k in range(1, min(n, len(a) - 1) + 1):
            if a[k]:
                acc += a[k] * b[n - k]
        b[n] = _normalize(-acc * inv0)
    return b


@dataclass(frozen=True)
class IntegerQSeries:
    """``sum_{k=start}^{order} c_k q^k`` with exact coefficients."""

    start: int
    values: Tuple

    def __post_init__(self):
        if not self.values:
            raise TruncationError("a series needs at least one known coefficient")
        object.__setattr__(self, "values", tuple(_check_rational(v) for v in self.values))

    @property
    def min_exponent(self) -> int:
        return self.start

    @property
    def order(self) -> int:
        return self.start + len(self.values) - 1

    @property
    def coeffs(self) -> Dict[int, Rational]:
        return {self.start + i: c for i, c in enumerate(self.values)}

    def __getitem__(self, k: int):
        if k > self.order:
            raise TruncationError(f"coefficient of q^{k} is beyond the known order {self.order}")
        if k < self.start:
            return 0
        return self.values[k - self.start]

    def truncate(self, order: int) -> "IntegerQSeries":
        if order > self.order:
            raise TruncationError(f"cannot extend a series known to q^{self.order} up to q^{order}")
        return IntegerQSeries(self.start, self.values[: order - self.start + 1])

    def to_frac(self) -> "FracQSeries":
        """The same series in 1/24-graded form (residue class 0)."""
        return FracQSeries(0, 24 * self.start, self.values)

    def __add__(self, other):
        if isinstance(other, IntegerQSeries):
            return _add_int(self, other, 1)
        if isinstance(other, Rational) and not isinstance(other, bool):
            return _add_int(self, IntegerQSeries(0, (other,)), 1, extend_scalar=True)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, IntegerQSeries):
            return _add_int(self, other, -1)
        if isinstance(other, Rational) and not isinstance(other, bool):
            return _add_int(self, IntegerQSeries(0, (other,)), -1, extend_scalar=True)
        return NotImplemented

    def __neg__(self):
        return IntegerQSeries(self.start, tuple(-v for v in self.values))

    def __mul__(self, other):
        if isinstance(other, Rational) and not isinstance(other, bool):
            return IntegerQSeries(self.start, tuple(_normalize(v * other) for v in self.values))
        if isinstance(other, (IntegerQSeries, FracQSeries)):
            return multiply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Rational) and not isinstance(other, bool):
            return self * other
        return NotImplemented

    def derivative_theta(self) -> "IntegerQSeries":
        """``q d/dq`` applied termwise."""
        return IntegerQSeries(self.start, tuple((self.start + i) * c for i, c in enumerate(self.values)))


def _add_int(a: IntegerQSeries, b: IntegerQSeries, sign: int, extend_scalar=False) -> IntegerQSeries:
    # a scalar is exact to every order, so it never limits the order of the result
    order = a.order if extend_scalar else min(a.order, b.order)
    start = min(a.start, b.start)
    if start > order:
        raise TruncationError("sum has no valid coefficients")

    def coef(s, k):
        return s.values[k - s.start] if s.start <= k <= s.order else 0

    return IntegerQSeries(start, tuple(coef(a, k) + sign * coef(b, k) for k in range(start, order + 1)))


@dataclass(frozen=True)
class FracQSeries:
    """``sum c_n q^{n/24}`` over ``n = start, start+24, ..., order``.

    ``residue`` is ``n mod 24`` for every stored numerator.  ``values[i]`` is the
    coefficient of ``q^{(start + 24 i)/24}``.
    """

    residue: int
    start: int
    values: Tuple

    def __post_init__(self):
        if not 0 <= self.residue < 24:
            raise ValueError("residue must lie in 0..23")
        if self.start % 24 != self.residue:
            raise ValueError(f"start numerator {self.start} is not in residue class {self.residue} mod 24")
        if not self.values:
            raise TruncationError("a series needs at least one known coefficient")
        object.__setattr__(self, "values", tuple(_check_rational(v) for v in self.values))

    @property
    def min_exponent_numerator(self) -> int:
        return self.start

    @property
    def order(self) -> int:
        """Largest exponent numerator with a known coefficient."""
        return self.start + 24 * (len(self.values) - 1)

    @property
    def coeffs(self) -> Dict[int, Rational]:
        return {self.start + 24 * i: c for i, c in enumerate(self.values)}

    def nonzero_terms(self) -> List[Tuple[int, Rational]]:
        return [(self.start + 24 * i, c) for i, c in enumerate(self.values) if c]

    def __getitem__(self, n: int):
        if n % 24 != self.residue:
            raise KeyError(f"exponent numerator {n} is not in residue class {self.residue} mod 24")
        if n > self.order:
            raise TruncationError(f"coefficient of q^({n}/24) is beyond the known order {self.order}/24")
        if n < self.start:
            return 0
        return self.values[(n - self.start) // 24]

    def coefficient(self, n: int):
        return self[n]

    def truncate(self, order: int) -> "FracQSeries":
        """Drop every coefficient with exponent numerator above ``order``."""
        if order > self.order:
            raise TruncationError(f"cannot extend a series known to q^({self.order}/24) up to q^({order}/24)")
        if order < self.start:
            raise TruncationError("truncation would leave no coefficients")
        keep = (order - self.start) // 24 + 1
        return FracQSeries(self.residue, self.start, self.values[:keep])

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for v in self.values)

    def assert_integral(self) -> "FracQSeries":
        bad = [(n, c) for n, c in self.coeffs.items() if not isinstance(c, int)]
        if bad:
            raise ArithmeticError(f"non-integral coefficient {bad[0][1]} at q^({bad[0][0]}/24)")
        return self

    def is_zero(self) -> bool:
        return not any(self.values)

    def _aligned(self, other: "FracQSeries"):
        if other.residue != self.residue:
            raise ValueError(f"cannot add series in residue classes {self.residue} and {other.residue}")
        order = min(self.order, other.order)
        start = min(self.start, other.start)
        if start > order:
            raise TruncationError("sum has no valid coefficients")
        return start, order

    def __add__(self, other):
        if not isinstance(other, FracQSeries):
            return NotImplemented
        start, order = self._aligned(other)
        return FracQSeries(self.residue, start, tuple(self[n] + other[n] for n in range(start, order + 1, 24)))

    def __sub__(self, other):
        if not isinstance(other, FracQSeries):
            return NotImplemented
        start, order = self._aligned(other)
        return FracQSeries(self.residue, start, tuple(self[n] - other[n] for n in range(start, order + 1, 24)))

    def __neg__(self):
        return FracQSeries(self.residue, self.start, tuple(-v for v in self.values))

    def __mul__(self, other):
        if isinstance(other, Rational) and not isinstance(other, bool):
            return FracQSeries(self.residue, self.start, tuple(_normalize(v * other) for v in self.values))
        if isinstance(other, (IntegerQSeries, FracQSeries)):
            return multiply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Rational) and not isinstance(other, bool):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, FracQSeries):
            return NotImplemented
        return (self.residue, self.start, self.values) == (other.residue, other.start, other.values)

    def __hash__(self):
        return hash((self.residue, self.start, self.values))

    def to_json_obj(self) -> dict:
        """JSON-ready dict; big coefficients become decimal strings (``"a/b"`` for rationals)."""
        return {
            "residue": self.residue,
            "start": self.start,
            "order": self.order,
            "terms": [{"n": n, "c": str(c)} for n, c in self.nonzero_terms()],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "FracQSeries":
        residue, start, order = int(obj["residue"]), int(obj["start"]), int(obj["order"])
        vals = [0] * ((order - start) // 24 + 1)
        for term in obj["terms"]:
            n = int(term["n"])
            if (n - start) % 24:
                raise ValueError(f"term numerator {n} is not in the series' residue class")
            vals[(n - start) // 24] = _normalize(Fraction(term["c"]))
        return cls(residue, start, tuple(vals))

    def __repr__(self):
        head = " + ".join(f"{c}*q^({n}/24)" for n, c in self.nonzero_terms()[:4])
        return f"FracQSeries({head} + O(q^({self.order + 24}/24)))"


def multiply(a, b):
    """Exact Cauchy product of two series, truncated at the largest valid order.

    The known part of ``a*b`` ends at ``min(a.order + b.start, b.order + a.start)``.
    Integer-graded inputs are promoted to the 1/24 grading when mixed with a
    ``FracQSeries``; the result residue is the sum of the input residues mod 24.
    """
    if isinstance(a, IntegerQSeries) and isinstance(b, IntegerQSeries):
        order = min(a.order + b.start, b.order + a.start)
        start = a.start + b.start
        if order < start:
            raise TruncationError("product has no valid coefficients")
        return IntegerQSeries(start, tuple(_convolve(a.values, b.values, order - start + 1)))
    if isinstance(a, IntegerQSeries):
        a = a.to_frac()
    if isinstance(b, IntegerQSeries):
        b = b.to_frac()
    order = min(a.order + b.start, b.order + a.start)
    start = a.start + b.start
    if order < start:
        raise TruncationError("product has no valid coefficients")
    length = (order - start) // 24 + 1
    return FracQSeries((a.residue + b.residue) % 24, start, tuple(_convolve(a.values, b.values, length)))


# --- basic products --------------------------------------------------------


@lru_cache(maxsize=None)
def euler_product(N: int) -> Tuple[int, ...]:
    """Coefficients of ``prod_{n>=1} (1 - q^n)`` up to ``q^N`` via the pentagonal number theorem."""
    if N < 0:
        raise ValueError("N must be >= 0")
    out = [0] * (N + 1)
    k = 0
    while True:
        sign = -1 if k % 2 else 1
        e1 = k * (3 * k - 1) // 2
        if e1 > N:
            break
        out[e1] += sign
        if k:
            e2 = k * (3 * k + 1) // 2
            if e2 <= N:
                out[e2] += sign
        k += 1
    return tuple(out)


def eta_expansion(N: int) -> FracQSeries:
    """``eta = q^{1/24} prod (1 - q^n)``, known through ``q^{(24N+1)/24}``."""
    return FracQSeries(1, 1, euler_product(N))


@lru_cache(maxsize=None)
def _eta_inverse_values(N: int) -> Tuple[int, ...]:
    return tuple(_invert_unit(euler_product(N), N + 1))


def eta_inverse(N: int) -> FracQSeries:
    """``eta^{-1} = sum p(n) q^{n - 1/24}`` for ``0 <= n <= N`` (numerators up to ``24N - 1``)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return FracQSeries(23, -1, _eta_inverse_values(N))


def _sigma3(n: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** 3
            e = n // d
            if e != d:
                total += e ** 3
        d += 1
    return total


@lru_cache(maxsize=None)
def eisenstein_e4(N: int) -> IntegerQSeries:
    """``E_4 = 1 + 240 sum sigma_3(n) q^n`` through ``q^N``."""
    return IntegerQSeries(0, (1,) + tuple(240 * _sigma3(n) for n in range(1, N + 1)))


@lru_cache(maxsize=None)
def delta_expansion(N: int) -> IntegerQSeries:
    """``Delta = eta^24 = q prod (1 - q^n)^24`` through ``q^N`` (``N >= 1``)."""
    if N < 1:
        raise ValueError("Delta starts at q^1; need N >= 1")
    e = IntegerQSeries(0, euler_product(N - 1))
    e2 = e * e
    e4 = e2 * e2
    e8 = e4 * e4
    e16 = e8 * e8
    return IntegerQSeries(1, (e16 * e8).values)


@lru_cache(maxsize=None)
def j_expansion(N: int) -> IntegerQSeries:
    """``j = E_4^3 / Delta`` through ``q^N``, with constant term 744."""
    if N < -1:
        raise ValueError("N must be >= -1")
    length = N + 2
    e4 = eisenstein_e4(length - 1)
    num = e4 * e4 * e4
    # Delta = q * D(q) with D(0) = 1
    d = delta_expansion(length).values
    inv = _invert_unit(d, length)
    return IntegerQSeries(-1, tuple(_convolve(num.values, inv, length)))


def j_prime_expansion(N: int) -> IntegerQSeries:
    """``j' = -q dj/dq`` through ``q^N``."""
    return -j_expansion(N).derivative_theta()


# --- the bases g_m (m > 0) and h_m (m < 0) ---------------------------------


def _check_index(m: int, positive: bool):
    if isinstance(m, bool) or not isinstance(m, int):
        raise TypeError("basis index must be an integer")
    if m % 24 != 1:
        raise ValueError(f"basis index must be = 1 mod 24, got {m}")
    if positive and m <= 0:
        raise ValueError(f"g_m needs m > 0, got {m}")
    if not positive and m >= 0:
        raise ValueError(f"h_m is weakly holomorphic only for m < 0, got {m}")


def _poly_mul_j(p: List[int]) -> List[int]:
    # coefficients listed from the constant term upward
    return [0] + p


def _poly_sub(p: List, q: List, c) -> List:
    out = list(p) + [0] * max(0, len(q) - len(p))
    for i, v in enumerate(q):
        out[i] -= c * v
    return out


def _reduce_family(seed: FracQSeries, j: IntegerQSeries, steps: int, top_negative: int):
    """Build the family ``f_0 = seed, f_i = f_{i-1} j - (principal part corrections)``.

    ``f_i`` has leading term ``q^{(seed.start - 24 i)/24}`` and no other negative
    exponent below ``top_negative``.  Each correction uses earlier members, which
    each carry exactly one term in the eliminated range.
    """
    family = [seed]
    polys = [[1]]
    for i in range(1, steps + 1):
        f = family[-1] * j
        poly = _poly_mul_j(polys[-1])
        for n in range(f.start + 24, top_negative + 1, 24):
            c = f[n]
            if c:
                idx = (seed.start - n) // 24
                f = f - family[idx] * c
                poly = _poly_sub(poly, polys[idx], c)
        family.append(f)
        polys.append(poly)
    return family, polys


@lru_cache(maxsize=None)
def _g_family(steps: int, N: int):
    g1 = eta_inverse(N + steps)
    j = j_expansion(N + steps)
    family, polys = _reduce_family(g1, j, steps, -1)
    target = 24 * N - 1
    return tuple(f.truncate(target).assert_integral() for f in family), tuple(tuple(p) for p in polys)


@lru_cache(maxsize=None)
def _h_family(steps: int, N: int):
    eta = eta_expansion(N + steps + 1)
    jp = j_prime_expansion(N + steps)
    h23 = eta * jp
    j = j_expansion(N + steps)
    family, polys = _reduce_family(h23, j, steps, -23)
    target = 24 * N - 23
    return tuple(f.truncate(target).assert_integral() for f in family), tuple(tuple(p) for p in polys)


def basis_g(m: int, N: int) -> FracQSeries:
    """The weight -1/2 form ``g_m = q^{-m/24} + O(q^{23/24})``, ``m > 0``.

    ``N`` counts the positive exponents kept: numerators ``23, 47, ..., 24N - 1``.
    Built as ``eta^{-1} P(j)`` with ``P`` monic of degree ``(m-1)/24``.
    """
    _check_index(m, positive=True)
    if N < 0:
        raise ValueError("N must be >= 0")
    return _g_family((m - 1) // 24, N)[0][-1]


def basis_h_neg(m: int, N: int) -> FracQSeries:
    """The weight 5/2 form ``h_m = q^{m/24} + sum_{n>0} p_m^+(n) q^{n/24}``, ``m < 0``.

    ``N`` counts the positive exponents kept: numerators ``1, 25, ..., 24N - 23``.
    Built as ``eta j' P(j)`` with ``P`` monic of degree ``(-m-23)/24``.
    """
    _check_index(m, positive=False)
    if N < 1:
        raise ValueError("N must be >= 1")
    return _h_family((-m - 23) // 24, N)[0][-1]


def basis_polynomial(m: int) -> Tuple[int, ...]:
    """Coefficients (constant term first) of the monic ``P`` with
    ``g_m = eta^{-1} P(j)`` for ``m > 0`` or ``h_m = eta j' P(j)`` for ``m < 0``."""
    if m > 0:
        _check_index(m, positive=True)
        return _g_family((m - 1) // 24, 1)[1][-1]
    _check_index(m, positive=False)
    return _h_family((-m - 23) // 24, 1)[1][-1]

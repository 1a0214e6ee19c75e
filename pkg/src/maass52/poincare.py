"""Kloosterman/Bessel coefficient series for the weight 5/2 forms h_m and for p(n).

Each c-sum is returned as a :class:`SeriesValue` carrying its truncation point,
a heuristic tail estimate and a convergence flag.  Long sums run in double
precision on :func:`~maass52.kloosterman.kloosterman_table`; Rademacher's series
for ``p(n)`` is short and runs entirely at the working precision with exact
Kloosterman phases.

Tail heuristic
--------------
With ``S(X)`` the partial sum up to ``c = X`` and blocks of width ``C/100``,
``tail = max(10 * max |last 10 block sums|, |S(C) - S(C/2)|)``.  The second
term is what catches the ``~A/C`` tails seen when both indices are squares.
``converged`` additionally requires the doubling differences
``|S(X) - S(X/2)|`` at ``X = C/100, C/10, C`` to decrease.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from .kloosterman import KloostermanContext, kloosterman, kloosterman_table
from .special import (
    PrecisionContext,
    bessel_I32_array,
    bessel_J32_array,
    dJ_dorder_at_3_2_array,
)

__all__ = [
    "SeriesConfig",
    "SeriesValue",
    "MaassFormExpansion",
    "RademacherResult",
    "L_value",
    "L_deriv",
    "mock_coefficient",
    "shadow_coefficient",
    "h_expansion",
    "rademacher_p",
    "rademacher_tail_bound",
    "partition_oracle",
]


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation and precision of the c-sums.

    A sum counts as converged when its tail estimate is below
    ``tol + rtol * |value|``, in the units of the returned value.
    """

    c_max: int = 10000
    digits: int = 40
    tol: float = 1e-6
    rtol: float = 0.0

    def __post_init__(self):
        if self.c_max < 1:
            raise ValueError("c_max must be >= 1")
        if self.digits < 15:
            raise ValueError("digits must be >= 15")
        if not self.tol > 0 or self.rtol < 0:
            raise ValueError("tol must be positive and rtol non-negative")

    def accepts(self, tail: float, value: float) -> bool:
        return tail < self.tol + self.rtol * abs(value)

    @property
    def precision(self) -> PrecisionContext:
        return PrecisionContext(self.digits)


@dataclass(frozen=True)
class SeriesValue:
    value: float
    c_max: int
    tail_estimate: float
    converged: bool
    diagnostics: dict = field(default_factory=dict, compare=False)

    def scaled(self, factor: float, cfg: SeriesConfig) -> "SeriesValue":
        tail = abs(factor) * self.tail_estimate
        value = factor * self.value
        return replace(
            self,
            value=value,
            tail_estimate=tail,
            converged=bool(cfg.accepts(tail, value) and self.diagnostics.get("monotone", True)),
        )

    def to_json_obj(self):
        return {
            "value": repr(float(self.value)),
            "c_max": self.c_max,
            "tail_estimate": float(self.tail_estimate),
            "converged": self.converged,
        }


def _check_index(k: int, name: str):
    if k % 24 != 1:
        raise ValueError(f"{name}={k} is not 1 mod 24")


def _summarize(terms: np.ndarray, cfg: SeriesConfig) -> SeriesValue:
    """Compensated total of ``terms[c-1]`` plus the tail heuristic described above."""
    C = len(terms)
    total = math.fsum(terms)

    def partial(x):
        return math.fsum(terms[: max(1, int(x))])

    block = max(1, C // 100)
    nblocks = min(10, C // block)
    blocks = [math.fsum(terms[C - (i + 1) * block: C - i * block]) for i in range(nblocks)]
    last_doubling = abs(total - partial(C / 2))
    tail = max(10 * max((abs(b) for b in blocks), default=0.0), last_doubling)
    doublings = []
    for x in (C / 100, C / 10, C):
        if x >= 2:
            doublings.append(abs(partial(x) - partial(x / 2)))
    monotone = all(a >= b for a, b in zip(doublings, doublings[1:]))
    return SeriesValue(
        value=total,
        c_max=C,
        tail_estimate=tail,
        converged=bool(cfg.accepts(tail, total) and monotone),
        diagnostics={"doubling_differences": doublings, "monotone": monotone, "block": block},
    )


def _kernel_arguments(m: int, n: int, c_max: int) -> Tuple[np.ndarray, np.ndarray]:
    K = kloosterman_table([((m - 1) // 24, (n - 1) // 24)], c_max)[((m - 1) // 24, (n - 1) // 24)]
    cs = np.arange(1, c_max + 1, dtype=float)
    x = math.pi * math.sqrt(abs(m * n)) / 6 / cs
    return K[1:] / cs, x


def L_value(m: int, n: int, cfg: SeriesConfig = SeriesConfig()) -> SeriesValue:
    """``L_{m,n}(5/4) = sum_c K(m',n';c)/c * B(pi sqrt|mn| / 6c)``, ``B = J_{3/2}`` or ``I_{3/2}`` by the sign of ``mn``."""
    _check_index(m, "m")
    _check_index(n, "n")
    w, x = _kernel_arguments(m, n, cfg.c_max)
    bessel = bessel_J32_array(x) if m * n > 0 else bessel_I32_array(x)
    return _summarize(w * bessel, cfg)


def L_deriv(m: int, n: int, cfg: SeriesConfig = SeriesConfig()) -> SeriesValue:
    """``d/ds L_{m,n}(s)`` at ``s = 5/4`` for ``m, n > 0``: the J-kernel differentiated in its order."""
    _check_index(m, "m")
    _check_index(n, "n")
    if m <= 0 or n <= 0:
        raise ValueError("L_deriv needs m, n > 0")
    w, x = _kernel_arguments(m, n, cfg.c_max)
    return _summarize(w * 2 * dJ_dorder_at_3_2_array(x), cfg)


def mock_coefficient(m: int, n: int, cfg: SeriesConfig = SeriesConfig()) -> SeriesValue:
    """Holomorphic coefficient of ``q^{n/24}`` in ``h_m`` for ``n > 0``.

    ``m > 0``: ``-(8 sqrt(pi)/3) (n/m)^{3/4} dL_{m,n}`` (the real part when ``n = m``;
    the imaginary part ``-(4/3) sqrt(pi)`` is kept separately).
    ``m < 0``: ``-2 pi |n/m|^{3/4} L_{m,n}(5/4)``.
    """
    _check_index(m, "m")
    _check_index(n, "n")
    if n <= 0:
        raise ValueError("holomorphic coefficients are indexed by n > 0")
    ratio = abs(n / m) ** 0.75
    if m > 0:
        return L_deriv(m, n, cfg).scaled(-(8 * math.sqrt(math.pi) / 3) * ratio, cfg)
    return L_value(m, n, cfg).scaled(-2 * math.pi * ratio, cfg)


def shadow_coefficient(m: int, N: int, cfg: SeriesConfig = SeriesConfig()) -> SeriesValue:
    """Coefficient of ``beta(N y) q^{-N/24}`` in ``h_m`` (``m > 0``, ``N = 23 mod 24``)."""
    _check_index(m, "m")
    if m <= 0:
        raise ValueError("only h_m with m > 0 has a nonholomorphic part")
    if N <= 0 or N % 24 != 23:
        raise ValueError(f"N={N} must be positive and 23 mod 24")
    return L_value(m, -N, cfg).scaled(-2 * math.pi * (N / m) ** 0.75, cfg)


@dataclass
class MaassFormExpansion:
    """``h_m = sum holo[n] q^{n/24} + i*holo_imag[n] q^{n/24} + sum nonholo[N] beta(N y) q^{-N/24}``.

    For ``m > 0`` the term ``i beta(-m y) q^{m/24}`` is recorded as
    ``nonholo_exact[-m] = 1j``; for ``m < 0`` the principal part ``q^{m/24}`` is
    ``holo_exact[m] = 1``.
    """

    m: int
    holo: Dict[int, SeriesValue] = field(default_factory=dict)
    holo_imag: Dict[int, float] = field(default_factory=dict)
    nonholo: Dict[int, SeriesValue] = field(default_factory=dict)
    holo_exact: Dict[int, int] = field(default_factory=dict)
    nonholo_exact: Dict[int, complex] = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return all(v.converged for v in list(self.holo.values()) + list(self.nonholo.values()))

    def to_json_obj(self):
        def pack(d):
            return [{"n": k, **v.to_json_obj()} for k, v in sorted(d.items())]

        return {
            "m": self.m,
            "exact_holomorphic": [{"n": k, "c": str(v)} for k, v in sorted(self.holo_exact.items())],
            "holomorphic": pack(self.holo),
            "holomorphic_imaginary": [{"n": k, "value": repr(v)} for k, v in sorted(self.holo_imag.items())],
            "nonholomorphic": pack(self.nonholo),
            "exact_nonholomorphic": [
                {"n": k, "re": repr(v.real), "im": repr(v.imag)} for k, v in sorted(self.nonholo_exact.items())
            ],
            "converged": self.converged,
        }


def h_expansion(m: int, terms: int, cfg: SeriesConfig = SeriesConfig()) -> MaassFormExpansion:
    """Analytic expansion of ``h_m`` with ``terms`` positive holomorphic exponents ``1, 25, ...``.

    For ``m > 0`` the nonholomorphic part gets ``terms`` coefficients at
    ``N = 23, 47, ...`` as well.
    """
    _check_index(m, "m")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    out = MaassFormExpansion(m)
    ns = [1 + 24 * i for i in range(terms)]
    # one kernel pass for every pair this expansion touches
    pairs = [((m - 1) // 24, (n - 1) // 24) for n in ns]
    if m > 0:
        pairs += [((m - 1) // 24, (-N - 1) // 24) for N in (23 + 24 * i for i in range(terms))]
    kloosterman_table(pairs, cfg.c_max)
    if m < 0:
        out.holo_exact[m] = 1
    for n in ns:
        out.holo[n] = mock_coefficient(m, n, cfg)
    if m > 0:
        if m in out.holo:
            out.holo_imag[m] = -(4 / 3) * math.sqrt(math.pi)
        out.nonholo_exact[-m] = 1j
        for i in range(terms):
            N = 23 + 24 * i
            out.nonholo[N] = shadow_coefficient(m, N, cfg)
    return out


# --- partitions ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _partition_table(n: int) -> Tuple[int, ...]:
    p = [1] + [0] * n
    for k in range(1, n + 1):
        s = 0
        j = 1
        while True:
            g1 = j * (3 * j - 1) // 2
            if g1 > k:
                break
            sign = 1 if j % 2 else -1
            s += sign * p[k - g1]
            g2 = j * (3 * j + 1) // 2
            if g2 <= k:
                s += sign * p[k - g2]
            j += 1
        p[k] = s
    return tuple(p)


def partition_oracle(n: int) -> int:
    """``p(n)`` by Euler's pentagonal recurrence."""
    if n < 0:
        return 0
    return _partition_table(max(n, 64 * (1 + n // 64)))[n]


@dataclass(frozen=True)
class RademacherResult:
    n: int
    value: object  # mpf at the working precision
    rounded: int
    c_max: int
    tail_bound: float
    margin: float
    certified: bool

    def to_json_obj(self):
        return {
            "n": self.n,
            "p": str(self.rounded),
            "value": str(self.value),
            "c_max": self.c_max,
            "tail_bound": self.tail_bound,
            "margin": self.margin,
            "certified": self.certified,
        }


_KAPPA = math.pi ** 2 * (2 / 3) ** 1.5 / (6 * math.sqrt(2))


def rademacher_tail_bound(n: int, C: int) -> float:
    """Upper bound for the terms ``c > C`` using ``|K| <= c``.

    With ``u = a sqrt(lambda)``, ``(u cosh u - sinh u) <= u^3 cosh(u) / 3`` gives
    ``|term_c| <= kappa c^{-3/2} cosh(u_c)``; integrating ``c^{-3/2}`` from ``C`` on
    yields ``2 kappa cosh(u_{C+1}) / sqrt(C)``.
    """
    lam = n - 1 / 24
    u = math.pi * math.sqrt(2 / 3) * math.sqrt(lam) / (C + 1)
    return 2 * _KAPPA * math.cosh(u) / math.sqrt(C)


def _auto_c(n: int, target: float = 0.25) -> int:
    C = 1
    while rademacher_tail_bound(n, C) >= target:
        C += 1
    return C


def rademacher_p(n: int, digits: int = 50, c_max: Optional[int] = None) -> RademacherResult:
    """Rademacher's series for ``p(n)`` at ``digits`` precision.

    ``term_c = K(0, -n; c) sqrt(c) d/dn[sinh(a sqrt(lambda)) / sqrt(lambda)] / (pi sqrt 2)``
    with ``lambda = n - 1/24`` and ``a = pi sqrt(2/3) / c``; the derivative is
    ``(u cosh u - sinh u) / (2 lambda^{3/2})``.  Without ``c_max`` the truncation is
    the least ``C`` whose :func:`rademacher_tail_bound` is below 1/4.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    prec = PrecisionContext(digits)
    mp = prec.mp
    C = c_max if c_max is not None else _auto_c(n)
    lam = mp.mpf(24 * n - 1) / 24
    root = mp.sqrt(lam)
    total = mp.mpf(0)
    for c in range(1, C + 1):
        K = kloosterman(KloostermanContext(0, -n, c), prec)
        if K == 0:
            continue
        u = mp.pi * mp.sqrt(mp.mpf(2) / 3) / c * root
        d = (u * mp.cosh(u) - mp.sinh(u)) / (2 * lam * root)
        total += K * mp.sqrt(c) * d
    total /= mp.pi * mp.sqrt(2)
    rounded = int(mp.nint(total))
    bound = rademacher_tail_bound(n, C)
    margin = float(abs(total - rounded))
    return RademacherResult(
        n=n,
        value=total,
        rounded=rounded,
        c_max=C,
        tail_bound=bound,
        margin=margin,
        certified=margin + bound < 0.5,
    )

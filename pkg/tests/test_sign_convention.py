"""h_1 must vanish at z = i: the weight 5/2 transformation under z -> -1/z with
multiplier e(-1/8) gives F(i) = e(-1/8) e(5/8) F(i) = -F(i).

This fixes the signs of the holomorphic coefficients and of the imaginary
q^{1/24} term without relying on tabulated values.
"""
import cmath
import math

import mpmath

from maass52.poincare import SeriesConfig, h_expansion, partition_oracle


def _h1_at_i(holo, imag, holo_sign=1, imag_sign=1):
    y = 1.0
    q = lambda n: math.exp(-2 * math.pi * n * y / 24)
    v = sum(holo_sign * c * q(n) for n, c in holo.items())
    v += imag_sign * 1j * imag * q(1)
    # i beta(-y) q^{1/24}; beta at a negative argument continues Gamma(-3/2, .)
    v += 1j * complex(mpmath.gammainc(-1.5, -math.pi * y / 6)) * q(1)
    for k in range(1, 40):
        N = 24 * k - 1
        v += -N ** 1.5 * partition_oracle(k) * float(mpmath.gammainc(-1.5, math.pi * N * y / 6)) * q(-N)
    return v


def test_h1_vanishes_at_i_with_stated_signs():
    exp = h_expansion(1, 8, SeriesConfig(c_max=5000, tol=1.0))
    holo = {n: v.value for n, v in exp.holo.items()}
    imag = exp.holo_imag[1]
    assert imag < 0
    good = abs(_h1_at_i(holo, imag))
    assert good < 0.02
    for hs, is_ in ((-1, 1), (1, -1), (-1, -1)):
        assert abs(_h1_at_i(holo, imag, hs, is_)) > 50 * good
    # coefficient signs of the analytic route
    assert holo[25] < 0 and holo[49] < 0 and holo[73] < 0

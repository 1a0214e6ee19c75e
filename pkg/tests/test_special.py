import mpmath
import numpy as np
import pytest

from maass52.special import (
    PrecisionContext,
    SeriesNonConvergence,
    beta_gamma,
    bessel_I32_array,
    bessel_I_half,
    bessel_I_series,
    bessel_J32_array,
    bessel_J_half,
    bessel_J_series,
    dJ_dorder_at_3_2,
    dJ_dorder_at_3_2_array,
    digamma_half,
    erfc,
    gamma_minus_three_halves,
)

P40 = PrecisionContext(40)


def _quad_gamma(x, digits=50):
    ctx = mpmath.mp.clone()
    ctx.dps = digits
    x = ctx.mpf(x)
    # t = x + u, pulling e^{-x} out of the integrand
    f = lambda u: ctx.exp(-u) * (x + u) ** ctx.mpf(-2.5)
    return ctx.exp(-x) * ctx.quad(f, [0, x / 100, x / 10, x, 10 * x + 10, ctx.inf])


def test_precision_context():
    assert P40.tol == P40.mp.mpf(10) ** -25
    with pytest.raises(ValueError):
        PrecisionContext(10)
    # private contexts do not leak into the global one
    before = mpmath.mp.dps
    PrecisionContext(80)
    assert mpmath.mp.dps == before


@pytest.mark.parametrize("z", ["0.1", "1", "2.9", "3", "3.1", "7", "30"])
def test_erfc(z):
    ctx = mpmath.mp.clone()
    ctx.dps = 60
    ref = ctx.erfc(ctx.mpf(z))
    assert abs(erfc(z, P40) - ref) <= ctx.mpf(10) ** -38 * ref


@pytest.mark.parametrize("x", ["0.001", "0.5", "1", "5", "40", "300"])
def test_incomplete_gamma_against_quadrature(x):
    got = gamma_minus_three_halves(x, P40)
    ref = _quad_gamma(x)
    assert abs(got - ref) <= mpmath.mpf("1e-36") * abs(ref)


def test_beta_limits_and_monotonicity():
    mp = P40.mp
    # x^{3/2} Gamma(-3/2, x) -> 2/3
    x = mp.mpf("1e-8")
    assert abs(gamma_minus_three_halves(x, P40) * x ** 1.5 - mp.mpf(2) / 3) < 1e-6
    # large-argument asymptotics: ratio = 1 - 5/(2x) + O(x^-2), so within 1.3% at x = 200
    # and within 1% from x = 250 on
    for x, bound in ((200, 0.013), (250, 0.01), (2000, 0.00126)):
        Y = 6 * x / mp.pi
        ratio = beta_gamma(Y, P40) * (mp.pi * Y / 6) ** 2.5 * mp.exp(mp.pi * Y / 6)
        assert abs(ratio - 1) < bound
        assert abs(ratio - (1 - mp.mpf(5) / (2 * x))) < 10 / mp.mpf(x) ** 2
    ys = [mp.mpf(k) / 4 for k in range(1, 60)]
    vals = [beta_gamma(y, P40) for y in ys]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        beta_gamma(0, P40)


@pytest.mark.parametrize("x", ["0.1", "1", "10"])
def test_bessel_closed_forms_against_series(x):
    tol = mpmath.mpf("1e-25")
    assert abs(bessel_I_half(1.5, x, P40) - bessel_I_series(1.5, x, P40)) < tol * abs(bessel_I_series(1.5, x, P40))
    assert abs(bessel_J_half(1.5, x, P40) - bessel_J_series(1.5, x, P40)) < tol
    for nu in (2.5, 3.5):
        assert abs(bessel_J_half(nu, x, P40) - bessel_J_series(nu, x, P40)) < tol
        assert abs(bessel_I_half(nu, x, P40) / bessel_I_series(nu, x, P40) - 1) < tol


def test_bessel_small_argument_and_errors():
    mp = P40.mp
    x = mp.mpf("1e-6")
    lead = 1 / (2 ** mp.mpf(1.5) * mp.gamma(2.5))
    assert abs(bessel_J_half(1.5, x, P40) / x ** 1.5 - lead) < 1e-10
    # sin(pi)/pi - cos(pi) = 1
    assert abs(bessel_J_half(1.5, mp.pi, P40) - mp.sqrt(2) / mp.pi) < 1e-35
    assert abs(bessel_J_series(1.5, mp.pi, P40) - mp.sqrt(2) / mp.pi) < 1e-35
    with pytest.raises(ValueError):
        bessel_J_half(1.5, 0, P40)
    with pytest.raises(ValueError):
        bessel_J_half(1.0, 1, P40)


def test_digamma_half():
    ctx = mpmath.mp.clone()
    ctx.dps = 50
    for k in range(6):
        assert abs(digamma_half(k, P40) - ctx.digamma(ctx.mpf(k) + ctx.mpf(1) / 2)) < 1e-35


@pytest.mark.parametrize("x", ["0.5", "2", "20"])
def test_order_derivative_against_central_difference(x):
    ctx = mpmath.mp.clone()
    ctx.dps = 80
    h = ctx.mpf("1e-8")
    xx = ctx.mpf(x)
    fd = (ctx.besselj(1.5 + h, xx) - ctx.besselj(1.5 - h, xx)) / (2 * h)
    assert abs(dJ_dorder_at_3_2(x, P40) - fd) < 1e-12


def test_order_derivative_small_x_and_determinism():
    mp = P40.mp
    x = mp.mpf("1e-12")
    lead = 1 / (2 ** 1.5 * mp.gamma(2.5))
    assert abs(dJ_dorder_at_3_2(x, P40) / (x ** 1.5 * mp.log(x)) - lead) < 0.05
    assert dJ_dorder_at_3_2("3.7", P40) == dJ_dorder_at_3_2("3.7", P40)
    with pytest.raises(SeriesNonConvergence):
        dJ_dorder_at_3_2(50, P40, max_terms=3)


def test_float_arrays():
    xs = np.array([1e-4, 0.3, 1.99, 2.01, 7.5, 30.0])
    J = [float(mpmath.besselj(1.5, v)) for v in xs]
    I = [float(mpmath.besseli(1.5, v)) for v in xs]
    D = [float(mpmath.diff(lambda nu: mpmath.besselj(nu, v), 1.5)) for v in xs]
    assert np.allclose(bessel_J32_array(xs), J, rtol=1e-13, atol=0)
    assert np.allclose(bessel_I32_array(xs), I, rtol=1e-13, atol=0)
    assert np.allclose(dJ_dorder_at_3_2_array(xs), D, rtol=1e-12, atol=1e-300)
    with pytest.raises(ValueError):
        bessel_J32_array(np.array([1.0, -1.0]))

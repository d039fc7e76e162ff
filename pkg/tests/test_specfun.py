import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from commuting_hankel import specfun as sf


def airy_maclaurin(x, terms=80):
    """Ai(x) and Ai'(x) from the power series of Ai'' = x Ai (oracle)."""
    c1 = 1 / (3 ** (2 / 3) * math.gamma(2 / 3))
    c2 = 1 / (3 ** (1 / 3) * math.gamma(1 / 3))
    a = [0.0] * (3 * terms + 3)
    a[0], a[1] = c1, -c2
    for k in range(3 * terms):
        # (k+3)(k+2) a_{k+3} = a_k
        a[k + 3] = a[k] / ((k + 3) * (k + 2))
    val = sum(ak * x**k for k, ak in enumerate(a))
    der = sum(k * ak * x ** (k - 1) for k, ak in enumerate(a) if k)
    return val, der


def test_airy_at_zero_matches_series():
    v, d = airy_maclaurin(0.0)
    assert abs(sf.airy_ai(0.0).value - 0.355028053887817) < 1e-14
    assert abs(sf.airy_ai(0.0).value - v) < 1e-15
    assert abs(sf.airy_ai_prime(0.0).value - (-0.258819403792807)) < 1e-14
    assert abs(sf.airy_ai_prime(0.0).value - d) < 1e-15


@pytest.mark.parametrize("x", [-4.0, -1.3, 0.7, 2.5, 4.0])
def test_airy_series_agreement(x):
    v, d = airy_maclaurin(x)
    assert abs(sf.airy_ai(x).value - v) < 1e-12
    assert abs(sf.airy_ai_prime(x).value - d) < 1e-12


def test_airy_ode_residual():
    x, h = 1.7, 1e-3
    f = lambda z: sf.airy_ai(z).value
    second = (f(x + h) - 2 * f(x) + f(x - h)) / h**2
    assert abs(second - x * f(x)) < 1e-7
    # exact second derivative through the prime evaluator
    der2 = (sf.airy_ai_prime(x + h).value - sf.airy_ai_prime(x - h).value) / (2 * h)
    assert abs(der2 - x * f(x)) < 1e-6


def test_airy_extremes_are_safe():
    big = sf.airy_ai(2000.0)
    assert big.value == 0.0 and big.est_abs_error >= 0
    neg = sf.airy_ai(-1e4)
    assert math.isfinite(neg.value) and abs(neg.value) < 0.1
    assert abs(neg.value - float(mpmath.airyai(-1e4))) <= max(neg.est_abs_error, 1e-12)


def test_airy_error_estimate_covers_mpmath():
    for x in np.linspace(-12, 12, 41):
        r = sf.airy_ai(float(x))
        assert abs(r.value - float(mpmath.airyai(x))) <= r.est_abs_error + 1e-300


def test_bessel_small_u_asymptote():
    u = 1e-6
    val = sf.bessel_k(1, math.sqrt(u)).value / math.sqrt(u)
    assert abs(u * val - 1) < 1e-3


def test_bessel_large_u_asymptote():
    u = 1e4
    val = u**0.75 * math.exp(math.sqrt(u)) * sf.bessel_k(1, math.sqrt(u)).value / math.sqrt(u)
    assert abs(val / math.sqrt(math.pi / 2) - 1) < 0.01


def test_bessel_half_integer_closed_form():
    x = 1.0
    assert abs(sf.bessel_j(0.5, x).value - math.sqrt(2 / (math.pi * x)) * math.sin(x)) < 1e-12


def test_bessel_k_rejects_nonpositive():
    with pytest.raises(ValueError):
        sf.bessel_k(1, 0.0)
    with pytest.raises(ValueError):
        sf.bessel_j(-1, 1.0)


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0, 3.5])
def test_bessel_against_mpmath(nu):
    for x in (0.1, 1.0, 7.3, 25.0):
        j = sf.bessel_j(nu, x)
        assert abs(j.value - float(mpmath.besselj(nu, x))) <= j.est_abs_error
        k = sf.bessel_k(nu, x)
        assert abs(k.value - float(mpmath.besselk(nu, x))) <= k.est_abs_error + 1e-300


def _rodrigues(n, alpha, x):
    s = sympy.Symbol("s")
    expr = sympy.exp(s) * s ** (-alpha) / sympy.factorial(n) * sympy.diff(sympy.exp(-s) * s ** (n + alpha), s, n)
    return float(sympy.simplify(expr).subs(s, x))


def test_laguerre_low_degrees():
    for a in (0.0, 1.0, 2.5):
        assert sf.laguerre(0, a, 3.3).value == 1.0
    for x in (0.0, 0.5, 4.0):
        assert abs(sf.laguerre(1, 1, x).value - (2 - x)) < 1e-15


def test_laguerre_rodrigues_oracle():
    assert abs(sf.laguerre(6, 0, 2.5).value - _rodrigues(6, 0, 2.5)) < 1e-10
    assert abs(sf.laguerre(4, 2, 1.25).value - _rodrigues(4, 2, 1.25)) < 1e-10


def test_laguerre_orthogonality():
    x, w = np.polynomial.laguerre.laggauss(60)
    for alpha in (0.0, 1.0):
        # generalized weight e^{-x} x^alpha folded as x^alpha
        for m, n in ((0, 3), (2, 5), (4, 7)):
            val = np.sum(w * x**alpha * sf.laguerre_l(m, alpha, x) * sf.laguerre_l(n, alpha, x))
            assert abs(val) < 1e-8


def test_hermite_basics():
    assert sf.hermite_fn(0, 0.0).value == 1.0
    assert abs(sf.hermite_fn(5, -1.3).value + sf.hermite_fn(5, 1.3).value) < 1e-14
    # He_3(x) = x^3 - 3x
    x = 0.8
    assert abs(sf.hermite_fn(3, x).value - (x**3 - 3 * x) * math.exp(-x * x / 4)) < 1e-14


def test_hermite_orthogonality():
    val, _ = mpmath.quad(lambda t: float(sf.hermite_function(2, float(t)) * sf.hermite_function(3, float(t))),
                         [-mpmath.inf, 0, mpmath.inf]), None
    assert abs(val) < 1e-10
    # and the squared norm is sqrt(2 pi) n!
    norm = mpmath.quad(lambda t: float(sf.hermite_function(3, float(t)) ** 2), [-mpmath.inf, 0, mpmath.inf])
    assert abs(norm - math.sqrt(2 * math.pi) * 6) < 1e-8


def test_hermite_large_degree_is_finite():
    r = sf.hermite_fn(200, 3.0)
    assert math.isfinite(r.value)
    with pytest.raises(ValueError):
        sf.hermite_fn(201, 0.0)


def test_2f1_values():
    assert sf.gauss_2f1(0.3, 1.7, 2.2, 0.0).value == 1.0
    r = sf.gauss_2f1(1, 1, 2, 0.5)
    assert abs(r.value - (-math.log(0.5) / 0.5)) < 1e-12
    assert abs(r.value - 1.386294361) < 1e-9
    assert abs(r.value - (-math.log(0.5) / 0.5)) <= r.est_abs_error + 1e-15


def test_2f1_against_mpmath():
    for a, b, c, x in ((0.5, 1.5, 2.0, 0.9), (1.2, -0.3, 2.0, -0.7), (2.0, 3.0, 4.5, 0.95)):
        r = sf.gauss_2f1(a, b, c, x)
        assert abs(r.value - float(mpmath.hyp2f1(a, b, c, x))) <= max(r.est_abs_error, 1e-13)


def test_2f1_rejections():
    with pytest.raises(ValueError):
        sf.gauss_2f1(1, 1, 0, 0.5)
    with pytest.raises(ValueError):
        sf.gauss_2f1(1, 1, -2, 0.5)
    with pytest.raises(ValueError):
        sf.gauss_2f1(1, 1, 2, 0.99)


def test_h5_solution_vanishes_at_zero():
    mu, nu = 0.5, 0.5
    assert 0.0 * sf.gauss_2f1(mu + 1, nu + 1, 2, 0.0).value == 0.0


def test_gamma():
    assert sf.gamma_fn(1).value == 1.0
    assert abs(sf.gamma_fn(0.5).value - math.sqrt(math.pi)) < 1e-14
    assert abs(sf.gamma_fn(5).value - 24) < 1e-12
    with pytest.raises(ValueError):
        sf.gamma_fn(0.0)
    with pytest.raises(ValueError):
        sf.gamma_fn(171.0)


def test_eval_result_validates():
    with pytest.raises(ValueError):
        sf.EvalResult(1.0, -1.0)
    with pytest.raises(ValueError):
        sf.EvalResult(1.0, math.inf)


def test_asymptotes_of_multiplicative_bessel_kernels():
    # rho_+ = sqrt(u) K_nu(2 sqrt u) ~ Gamma(nu) u^{(1-nu)/2} / 2 near 0
    nu, u = 1.5, 1e-8
    val = math.sqrt(u) * sf.bessel_k(nu, 2 * math.sqrt(u)).value
    assert abs(val / (0.5 * sf.gamma_fn(nu).value * u ** ((1 - nu) / 2)) - 1) < 0.01
    # rho_- = sqrt(u) J_nu(2 sqrt u) ~ u^{(1+nu)/2} / Gamma(nu + 1)
    val = math.sqrt(u) * sf.bessel_j(nu, 2 * math.sqrt(u)).value
    assert abs(val / (u ** ((1 + nu) / 2) / sf.gamma_fn(nu + 1).value) - 1) < 0.01


def test_oscillatory_airy_envelope():
    # sqrt(u) J_{1/3}(2u^{3/2}/3) oscillates inside a u^{-1/4} envelope (constants unspecified)
    u = np.linspace(50, 60, 2001)
    f = (3 * sf.ai(-u) - math.sqrt(3) * sf.bi(-u)) / 2
    ratio = np.max(np.abs(f) * u**0.25)
    u2 = np.linspace(500, 510, 20001)
    f2 = (3 * sf.ai(-u2) - math.sqrt(3) * sf.bi(-u2)) / 2
    assert abs(np.max(np.abs(f2) * u2**0.25) / ratio - 1) < 0.01


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 30.0), st.floats(0.0, 4.0))
def test_bessel_ode_residuals(x, nu):
    # x^2 J'' + x J' + (x^2 - nu^2) J = 0, J'' from scipy's jvp(n=2)
    from scipy import special

    j, jp, jpp = special.jv(nu, x), special.jvp(nu, x), special.jvp(nu, x, 2)
    scale = max(1.0, x * x) * max(abs(j), abs(jp), abs(jpp), 1e-300)
    assert abs(x * x * jpp + x * jp + (x * x - nu * nu) * j) <= 1e-8 * max(scale, 1.0)
    k, kp, kpp = special.kv(nu, x), special.kvp(nu, x), special.kvp(nu, x, 2)
    scale = max(1.0, x * x) * max(abs(k), abs(kp), abs(kpp))
    assert abs(x * x * kpp + x * kp - (x * x + nu * nu) * k) <= 1e-8 * scale


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 30), st.floats(0.0, 3.0), st.floats(0.0, 40.0))
def test_laguerre_three_term_recurrence(n, alpha, x):
    lhs = (n + 1) * sf.laguerre_l(n + 1, alpha, x)
    rhs = (2 * n + 1 + alpha - x) * sf.laguerre_l(n, alpha, x) - (n + alpha) * sf.laguerre_l(n - 1, alpha, x)
    scale = math.exp(x / 2) * (n + 1) * math.comb(n + 4, n) * (1 + x)
    assert abs(lhs - rhs) <= 1e-8 * scale


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 40), st.floats(-10.0, 10.0))
def test_hermite_weber_equation(n, x):
    h = 1e-4
    f = lambda z: float(sf.hermite_function(n, z))
    fp = lambda z: float(sf.hermite_function_prime(n, z))
    second = (fp(x + h) - fp(x - h)) / (2 * h)
    scale = math.exp(0.5 * math.lgamma(n + 1)) * (1 + x * x + n)
    assert abs(second - (x * x / 4 - n - 0.5) * f(x)) <= 1e-6 * scale

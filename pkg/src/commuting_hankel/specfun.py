"""Special functions used by the kernel catalogue.

Two layers live here.  The array functions (``ai``, ``jv``, ``laguerre_l``,
``hyp2f1`` ...) broadcast over numpy inputs and are what the catalogue calls
in its inner loops.  The scalar evaluators (``airy_ai``, ``bessel_j``, ...)
return an :class:`EvalResult` carrying an absolute error estimate.

Airy, Bessel and Gamma values come from :mod:`scipy.special`.  Laguerre and
Hermite values use their three-term recurrences and Gauss's series is summed
directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EvalResult:
    value: float
    est_abs_error: float

    def __post_init__(self):
        if not math.isfinite(self.est_abs_error) or self.est_abs_error < 0:
            raise ValueError("error estimate must be finite and non-negative")


# ---------------------------------------------------------------------------
# Airy

def ai(x):
    return _sp.airy(x)[0]


def ai_prime(x):
    return _sp.airy(x)[1]


def bi(x):
    return _sp.airy(x)[2]


def bi_prime(x):
    return _sp.airy(x)[3]


def _airy_error(x, value, derivative=False):
    # Oscillatory region: errors scale with the modulus envelope, and the
    # phase (2/3)|x|^{3/2} carries a relative rounding error of its own.
    if x < 0:
        envelope = abs(x) ** (0.25 if derivative else -0.25) / math.sqrt(math.pi)
        phase = (2 / 3) * abs(x) ** 1.5
    else:
        envelope = phase = 0.0
    return 64 * _EPS * (abs(value) + envelope) + 8 * _EPS * phase * envelope + 1e-300


def airy_ai(x: float) -> EvalResult:
    """Ai(x).  Underflows to 0 (with a tiny error bound) for large positive x."""
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    v = float(ai(x))
    return EvalResult(v, _airy_error(x, v))


def airy_ai_prime(x: float) -> EvalResult:
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    v = float(ai_prime(x))
    return EvalResult(v, _airy_error(x, v, derivative=True))


# ---------------------------------------------------------------------------
# Bessel

def jv(nu, x):
    return _sp.jv(nu, x)


def jvp(nu, x):
    return _sp.jvp(nu, x)


def kv(nu, x):
    return _sp.kv(nu, x)


def kvp(nu, x):
    return _sp.kvp(nu, x)


def bessel_j(nu: float, x: float) -> EvalResult:
    if nu < 0 or x < 0:
        raise ValueError("bessel_j needs nu >= 0 and x >= 0")
    v = float(jv(nu, x))
    # Large-argument envelope sqrt(2/(pi x)) bounds the absolute error scale.
    scale = min(1.0, math.sqrt(2.0 / (math.pi * x))) if x > 0 else 1.0
    return EvalResult(v, 64 * _EPS * (abs(v) + scale))


def bessel_k(nu: float, x: float) -> EvalResult:
    if nu < 0:
        raise ValueError("bessel_k needs nu >= 0")
    if not x > 0:
        raise ValueError("bessel_k is singular at x <= 0")
    v = float(kv(nu, x))
    return EvalResult(v, 64 * _EPS * abs(v) + 1e-300)


# ---------------------------------------------------------------------------
# Orthogonal polynomials

def laguerre_l(n: int, alpha: float, x):
    """Generalized Laguerre polynomial L_n^(alpha)(x) by upward recurrence."""
    x = np.asarray(x, dtype=float)
    if n < 0:
        raise ValueError("degree must be non-negative")
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
    return cur


def laguerre(n: int, alpha: float, x: float) -> EvalResult:
    if n < 0 or alpha <= -1 or x < 0:
        raise ValueError("laguerre needs n >= 0, alpha > -1, x >= 0")
    v = float(laguerre_l(n, alpha, x))
    # Recurrence errors grow roughly linearly in n relative to the polynomial scale.
    scale = math.exp(x / 2) * _sp.binom(n + alpha, n) if n else 1.0
    return EvalResult(v, 8 * (n + 1) * _EPS * max(abs(v), scale))


def hermite_function(n: int, x):
    """He_n(x) * exp(-x^2/4) with He_n orthogonal for the weight exp(-x^2/2).

    Runs the recurrence on the normalized functions He_k e^{-x^2/4}/sqrt(k!)
    so that nothing overflows before the final rescaling.
    """
    x = np.asarray(x, dtype=float)
    psi_prev = np.zeros_like(x)
    psi = np.exp(-x * x / 4)
    for k in range(n):
        psi_prev, psi = psi, (x * psi - math.sqrt(k) * psi_prev) / math.sqrt(k + 1)
    return psi * math.exp(0.5 * math.lgamma(n + 1))


def hermite_function_prime(n: int, x):
    # d/dx [He_n e^{-x^2/4}] = n He_{n-1} e^{-x^2/4} - (x/2) He_n e^{-x^2/4}
    x = np.asarray(x, dtype=float)
    lower = n * hermite_function(n - 1, x) if n else 0.0
    return lower - 0.5 * x * hermite_function(n, x)


def hermite_fn(n: int, x: float) -> EvalResult:
    if not 0 <= n <= 200:
        raise ValueError("hermite_fn supports 0 <= n <= 200")
    v = float(hermite_function(n, x))
    scale = math.exp(0.5 * math.lgamma(n + 1))
    return EvalResult(v, 16 * (n + 1) * _EPS * max(abs(v), scale * math.exp(-x * x / 8)))


# ---------------------------------------------------------------------------
# Gauss hypergeometric series

def _is_nonpositive_integer(c):
    return c <= 0 and float(c).is_integer()


def hyp2f1(a, b, c, x, *, max_terms=20000, return_error=False):
    """Direct power series for 2F1(a, b; c; x), vectorized over x (|x| <= 0.95)."""
    if _is_nonpositive_integer(c):
        raise ValueError("2F1 series undefined for c in {0, -1, -2, ...}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 0.95):
        raise ValueError("series evaluation restricted to |x| <= 0.95")
    term = np.ones_like(x)
    total = np.ones_like(x)
    err = np.zeros_like(x)
    for k in range(max_terms):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1))
        term = term * ratio * x
        total = total + term
        # once the term ratio is below 1 the tail is bounded geometrically
        r = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2))) * np.abs(x)
        if r.size == 0 or (np.all(r < 1) and np.all(np.abs(term) * r / (1 - r) <= _EPS * np.abs(total) + 1e-300)):
            err = np.abs(term) * r / np.where(r < 1, 1 - r, 1.0)
            break
    else:
        raise RuntimeError("2F1 series did not converge")
    err = err + 16 * _EPS * (k + 1) * np.abs(total)
    return (total, err) if return_error else total


def gauss_2f1(mu: float, nu: float, lam: float, x: float) -> EvalResult:
    v, e = hyp2f1(mu, nu, lam, x, return_error=True)
    return EvalResult(float(v), float(e))


def hyp2f1_prime(a, b, c, x):
    return a * b / c * hyp2f1(a + 1, b + 1, c + 1, x)


# ---------------------------------------------------------------------------

def gamma_fn(x: float) -> EvalResult:
    if not 0 < x <= 170:
        raise ValueError("gamma_fn needs 0 < x <= 170")
    v = float(_sp.gamma(x))
    return EvalResult(v, 8 * _EPS * abs(v))

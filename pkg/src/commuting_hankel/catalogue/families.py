"""Coefficient pairs (a, b) of the Sturm-Liouville operator -(a f')' + b f.

Three families satisfy a''' = A a' with a(0) = 0:

* ``Q``: a = q2 x^2 + q1 x                      (A = 0)
* ``H``: a = h1 cosh tx + h2 sinh tx - h1       (A = t^2)
* ``C``: a = c1 cos tx + c2 sin tx - c1         (A = -t^2)

``b`` is written in the same three shapes, with coefficients
``(b2, b1, b0)``, ``(h4, h5, h6)`` or ``(c4, c5, c6)``.  A family whose ``b``
has a different shape than its ``a`` is representable (so that it can be
rejected), but has no beta function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


class FamilyMismatch(ValueError):
    """b does not belong to the same family as a."""


class InvalidParams(ValueError):
    pass


FAMILIES = ("Q", "H", "C")


def _shape_eval(shape, coeffs, t, x, order):
    """Evaluate the order-th derivative of a Q/H/C-shaped function."""
    x = np.asarray(x, dtype=float)
    k1, k2, k3 = coeffs
    if shape == "Q":
        if order == 0:
            return k1 * x * x + k2 * x + k3
        if order == 1:
            return 2 * k1 * x + k2
        if order == 2:
            return np.full_like(x, 2.0 * k1)
        return np.zeros_like(x)
    if shape == "H":
        ch, sh = np.cosh(t * x), np.sinh(t * x)
        if order == 0:
            return k1 * ch + k2 * sh + k3
        f = t**order
        return f * (k1 * sh + k2 * ch) if order % 2 else f * (k1 * ch + k2 * sh)
    c, s = np.cos(t * x), np.sin(t * x)
    if order == 0:
        return k1 * c + k2 * s + k3
    # derivatives of cos/sin cycle with period 4
    seq = [(k1 * c + k2 * s), (-k1 * s + k2 * c), -(k1 * c + k2 * s), -(-k1 * s + k2 * c)]
    return t**order * seq[order % 4]


@dataclass(frozen=True)
class CoefficientFamily:
    family: str
    a_coeffs: tuple          # (q2, q1) | (h1, h2) | (c1, c2)
    b_coeffs: tuple          # (b2, b1, b0) | (h4, h5, h6) | (c4, c5, c6)
    t: float = 2.0
    b_family: str | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParams(f"unknown family {self.family!r}")
        if self.b_family is None:
            object.__setattr__(self, "b_family", self.family)
        elif self.b_family not in FAMILIES:
            raise InvalidParams(f"unknown b family {self.b_family!r}")
        if len(self.a_coeffs) != 2 or len(self.b_coeffs) != 3:
            raise InvalidParams("a needs 2 coefficients and b needs 3")
        if self.a_coeffs[0] == 0 and self.a_coeffs[1] == 0:
            raise InvalidParams("a must be non-constant")
        if self.family != "Q" or self.b_family != "Q":
            if not self.t > 0:
                raise InvalidParams("t must be positive")

    # -- constructors -----------------------------------------------------
    @classmethod
    def quadratic(cls, q2, q1, b2=0.0, b1=0.0, b0=0.0, q0=0.0):
        if q0 != 0:
            raise InvalidParams("a(0) = 0 forces q0 = 0")
        return cls("Q", (float(q2), float(q1)), (float(b2), float(b1), float(b0)))

    @classmethod
    def hyperbolic(cls, h1, h2, h4=0.0, h5=0.0, h6=0.0, t=2.0, h3=None):
        if h3 is not None and h3 != -h1:
            raise InvalidParams("a(0) = 0 forces h3 = -h1")
        return cls("H", (float(h1), float(h2)), (float(h4), float(h5), float(h6)), float(t))

    @classmethod
    def circular(cls, c1, c2, c4=0.0, c5=0.0, c6=0.0, t=2.0, c3=None):
        if c3 is not None and c3 != -c1:
            raise InvalidParams("a(0) = 0 forces c3 = -c1")
        return cls("C", (float(c1), float(c2)), (float(c4), float(c5), float(c6)), float(t))

    # -- evaluation -------------------------------------------------------
    @property
    def _a_shape_coeffs(self):
        k1, k2 = self.a_coeffs
        if self.family == "Q":
            return (k1, k2, 0.0)
        return (k1, k2, -k1)

    def a(self, x, order=0):
        return _shape_eval(self.family, self._a_shape_coeffs, self.t, x, order)

    def da(self, x):
        return self.a(x, 1)

    def b(self, x, order=0):
        return _shape_eval(self.b_family, self.b_coeffs, self.t, x, order)

    def db(self, x):
        return self.b(x, 1)

    @property
    def A(self):
        return {"Q": 0.0, "H": self.t**2, "C": -self.t**2}[self.family]

    @property
    def B(self):
        return {"Q": 0.0, "H": self.t**2, "C": -self.t**2}[self.b_family]

    def perturb_b(self, delta):
        """Shift the linear-in-the-family coefficient of b (b1, h4 or c4)."""
        k1, k2, k3 = self.b_coeffs
        if self.b_family == "Q":
            return replace(self, b_coeffs=(k1, k2 + delta, k3))
        return replace(self, b_coeffs=(k1 + delta, k2, k3))

    def params(self):
        names = {"Q": ("q2", "q1"), "H": ("h1", "h2"), "C": ("c1", "c2")}[self.family]
        bnames = {"Q": ("b2", "b1", "b0"), "H": ("h4", "h5", "h6"), "C": ("c4", "c5", "c6")}[self.b_family]
        out = dict(zip(names, self.a_coeffs))
        out.update(zip(bnames, self.b_coeffs))
        if self.family != "Q":
            out["t"] = self.t
        return out


# ---------------------------------------------------------------------------

def alpha_denominator(fam: CoefficientFamily, u):
    u = np.asarray(u, dtype=float)
    k1, k2 = fam.a_coeffs
    if fam.family == "Q":
        return k1 * u + k2
    h = fam.t * u / 2
    if fam.family == "H":
        return k1 * np.sinh(h) + k2 * np.cosh(h)
    return -k1 * np.sin(h) + k2 * np.cos(h)


def alpha_of(fam: CoefficientFamily):
    """alpha with alpha(x+y) (a(x) - a(y)) = a'(x) - a'(y)."""
    k1, k2 = fam.a_coeffs
    t = fam.t

    if fam.family == "Q":
        def alpha(u):
            return 2 * k1 / alpha_denominator(fam, u)
    elif fam.family == "H":
        def alpha(u):
            h = t * np.asarray(u, dtype=float) / 2
            return t * (k1 * np.cosh(h) + k2 * np.sinh(h)) / alpha_denominator(fam, u)
    else:
        def alpha(u):
            h = t * np.asarray(u, dtype=float) / 2
            return t * (-k1 * np.cos(h) - k2 * np.sin(h)) / alpha_denominator(fam, u)
    return alpha


def beta_of(fam: CoefficientFamily):
    """beta with beta(x+y) (a(x) - a(y)) = b(x) - b(y)."""
    if fam.b_family != fam.family:
        raise FamilyMismatch(
            f"b of type {fam.b_family} cannot pair with a of type {fam.family}: "
            f"only a {fam.family}-type b gives a function of x+y")
    m1, m2, _ = fam.b_coeffs
    t = fam.t

    if fam.family == "Q":
        def beta(u):
            return (m1 * np.asarray(u, dtype=float) + m2) / alpha_denominator(fam, u)
    elif fam.family == "H":
        def beta(u):
            h = t * np.asarray(u, dtype=float) / 2
            return (m1 * np.sinh(h) + m2 * np.cosh(h)) / alpha_denominator(fam, u)
    else:
        def beta(u):
            h = t * np.asarray(u, dtype=float) / 2
            return (-m1 * np.sin(h) + m2 * np.cos(h)) / alpha_denominator(fam, u)
    return beta


def factor_difference(fam: CoefficientFamily, x: float, y: float):
    """Return (f(x+y), g(x-y)) with f * g = a(x) - a(y)."""
    u, v = x + y, x - y
    if fam.family == "Q":
        return float(alpha_denominator(fam, u)), float(v)
    g = math.sinh(fam.t * v / 2) if fam.family == "H" else math.sin(fam.t * v / 2)
    return float(2 * alpha_denominator(fam, u)), g

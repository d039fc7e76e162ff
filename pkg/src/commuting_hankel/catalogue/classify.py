"""Singular points of the kernel equation phi'' + alpha phi' - beta phi = 0.

The equation is read in the variable where its coefficients are rational:
u itself for the quadratic family, x = exp(-2u) for the hyperbolic family
(t = 2) and tau = tan u for the circular family.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .families import CoefficientFamily, beta_of

INF = math.inf

CLASSES = ("trivial", "elementary", "confluent-hypergeometric", "hypergeometric")


@dataclass(frozen=True)
class SingularPoint:
    location: complex | float
    kind: str                      # "regular" | "irregular"
    exponents: tuple | None = None


@dataclass(frozen=True)
class RiemannScheme:
    zeta: float
    alpha1: complex | float
    alpha2: complex | float
    beta1: complex | float
    beta2: complex | float


@dataclass(frozen=True)
class SingularityReport:
    points: tuple
    equation_class: str
    case_label: str
    riemann_scheme: RiemannScheme | None = None
    notes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.equation_class not in CLASSES:
            raise ValueError(f"unknown class {self.equation_class!r}")
        kinds = [p.kind for p in self.points]
        if self.equation_class == "confluent-hypergeometric" and "irregular" not in kinds:
            raise ValueError("confluent class needs an irregular singular point")
        if self.equation_class == "hypergeometric":
            if len(self.points) != 3 or "irregular" in kinds:
                raise ValueError("hypergeometric class needs three regular points")
        rs = self.riemann_scheme
        if rs is not None:
            if abs(rs.alpha1 + rs.alpha2 - 1) > 1e-12 or abs(rs.beta1 + rs.beta2 - 1) > 1e-12:
                raise ValueError("Riemann exponent pairs must sum to 1")


def _pair_with_sum_one(product):
    """Roots of z^2 - z + product = 0, real when possible."""
    disc = 1 - 4 * product
    if disc >= 0:
        r = math.sqrt(disc)
        return ((1 + r) / 2, (1 - r) / 2)
    r = cmath.sqrt(disc)
    return ((1 + r) / 2, (1 - r) / 2)


def _roots(b, c):
    """Roots of z^2 + b z + c = 0."""
    disc = b * b - 4 * c
    if isinstance(disc, complex) and disc.imag == 0:
        disc = disc.real
    if isinstance(disc, complex) or disc < 0:
        r = cmath.sqrt(disc)
        return tuple(_real_if_close((-b + sgn * r) / 2) for sgn in (1, -1))
    r = math.sqrt(disc)
    return ((-b + r) / 2, (-b - r) / 2)


def _real_if_close(z):
    return z.real if abs(z.imag) <= 1e-14 * max(1.0, abs(z)) else z


def _classify_quadratic(fam):
    q2, q1 = fam.a_coeffs
    b2, b1, _ = fam.b_coeffs
    if q2 == 0:
        if b2 == 0 and b1 == 0:
            return SingularityReport((SingularPoint(INF, "regular", (0.0, -1.0)),), "trivial", "Q(ii)")
        if b2 == 0:
            return SingularityReport((SingularPoint(INF, "irregular"),), "elementary", "Q(iv)",
                                     notes=("constant coefficients: exponential or trigonometric",))
        return SingularityReport((SingularPoint(INF, "irregular"),), "confluent-hypergeometric", "Q(v)",
                                 notes=("Airy equation after an affine change of variable",))
    finite = SingularPoint(-q1 / q2, "regular", (0.0, -1.0))
    if b2 == 0 and b1 == 0:
        return SingularityReport((finite, SingularPoint(INF, "regular", (0.0, 1.0))), "elementary", "Q(iii)")
    if b2 == 0:
        return SingularityReport((finite, SingularPoint(INF, "irregular")), "confluent-hypergeometric", "Q(vi)")
    label = "Q(vii)"
    m = -b1 / (2 * q2) - 1
    if q1 == 0 and b2 == q2 and m >= 0 and float(m).is_integer():
        label = "Q(viii)"
    return SingularityReport((finite, SingularPoint(INF, "irregular")), "confluent-hypergeometric", label)


def _classify_hyperbolic(fam):
    h1, h2 = fam.a_coeffs
    h4, h5, _ = fam.b_coeffs
    plus, minus = h1 + h2, h2 - h1        # the constants h1 + h2 and h2 - h1
    bplus, bminus = h4 + h5, h5 - h4
    if minus == 0:
        # x^2 phi'' = (h4 + h5 + (h5 - h4) x) / (4 (h1 + h2)) phi
        expo0 = _roots(-1.0, -bplus / (4 * plus))
        zero = SingularPoint(0.0, "regular", expo0)
        if bminus == 0:
            return SingularityReport((zero, SingularPoint(INF, "regular")), "elementary", "H(i)")
        return SingularityReport((zero, SingularPoint(INF, "irregular")), "confluent-hypergeometric", "H(ii)")
    if plus == 0:
        # x^3 phi'' + 2 x^2 phi' = (h4 + h5 + (h5 - h4) x) / (4 (h2 - h1)) phi
        inf = SingularPoint(INF, "regular")
        if bplus == 0:
            zero = SingularPoint(0.0, "regular", _roots(1.0, -bminus / (4 * minus)))
            return SingularityReport((zero, inf), "elementary", "H(iii)")
        return SingularityReport((SingularPoint(0.0, "irregular"), inf), "confluent-hypergeometric", "H(iv)")
    zeta = -plus / minus
    apparent = SingularPoint(zeta, "regular", (-1.0, 0.0))
    if h4 == 0 and h5 == 0:
        return SingularityReport((apparent, SingularPoint(INF, "regular")), "elementary", "H(vii)")
    a1, a2 = _pair_with_sum_one(-bplus / (4 * plus))
    b1, b2 = _pair_with_sum_one(-bminus / (4 * minus))
    scheme = RiemannScheme(zeta, a1, a2, b1, b2)
    points = (SingularPoint(0.0, "regular", (a1, a2)), SingularPoint(INF, "regular", (b1, b2)), apparent)
    label = "H(v)" if h2 == 0 and h4 == -h5 else "H(vi)"
    return SingularityReport(points, "hypergeometric", label, scheme)


def _classify_circular(fam):
    c1, c2 = fam.a_coeffs
    c4, c5, _ = fam.b_coeffs
    first = SingularPoint(c2 / c1, "regular", (0.0, -1.0)) if c1 != 0 else SingularPoint(INF, "regular")
    if c4 == 0 and c5 == 0:
        return SingularityReport((first, ), "elementary", "C(elementary)")
    points = [first]
    for root in (1j, -1j):
        # leading coefficient of the double pole of the phi-coefficient at tau = +-i
        q0 = -(-c4 * root + c5) / ((-c1 * root + c2) * (2 * root) ** 2)
        points.append(SingularPoint(root, "regular", _roots(-1.0, q0)))
    return SingularityReport(tuple(points), "hypergeometric", "C")


def classify(fam: CoefficientFamily) -> SingularityReport:
    beta_of(fam)  # raises FamilyMismatch for an inadmissible b
    if fam.family == "Q":
        return _classify_quadratic(fam)
    if fam.family == "H":
        return _classify_hyperbolic(fam)
    return _classify_circular(fam)

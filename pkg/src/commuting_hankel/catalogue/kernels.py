"""Catalogued kernels phi together with their commuting coefficient pairs.

Each case is built by :func:`build_case` from a case id and a parameter map.
The kernel is exposed in its native variable (``kernel``) and in the
additive variable u = x + y in which the commutation identity is stated
(``additive``).  The two coincide except for the multiplicative hyperbolic
cases, whose kernel rho lives on (0, 1) and satisfies phi(u) = rho(exp(-2u)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .. import specfun as sf
from .families import CoefficientFamily, InvalidParams, alpha_denominator, alpha_of, beta_of


class UnsupportedCase(ValueError):
    pass


class PoleProximity(ValueError):
    pass


HALF_LINE, MULTIPLICATIVE, PERIODIC = "half_line", "multiplicative", "periodic"
BOUNDED_ONLY, HILBERT_SCHMIDT, FINITE_RANK = "bounded_only", "hilbert_schmidt", "finite_rank"


@dataclass(frozen=True)
class Decay:
    """Witness for |phi(z) e^{rate z}| <= bound on Re z > -delta (checked on real z)."""
    rate: float
    delta: float
    bound: float
    strip: float | None = None


@dataclass(frozen=True, eq=False)
class KernelCase:
    case_id: str
    params: Mapping[str, float]
    family: CoefficientFamily | None
    domain: str
    integrability: str
    kernel_fn: Callable = field(repr=False)
    rank: int | None = None
    decay: Decay | None = None
    period: float | None = None
    probe: tuple = (0.1, 5.0)          # box for (x, y) probes in the additive variable
    truncation: float = 40.0           # half-line truncation for discretizations
    singular_at: Callable | None = field(default=None, repr=False)
    tail_hilbert_schmidt: bool = False  # compressions to (x, inf), x > 0, are Hilbert-Schmidt

    def kernel(self, z, order=0):
        """order-th derivative of the kernel in its native variable."""
        return self.kernel_fn(np.asarray(z, dtype=float), order)

    def additive(self, u, order=0):
        """order-th derivative of phi(u) in the variable u = x + y."""
        u = np.asarray(u, dtype=float)
        if self.domain != MULTIPLICATIVE:
            return self.kernel(u, order)
        x = np.exp(-2 * u)
        if order == 0:
            return self.kernel(x)
        if order == 1:
            return -2 * x * self.kernel(x, 1)
        return 4 * x * self.kernel(x, 1) + 4 * x * x * self.kernel(x, 2)

    def with_family(self, family):
        return replace(self, family=family)

    def perturbed(self, delta=0.1):
        """Same kernel paired with a b that no longer commutes."""
        return replace(self, family=self.family.perturb_b(delta))


def ode_residual(kc: KernelCase, u):
    """phi'' + alpha phi' - beta phi in the additive variable."""
    if kc.family is None:
        raise UnsupportedCase(f"{kc.case_id} has no commuting coefficient family")
    u = np.asarray(u, dtype=float)
    check_poles(kc, u)
    alpha, beta = alpha_of(kc.family), beta_of(kc.family)
    return kc.additive(u, 2) + alpha(u) * kc.additive(u, 1) - beta(u) * kc.additive(u)


def check_poles(kc, u, tol=1e-8):
    if kc.family is not None and np.any(np.abs(alpha_denominator(kc.family, u)) < tol):
        raise PoleProximity("probe point within 1e-8 of a coefficient pole")
    if kc.singular_at is not None and np.any(kc.singular_at(u) < tol):
        raise PoleProximity("probe point within 1e-8 of a kernel singularity")


# ---------------------------------------------------------------------------
# kernel building blocks, each f(z, order)

def _rational_kernel(c1, c2, slope, offset):
    """c1 + c2 / (slope z + offset)."""
    def f(z, k):
        d = slope * z + offset
        if k == 0:
            return c1 + c2 / d
        if k == 1:
            return -c2 * slope / d**2
        return 2 * c2 * slope**2 / d**3
    return f


def _exponential(rate):
    def f(z, k):
        return (-rate) ** k * np.exp(-rate * z)
    return f


def _airy(shift):
    def f(z, k):
        w = z + shift
        if k == 0:
            return sf.ai(w)
        if k == 1:
            return sf.ai_prime(w)
        return w * sf.ai(w)
    return f


def _airy_oscillatory(c1, c2):
    # sqrt(u) J_{1/3}(2u^{3/2}/3) = (3 Ai(-u) - sqrt3 Bi(-u)) / 2 and
    # sqrt(u) J_{-1/3}(2u^{3/2}/3) = (3 Ai(-u) + sqrt3 Bi(-u)) / 2
    ca = 1.5 * (c1 + c2)
    cb = math.sqrt(3) / 2 * (c2 - c1)

    def f(z, k):
        w = -z
        if k == 0:
            return ca * sf.ai(w) + cb * sf.bi(w)
        if k == 1:
            return -(ca * sf.ai_prime(w) + cb * sf.bi_prime(w))
        return w * (ca * sf.ai(w) + cb * sf.bi(w))
    return f


def _bessel_over_root(kind, shift):
    """Z_1(r)/r with r = sqrt(z + shift); Z = K (kind '+') or J (kind '-')."""
    z_fn = sf.kv if kind == "+" else sf.jv

    def f(z, k):
        r = np.sqrt(z + shift)
        # d/dr [r^-n Z_n] = -r^-n Z_{n+1} for both K and J
        return (-1) ** k * z_fn(1 + k, r) / (2**k * r ** (1 + k))
    return f


def _exp_over_linear(shift):
    def f(z, k):
        v = z + shift
        e = np.exp(-v)
        if k == 0:
            return e / v
        if k == 1:
            return -e * (1 / v + 1 / v**2)
        return e * (1 / v + 2 / v**2 + 2 / v**3)
    return f


def _trig_over_linear(k1, k2, shift):
    def f(z, k):
        v = z + shift
        n0 = k1 * np.cos(v) + k2 * np.sin(v)
        n1 = -k1 * np.sin(v) + k2 * np.cos(v)
        if k == 0:
            return n0 / v
        if k == 1:
            return n1 / v - n0 / v**2
        return -n0 / v - 2 * n1 / v**2 + 2 * n0 / v**3
    return f


def _laguerre_kernel(n):
    def f(z, k):
        e = np.exp(-z)
        p = sf.laguerre_l(n, 1, 2 * z)
        p1 = -sf.laguerre_l(n - 1, 2, 2 * z) if n >= 1 else 0.0
        p2 = sf.laguerre_l(n - 2, 3, 2 * z) if n >= 2 else 0.0
        if k == 0:
            return e * p
        if k == 1:
            return e * (-p + 2 * p1)
        return e * (p - 4 * p1 + 4 * p2)
    return f


def _power(p):
    def f(z, k):
        if k == 0:
            return z**p
        if k == 1:
            return p * z ** (p - 1)
        return p * (p - 1) * z ** (p - 2)
    return f


def _half_r_bessel(kind, nu, outer):
    """rho = (r/2) Z_nu(r) with r = 2 sqrt(x) (outer=False) or r = 2/sqrt(x) (outer=True)."""
    z, zp = (sf.kv, sf.kvp) if kind == "+" else (sf.jv, sf.jvp)
    sign = 1.0 if kind == "+" else -1.0   # K solves Z'' = -Z'/r + (1 + nu^2/r^2) Z, J has -1

    def f(x, k):
        if outer:
            r, r1, r2 = 2 / np.sqrt(x), -x**-1.5, 1.5 * x**-2.5
        else:
            r, r1, r2 = 2 * np.sqrt(x), x**-0.5, -0.5 * x**-1.5
        zv, zd = z(nu, r), zp(nu, r)
        if k == 0:
            return 0.5 * r * zv
        g1 = 0.5 * zv + 0.5 * r * zd
        if k == 1:
            return g1 * r1
        zdd = -zd / r + (sign + nu**2 / r**2) * zv
        g2 = zd + 0.5 * r * zdd
        return g2 * r1**2 + g1 * r2
    return f


def _x_hypergeometric(mu, nu):
    """rho = x F(mu+1, nu+1; 2; x)."""
    a, b, c = mu + 1, nu + 1, 2.0

    def f(x, k):
        F = sf.hyp2f1(a, b, c, x)
        if k == 0:
            return x * F
        F1 = a * b / c * sf.hyp2f1(a + 1, b + 1, c + 1, x)
        if k == 1:
            return F + x * F1
        F2 = a * b * (a + 1) * (b + 1) / (c * (c + 1)) * sf.hyp2f1(a + 2, b + 2, c + 2, x)
        return 2 * F1 + x * F2
    return f


def _cos_cosec(c7, c8):
    def f(z, k):
        s, c = np.sin(z), np.cos(z)
        if k == 0:
            return c7 * c - c8 * (1 / s - 2 * s)
        if k == 1:
            return -c7 * s - c8 * (-c / s**2 - 2 * c)
        return -c7 * c - c8 * (c * c / s**3 + 1 / s**3 + 2 * s)
    return f


def _hermite(n):
    def f(z, k):
        if k == 0:
            return sf.hermite_function(n, z)
        if k == 1:
            return sf.hermite_function_prime(n, z)
        # Weber equation phi'' = (z^2/4 - n - 1/2) phi
        return (z * z / 4 - n - 0.5) * sf.hermite_function(n, z)
    return f


def _sampled_bound(fn, rate, upper, shift=0.0):
    z = np.linspace(0.0, upper, 4001)
    return 1.25 * float(np.max(np.abs(fn(z, 0)) * np.exp(rate * z)))


# ---------------------------------------------------------------------------
# registry

@dataclass(frozen=True)
class CaseSpec:
    case_id: str
    family: str
    defaults: Mapping[str, float]
    constraints: str
    anchor: str
    builder: Callable = field(repr=False)


REGISTRY: dict[str, CaseSpec] = {}


def _register(case_id, family, defaults, constraints, anchor):
    def deco(fn):
        REGISTRY[case_id] = CaseSpec(case_id, family, MappingProxyType(dict(defaults)), constraints, anchor, fn)
        return fn
    return deco


def _need(cond, msg):
    if not cond:
        raise InvalidParams(msg)


@_register("Q3", "Q", {"q2": 1.0, "q1": 0.0, "C1": 0.0, "C2": 1.0, "b0": 0.0},
           "q2 > 0, q1 >= 0", "Eq. 3.4")
def _q3(p):
    _need(p["q2"] > 0 and p["q1"] >= 0, "Q3 needs q2 > 0 and q1 >= 0")
    fam = CoefficientFamily.quadratic(p["q2"], p["q1"], 0, 0, p["b0"])
    return dict(family=fam, domain=HALF_LINE, integrability=BOUNDED_ONLY,
                kernel_fn=_rational_kernel(p["C1"], p["C2"], p["q2"], p["q1"]),
                singular_at=None if p["C2"] == 0 else (lambda u, q2=p["q2"], q1=p["q1"]: np.abs(u + q1 / q2)))


@_register("Q4", "Q", {"q1": 1.0, "rate": 1.0, "b0": 0.0}, "q1 != 0, rate > 0", "Q(iv)")
def _q4(p):
    _need(p["q1"] != 0 and p["rate"] > 0, "Q4 needs q1 != 0 and rate > 0")
    k = p["rate"]
    fam = CoefficientFamily.quadratic(0, p["q1"], 0, k * k * p["q1"], p["b0"])
    eps = k / 2
    return dict(family=fam, domain=HALF_LINE, integrability=FINITE_RANK, rank=1,
                kernel_fn=_exponential(k), decay=Decay(eps, 1.0, math.exp(k - eps), strip=math.inf))


@_register("Q5_airy", "Q", {"shift": 0.0}, "any real shift", "Eq. 3.5")
def _q5(p):
    s = p["shift"]
    fam = CoefficientFamily.quadratic(0, 1, 1, s, 0)
    fn = _airy(s)
    return dict(family=fam, domain=HALF_LINE, integrability=HILBERT_SCHMIDT, kernel_fn=fn,
                decay=Decay(1.0, 1.0, _sampled_bound(fn, 1.0, 40.0)), probe=(0.0, 5.0),
                truncation=max(16.0, 16.0 - s))


@_register("Q5_oscillatory", "Q", {"C1": 1.0, "C2": 1.0}, "free constants", "Eq. 3.6")
def _q5_osc(p):
    fam = CoefficientFamily.quadratic(0, 1, -1, 0, 0)
    return dict(family=fam, domain=HALF_LINE, integrability=BOUNDED_ONLY,
                kernel_fn=_airy_oscillatory(p["C1"], p["C2"]))


def _q6(sign):
    def build(p):
        s = p["shift"]
        _need(s >= 0, "shift must be non-negative")
        fam = CoefficientFamily.quadratic(1, s, 0, sign * 0.25, 0)
        hs = sign > 0 and s > 0
        return dict(family=fam, domain=HALF_LINE, integrability=HILBERT_SCHMIDT if hs else BOUNDED_ONLY,
                    kernel_fn=_bessel_over_root("+" if sign > 0 else "-", s),
                    truncation=1600.0 if hs else 40.0, tail_hilbert_schmidt=sign > 0)
    return build


_register("Q6_plus", "Q", {"shift": 0.0}, "shift >= 0", "Eq. 3.8")(_q6(+1))
_register("Q6_minus", "Q", {"shift": 0.0}, "shift >= 0", "Eq. 3.8")(_q6(-1))


@_register("Q7_plus", "Q", {"shift": 0.0}, "shift >= 0", "Eq. 3.12")
def _q7p(p):
    s = p["shift"]
    _need(s >= 0, "shift must be non-negative")
    fam = CoefficientFamily.quadratic(1, s, 1, s, 0)
    fn = _exp_over_linear(s)
    decay = Decay(0.5, min(s, 1.0) / 2, _sampled_bound(fn, 0.5, 80.0)) if s > 0 else None
    return dict(family=fam, domain=HALF_LINE, integrability=HILBERT_SCHMIDT if s > 0 else BOUNDED_ONLY,
                kernel_fn=fn, decay=decay, tail_hilbert_schmidt=True)


@_register("Q7_minus", "Q", {"shift": 0.0, "kappa1": 1.0, "kappa2": 0.0}, "shift >= 0", "Eq. 3.12")
def _q7m(p):
    s = p["shift"]
    _need(s >= 0, "shift must be non-negative")
    fam = CoefficientFamily.quadratic(1, s, -1, -s, 0)
    return dict(family=fam, domain=HALF_LINE, integrability=BOUNDED_ONLY,
                kernel_fn=_trig_over_linear(p["kappa1"], p["kappa2"], s))


@_register("Q8_laguerre", "Q", {"n": 2}, "integer n >= 0", "Eq. 3.17")
def _q8(p):
    n = p["n"]
    _need(n >= 0 and float(n).is_integer(), "n must be a non-negative integer")
    n = int(n)
    fam = CoefficientFamily.quadratic(1, 0, 1, -2 * (n + 1), 0)
    fn = _laguerre_kernel(n)
    return dict(family=fam, domain=HALF_LINE, integrability=FINITE_RANK, rank=n + 1, kernel_fn=fn,
                decay=Decay(0.5, 1.0, _sampled_bound(fn, 0.5, 200.0)), truncation=80.0 + 4 * n)


@_register("H1", "H", {"h1": 1.0, "h4": 8.0, "h6": 0.0}, "h1 != 0, 1 + h4/h1 >= 0; p > 0 root of 4p(p-1) = h4/h1",
           "Eq. 4.7")
def _h1(p):
    h1, h4 = p["h1"], p["h4"]
    _need(h1 != 0 and 1 + h4 / h1 >= 0, "H1 needs h1 != 0 and 1 + h4/h1 >= 0")
    power = (1 + math.sqrt(1 + h4 / h1)) / 2
    _need(power > 0, "H1 needs a positive exponent")
    fam = CoefficientFamily.hyperbolic(h1, h1, h4, h4, p["h6"])
    return dict(family=fam, domain=MULTIPLICATIVE, integrability=FINITE_RANK, rank=1,
                kernel_fn=_power(power), probe=(0.05, 2.0))


def _h2(kind):
    def build(p):
        nu = p["nu"]
        _need(nu > 0, "nu must be positive")
        h4, h5 = (5 - nu**2, -3 - nu**2) if kind == "+" else (-3 - nu**2, 5 - nu**2)
        fam = CoefficientFamily.hyperbolic(-1, -1, h4, h5, p["h6"])
        hs = kind == "-" or nu < 1
        return dict(family=fam, domain=MULTIPLICATIVE, integrability=HILBERT_SCHMIDT if hs else BOUNDED_ONLY,
                    kernel_fn=_half_r_bessel(kind, nu, outer=False), probe=(0.05, 2.0))
    return build


_register("H2_plus", "H", {"nu": 1.0, "h6": 0.0}, "nu > 0", "Eq. 4.9")(_h2("+"))
_register("H2_minus", "H", {"nu": 1.0, "h6": 0.0}, "nu > 0", "Eq. 4.9")(_h2("-"))


@_register("H3", "H", {"h2": 1.0, "h5": 8.0, "h6": 0.0}, "h5/h2 > 0; p > 0 root of 4p^2 + 4p = h5/h2",
           "Eq. 4.14")
def _h3(p):
    h2, h5 = p["h2"], p["h5"]
    _need(h2 != 0 and h5 / h2 > 0, "H3 needs h5/h2 > 0")
    power = (-1 + math.sqrt(1 + h5 / h2)) / 2
    fam = CoefficientFamily.hyperbolic(-h2, h2, -h5, h5, p["h6"])
    return dict(family=fam, domain=MULTIPLICATIVE, integrability=FINITE_RANK, rank=1,
                kernel_fn=_power(power), probe=(0.05, 2.0))


def _h4(kind):
    def build(p):
        nu = p["nu"]
        _need(nu > 0, "nu must be positive")
        h4, h5 = (5 - nu**2, 3 + nu**2) if kind == "+" else (-3 - nu**2, -5 + nu**2)
        fam = CoefficientFamily.hyperbolic(-1, 1, h4, h5, p["h6"])
        return dict(family=fam, domain=MULTIPLICATIVE,
                    integrability=HILBERT_SCHMIDT if kind == "+" else BOUNDED_ONLY,
                    kernel_fn=_half_r_bessel(kind, nu, outer=True), probe=(0.05, 2.0))
    return build


_register("H4_plus", "H", {"nu": 1.0, "h6": 0.0}, "nu > 0", "H(iv)")(_h4("+"))
_register("H4_minus", "H", {"nu": 1.0, "h6": 0.0}, "nu > 0", "H(iv)")(_h4("-"))


@_register("H5", "H", {"h1": 0.25, "h4": 0.3, "h6": 0.0}, "h1 != 0, h4 != 0, 1 + 2 h4/h1 >= 0", "Eq. 4.16")
def _h5(p):
    h1, h4 = p["h1"], p["h4"]
    _need(h1 != 0 and h4 != 0, "H5 needs h1 != 0 and h4 = -h5 != 0")
    product = -h4 / (2 * h1)            # mu * nu with mu + nu = 1
    _need(1 - 4 * product >= 0, "H5 needs real hypergeometric parameters")
    r = math.sqrt(1 - 4 * product)
    mu, nu = (1 + r) / 2, (1 - r) / 2
    fam = CoefficientFamily.hyperbolic(h1, 0, h4, -h4, p["h6"])
    return dict(family=fam, domain=MULTIPLICATIVE, integrability=BOUNDED_ONLY,
                kernel_fn=_x_hypergeometric(mu, nu), probe=(0.05, 2.0))


@_register("H6", "H", {}, "classification only", "Eq. 4.18")
def _h6(p):
    raise UnsupportedCase("H6 has no closed-form kernel; use classify() for its Riemann scheme")


@_register("H7", "H", {"h1": 0.0, "h2": 1.0, "C1": 0.0, "C2": 1.0, "h6": 0.0},
           "h1 != h2, (h2-h1) x + h1 + h2 != 0 on [0, 1]", "Eq. 4.19")
def _h7(p):
    h1, h2 = p["h1"], p["h2"]
    _need(h1 != h2, "H7 needs h1 != h2")
    _need((h1 + h2) * (2 * h2) > 0, "H7 denominator vanishes on [0, 1]")
    fam = CoefficientFamily.hyperbolic(h1, h2, 0, 0, p["h6"])
    return dict(family=fam, domain=MULTIPLICATIVE, integrability=BOUNDED_ONLY,
                kernel_fn=_rational_kernel(p["C1"], p["C2"], h2 - h1, h1 + h2), probe=(0.05, 2.0))


@_register("C_general", "C", {"c7": 1.0, "c8": 0.0, "c6": 0.0}, "free constants", "Eq. 5.6")
def _c(p):
    fam = CoefficientFamily.circular(-1, 0, 3, 0, p["c6"])
    finite = p["c8"] == 0
    return dict(family=fam, domain=PERIODIC, integrability=FINITE_RANK if finite else BOUNDED_ONLY,
                rank=2 if finite else None, kernel_fn=_cos_cosec(p["c7"], p["c8"]), period=math.pi,
                probe=(0.1, 1.4), singular_at=None if finite else (lambda u: np.abs(np.sin(u))))


@_register("hermite", "-", {"n": 0}, "integer 0 <= n <= 200", "Cor. 6.4")
def _hermite_case(p):
    n = p["n"]
    _need(0 <= n <= 200 and float(n).is_integer(), "n must be an integer in [0, 200]")
    fn = _hermite(int(n))
    return dict(family=None, domain=HALF_LINE, integrability=HILBERT_SCHMIDT, kernel_fn=fn,
                decay=Decay(1.0, 1.0, _sampled_bound(fn, 1.0, 40.0), strip=1.0),
                truncation=max(20.0, 4 * math.sqrt(n + 1) + 16))


def case_ids():
    return list(REGISTRY)


def build_case(case_id: str, params: Mapping[str, float] | None = None) -> KernelCase:
    try:
        spec = REGISTRY[case_id]
    except KeyError:
        raise InvalidParams(f"unknown case {case_id!r}; known: {', '.join(REGISTRY)}") from None
    merged = dict(spec.defaults)
    for key, value in (params or {}).items():
        if key not in spec.defaults:
            raise InvalidParams(f"{case_id} has no parameter {key!r}")
        merged[key] = float(value)
    fields = spec.builder(merged)
    decay = fields.get("decay")
    if decay is not None and "truncation" not in fields:
        fields["truncation"] = max(40.0, 20.0 / decay.rate)
    return KernelCase(case_id, MappingProxyType(merged), **fields)
